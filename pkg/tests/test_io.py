"""Tests for millrun.io: CSV/cfg/JSON readers and the atomic writers."""

import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from millrun.errors import InputFormatError
from millrun.io import (
    atomic_write_text,
    dumps_json,
    fitted_frame,
    load_plant,
    read_csv_table,
    read_demand_csv,
    read_orders_csv,
    read_plant_cfg,
    read_plant_csv,
    read_scenario_json,
    write_csv,
    write_json,
)
from millrun.plant import Machine

DATA = Path(__file__).resolve().parents[1] / "data"
MACHINES = [Machine(id=1, t=100.0, e=1.0, m=0.0, s=1.0)]


def _write(tmp_path: Path, name: str, text: str) -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# --------------------------------------------------------------------------- #
# Bundled data files
# --------------------------------------------------------------------------- #


def test_bundled_inputs_load():
    series = read_demand_csv(DATA / "demand_2013.csv")
    assert len(series) == 12  # noqa: PLR2004
    assert not series.has_sales

    plant = load_plant(DATA / "plant.csv", DATA / "plant.cfg")
    assert plant.n_machines == 4  # noqa: PLR2004
    assert plant.warehouse_capacity_kg == 84_000.0
    assert plant.pallet_kg == 1_000.0
    assert plant.monthly_hours == 528.0  # noqa: PLR2004

    orders = read_orders_csv(DATA / "orders.csv")
    assert [o.id for o in orders] == list(range(1, 9))

    spec = read_scenario_json(DATA / "scenario.json")
    assert len(spec.monthly_demands) == 12  # noqa: PLR2004
    assert [w.label for w in spec.warehouse_options] == ["84 pallets", "144 pallets", "inf"]


# --------------------------------------------------------------------------- #
# CSV readers
# --------------------------------------------------------------------------- #


def test_demand_with_sales(tmp_path):
    path = _write(tmp_path, "d.csv", "period,demand_kg,sales_kg\n1,100,90\n2,200,200\n")
    series = read_demand_csv(path)
    assert series.has_sales
    assert series.sales == (90.0, 200.0)


def test_thousands_separator_rejected(tmp_path):
    path = _write(tmp_path, "d.csv", 'period,demand_kg\n1,"435,536"\n')
    with pytest.raises(InputFormatError, match="thousands separators"):
        read_demand_csv(path)


def test_missing_column_rejected(tmp_path):
    path = _write(tmp_path, "p.csv", "id,t_kg_h,e,m\n1,100,0.9,0.03\n")
    with pytest.raises(InputFormatError, match="missing column"):
        read_plant_csv(path)


def test_periods_must_increase(tmp_path):
    path = _write(tmp_path, "d.csv", "period,demand_kg\n2,100\n1,200\n")
    with pytest.raises(InputFormatError, match="strictly increasing"):
        read_demand_csv(path)


def test_invalid_machine_names_file(tmp_path):
    path = _write(tmp_path, "p.csv", "id,t_kg_h,e,m,s_h\n1,100,1.5,0.03,12\n")
    with pytest.raises(InputFormatError, match="p.csv: plant: machine 1"):
        read_plant_csv(path)


def test_duplicate_order_ids_rejected(tmp_path):
    path = _write(tmp_path, "o.csv", "id,q_kg,due_days\n1,10,2\n1,20,3\n")
    with pytest.raises(InputFormatError, match="duplicate"):
        read_orders_csv(path)


def test_missing_file(tmp_path):
    with pytest.raises(InputFormatError, match="file not found"):
        read_csv_table(tmp_path / "nope.csv")


# --------------------------------------------------------------------------- #
# plant.cfg
# --------------------------------------------------------------------------- #


def test_cfg_without_section_header(tmp_path):
    path = _write(tmp_path, "plant.cfg", "# comment first\nh_per_day = 8\nA_kg = 5000  # inline\n")
    plant = read_plant_cfg(path, MACHINES)
    assert plant.hours_per_day == 8.0  # noqa: PLR2004
    assert plant.warehouse_capacity_kg == 5_000.0
    assert plant.loss_formula == "printed"
    assert plant.tie_interacts is True


def test_cfg_flags_and_unbounded_warehouse(tmp_path):
    text = "[plant]\nh_per_day = 8\nA_kg = inf\ntie_interacts = no\nenforce_warehouse = off\n"
    plant = read_plant_cfg(_write(tmp_path, "plant.cfg", text), MACHINES)
    assert math.isinf(plant.warehouse_capacity_kg)
    assert plant.tie_interacts is False
    assert plant.enforce_warehouse is False


@pytest.mark.parametrize(
    "text, message",
    [
        ("h_per_day = 8\nA_kg = 1\ncolour = red\n", "unknown key"),
        ("A_kg = 1\n", "h_per_day is required"),
        ("h_per_day = 8\n", "exactly one"),
        ("h_per_day = 8\nA_kg = 1\nA_pallets = 2\npallet_kg = 3\n", "exactly one"),
        ("h_per_day = 8\nA_pallets = 84\n", "needs pallet_kg"),
        ("h_per_day = eight\nA_kg = 1\n", "not a number"),
        ("h_per_day = 8\nA_kg = 1\ntie_interacts = maybe\n", "not a boolean"),
        ("h_per_day = 8\nA_kg = 1\nloss_formula = cubic\n", "loss"),
    ],
)
def test_cfg_errors(tmp_path, text, message):
    with pytest.raises(InputFormatError, match=message):
        read_plant_cfg(_write(tmp_path, "plant.cfg", text), MACHINES)


def test_scenario_json_errors(tmp_path):
    with pytest.raises(InputFormatError, match="invalid JSON"):
        read_scenario_json(_write(tmp_path, "s.json", "{not json"))
    with pytest.raises(InputFormatError, match="JSON object"):
        read_scenario_json(_write(tmp_path, "s.json", "[1, 2]"))
    with pytest.raises(InputFormatError, match="order_gen"):
        read_scenario_json(
            _write(tmp_path, "s.json", json.dumps({"monthly_demands": [1], "warehouse_options": ["inf"]}))
        )


# --------------------------------------------------------------------------- #
# Writers
# --------------------------------------------------------------------------- #


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "report.txt"
    atomic_write_text(target, "first\n")
    atomic_write_text(target, "second\n")
    assert target.read_text(encoding="utf-8") == "second\n"
    assert [p.name for p in target.parent.iterdir()] == ["report.txt"]


def test_json_is_stable_and_handles_numpy(tmp_path):
    obj = {"b": np.float64(1.5), "a": np.arange(3), "c": np.int64(4)}
    text = dumps_json(obj)
    assert text == dumps_json(dict(reversed(list(obj.items()))))
    assert json.loads(text) == {"a": [0, 1, 2], "b": 1.5, "c": 4}
    path = write_json(obj, tmp_path / "r.json")
    assert path.read_text(encoding="utf-8") == text


def test_csv_round_trip(tmp_path):
    frame = fitted_frame([100.0, 200.0, 150.0], [None, 100.0, 150.0])
    path = write_csv(frame, tmp_path / "fitted.csv")
    assert "\r" not in path.read_text(encoding="utf-8")
    back = read_csv_table(path)
    assert list(back.columns) == ["period", "actual_kg", "forecast_kg"]
    assert math.isnan(back["forecast_kg"].iloc[0])
    pd.testing.assert_series_equal(back["actual_kg"], frame["actual_kg"])
