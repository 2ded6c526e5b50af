"""Tests for millrun.scenario: segmentation, sweeps, critical demand, risk."""

import math

import pytest

from millrun.demand import NormalFit
from millrun.errors import ScenarioError
from millrun.plant import Machine, PlantConfig
from millrun.scenario import (
    OrderGen,
    ScenarioSpec,
    WarehouseOption,
    critical_demand,
    segment_demand,
    service_risk,
    shelving_summary,
    warehouse_sweep,
)

FIT_2013 = NormalFit(mu=397_058.0, sigma=71_078.0, n=12)


def _sample_plant() -> PlantConfig:
    machines = [
        Machine(id=j, t=t, e=0.9, m=0.03, s=12.0)
        for j, t in enumerate((300.0, 320.0, 280.0, 350.0), 1)
    ]
    return PlantConfig.from_pallets(machines, hours_per_day=24.0, pallets=84, pallet_kg=1000.0)


def _tiny_plant() -> PlantConfig:
    return PlantConfig(
        machines=[Machine(id=1, t=100.0, e=1.0, m=0.0, s=0.0)],
        hours_per_day=24.0,
        warehouse_capacity_kg=1e9,
    )


# --------------------------------------------------------------------------- #
# Segmentation
# --------------------------------------------------------------------------- #


def test_equal_split_and_even_due_dates():
    orders = segment_demand(400_000.0, OrderGen(count=4), seed=0)
    assert [o.quantity for o in orders] == [100_000.0] * 4
    assert [o.due_days for o in orders] == [6.0, 11.0, 17.0, 22.0]
    assert [o.id for o in orders] == [1, 2, 3, 4]


@pytest.mark.parametrize("demand", [400_001.0, 397_057.75, 1_000_003.4, 5_000.0])
def test_split_conserves_demand(demand):
    for split in ("equal", "dirichlet"):
        orders = segment_demand(demand, OrderGen(count=7, split=split), seed=3)
        total = sum(o.quantity for o in orders)
        assert abs(total - demand) <= 0.5  # noqa: PLR2004
        assert all(o.quantity == int(o.quantity) for o in orders)


def test_dirichlet_split_is_seeded():
    gen = OrderGen(count=10, split="dirichlet", due="random")
    a = segment_demand(350_000.0, gen, seed=5)
    b = segment_demand(350_000.0, gen, seed=5)
    c = segment_demand(350_000.0, gen, seed=6)
    assert a == b
    assert a != c


def test_random_due_dates_are_distinct_and_sorted():
    orders = segment_demand(200_000.0, OrderGen(count=22, due="random"), seed=1)
    days = [o.due_days for o in orders]
    assert days == sorted(days)
    assert len(set(days)) == 22  # noqa: PLR2004
    assert set(days) == {float(d) for d in range(1, 23)}


def test_order_gen_validation():
    with pytest.raises(ScenarioError, match="distinct due dates"):
        OrderGen(count=23)
    with pytest.raises(ScenarioError, match=">= 1"):
        OrderGen(count=0)
    with pytest.raises(ScenarioError, match="split"):
        OrderGen(count=3, split="lumpy")
    with pytest.raises(ScenarioError, match="unknown order_gen"):
        OrderGen.from_dict({"count": 3, "size": 2})


def test_segment_rejects_tiny_or_bad_demand():
    with pytest.raises(ScenarioError, match="too small"):
        segment_demand(3.0, OrderGen(count=5), seed=0)
    with pytest.raises(ScenarioError, match="> 0"):
        segment_demand(0.0, OrderGen(count=5), seed=0)


# --------------------------------------------------------------------------- #
# Scenario spec
# --------------------------------------------------------------------------- #


def test_warehouse_option_parsing():
    plant = _sample_plant()
    assert WarehouseOption.parse("inf").to_kg(plant) == math.inf
    assert WarehouseOption.parse(5_000).to_kg(plant) == 5_000.0
    assert WarehouseOption.parse({"kg": 7_500}).to_kg(plant) == 7_500.0
    assert WarehouseOption.parse({"pallets": 144}).to_kg(plant) == 144_000.0
    assert WarehouseOption.parse({"pallets": 144}).label == "144 pallets"
    with pytest.raises(ScenarioError):
        WarehouseOption.parse("lots")
    with pytest.raises(ScenarioError):
        WarehouseOption.parse({"tonnes": 3})
    with pytest.raises(ScenarioError):
        WarehouseOption.parse(-1)


def test_scenario_from_dict():
    spec = ScenarioSpec.from_dict(
        {
            "monthly_demands": [300_000, 400_000],
            "warehouse_options": [{"pallets": 84}, "inf"],
            "order_gen": {"count": 5},
            "seed": 7,
            "method": "greedy",
        }
    )
    assert spec.monthly_demands == (300_000.0, 400_000.0)
    assert spec.order_gen == OrderGen(count=5)
    assert spec.seed == 7  # noqa: PLR2004
    with pytest.raises(ScenarioError, match="unknown scenario"):
        ScenarioSpec.from_dict(
            {
                "monthly_demands": [1],
                "warehouse_options": ["inf"],
                "order_gen": {"count": 1},
                "x": 1,
            }
        )
    with pytest.raises(ScenarioError, match="order_gen"):
        ScenarioSpec.from_dict({"monthly_demands": [1], "warehouse_options": ["inf"]})
    with pytest.raises(ScenarioError, match="unknown method"):
        ScenarioSpec((1.0,), (WarehouseOption.parse("inf"),), OrderGen(count=1), method="magic")


# --------------------------------------------------------------------------- #
# Sweep
# --------------------------------------------------------------------------- #


def test_sweep_is_monotone_in_capacity():
    demands = [285_000.0 + 20_000.0 * k for k in range(12)]
    spec = ScenarioSpec(
        monthly_demands=tuple(demands),
        warehouse_options=tuple(
            WarehouseOption.parse(w) for w in ("inf", {"pallets": 144}, {"pallets": 84})
        ),
        order_gen=OrderGen(count=6),
        seed=2013,
        method="local",
        budget=400,
    )
    table = warehouse_sweep(spec, _sample_plant())
    frame = table.to_frame()
    assert len(frame) == 36  # noqa: PLR2004
    assert (frame["status"] == "ok").all()
    for _, rows in frame.groupby("month"):
        assert list(rows["A_kg"]) == sorted(rows["A_kg"])
        z = list(rows["Z_kg"])
        unserved = list(rows["unserved"])
        assert all(a <= b + 1e-6 for a, b in zip(z, z[1:]))  # noqa: PLR2004
        assert all(a >= b for a, b in zip(unserved, unserved[1:]))
    grid = table.unserved_grid()
    assert list(grid.columns) == ["84 pallets", "144 pallets", "inf"]
    assert grid.shape == (12, 3)



def test_large_enough_warehouse_clears_an_overloaded_plant():
    # fast lines finish every order in time; each order alone outgrows 84 pallets
    machines = [Machine(id=j, t=1_000.0, e=1.0, m=0.0, s=12.0) for j in range(1, 5)]
    plant = PlantConfig.from_pallets(machines, hours_per_day=24.0, pallets=84, pallet_kg=1000.0)
    spec = ScenarioSpec(
        monthly_demands=tuple(360_000.0 + 12_000.0 * k for k in range(12)),
        warehouse_options=tuple(
            WarehouseOption.parse(w) for w in ("inf", {"pallets": 144}, {"pallets": 84})
        ),
        order_gen=OrderGen(count=4),
        seed=2013,
        method="local",
        budget=400,
    )
    grid = warehouse_sweep(spec, plant).unserved_grid()
    assert (grid["inf"] == 0).all()
    assert (grid["84 pallets"] > 0).all()
    assert (grid["84 pallets"] >= grid["144 pallets"]).all()
    assert (grid["144 pallets"] >= grid["inf"]).all()

def test_unbounded_warehouse_serves_a_light_month():
    spec = ScenarioSpec(
        monthly_demands=(100_000.0,),
        warehouse_options=(WarehouseOption.parse("inf"),),
        order_gen=OrderGen(count=5),
        method="greedy",
    )
    cell = warehouse_sweep(spec, _sample_plant()).cells[0]
    assert cell.unserved == 0
    assert cell.Z_kg == pytest.approx(100_000.0)
    assert cell.A_kg == math.inf


def test_repeated_months_get_identical_results():
    spec = ScenarioSpec(
        monthly_demands=(420_000.0, 420_000.0),
        warehouse_options=(WarehouseOption.parse({"pallets": 84}),),
        order_gen=OrderGen(count=6, split="dirichlet", due="random"),
        seed=11,
        budget=300,
    )
    first, second = warehouse_sweep(spec, _sample_plant()).cells
    assert (first.unserved, first.Z_kg) == (second.unserved, second.Z_kg)


def test_failed_cell_is_kept():
    spec = ScenarioSpec(
        monthly_demands=(100_000.0,),
        warehouse_options=(WarehouseOption.parse(50_000),),
        order_gen=OrderGen(count=20),
        method="oracle",
    )
    table = warehouse_sweep(spec, _sample_plant())
    assert table.cells[0].failed
    assert "exceeds limit" in (table.cells[0].error or "")
    assert table.to_frame()["status"].tolist() == ["failed"]


# --------------------------------------------------------------------------- #
# Critical demand
# --------------------------------------------------------------------------- #


def test_critical_demand_single_machine_by_hand():
    # 100 kg/h for 24 h: anything at or above 2400 kg misses its due time
    gen = OrderGen(count=1, working_days=1)
    crit = critical_demand(
        _tiny_plant(), 1e9, gen, seed=0, method="oracle", bracket=(1_000.0, 10_000.0), tol=10.0
    )
    assert 2_399.5 <= crit <= 2_410.0  # noqa: PLR2004


def test_critical_demand_needs_a_crossing():
    gen = OrderGen(count=1, working_days=1)
    with pytest.raises(ScenarioError, match="no critical point"):
        critical_demand(_tiny_plant(), 1e9, gen, seed=0, method="oracle", bracket=(1_000.0, 2_000.0))
    with pytest.raises(ScenarioError, match="no critical point"):
        critical_demand(_tiny_plant(), 1e9, gen, seed=0, method="oracle", bracket=(3_000.0, 5_000.0))
    with pytest.raises(ScenarioError, match="bracket"):
        critical_demand(_tiny_plant(), 1e9, gen, seed=0, bracket=(5_000.0, 1_000.0))


def test_warehouse_bounds_critical_demand():
    # a single resident order may not exceed the warehouse
    gen = OrderGen(count=1, working_days=1)
    crit = critical_demand(
        _tiny_plant(), 1_500.0, gen, seed=0, method="oracle", bracket=(1_000.0, 10_000.0), tol=10.0
    )
    assert 1_500.0 <= crit <= 1_511.0  # noqa: PLR2004


# --------------------------------------------------------------------------- #
# Risk
# --------------------------------------------------------------------------- #


def test_service_risk_values():
    assert service_risk(FIT_2013, 377_721.0) == pytest.approx(0.6072, abs=0.0005)
    assert service_risk(FIT_2013, 625_000.0) == pytest.approx(0.0007, abs=0.0002)
    assert service_risk(FIT_2013, -math.inf) == 1.0


def test_shelving_summary():
    out = shelving_summary(FIT_2013, [144_000.0, 84_000.0], [625_000.0, 377_721.0])
    assert out["space_increase"] == pytest.approx(60 / 84)
    assert [row["A_kg"] for row in out["capacities"]] == [84_000.0, 144_000.0]
    assert out["capacities"][0]["risk"] == pytest.approx(0.6072, abs=0.0005)
    assert out["capacities"][1]["risk"] < out["capacities"][0]["risk"]
    with pytest.raises(ScenarioError):
        shelving_summary(FIT_2013, [1.0], [])
