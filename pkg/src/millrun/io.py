"""
File formats: CSV inputs, the ``plant.cfg`` settings file, the scenario JSON,
and atomic writers for every report.

Input CSVs (header row required, ``.`` decimal separator, no thousands
separators):

    demand.csv   period,demand_kg[,sales_kg]
    plant.csv    id,t_kg_h,e,m,s_h
    orders.csv   id,q_kg,due_days

``plant.cfg`` holds ``key = value`` lines with an optional ``[plant]``
header; ``#`` starts a comment.  Exactly one of ``A_kg`` / ``A_pallets`` is
required, the latter together with ``pallet_kg``.

Fail-closed
~~~~~~~~~~~
Missing columns, non-numeric cells, unknown ``plant.cfg`` keys and missing
files raise ``InputFormatError`` naming the file and the offending item.

Writers go through a temporary file in the target directory and
``os.replace``; a crash never leaves a partial report behind.
"""

from __future__ import annotations

import configparser
import contextlib
import json
import math
import os
import re
import tempfile
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from .constants import LOSS_PRINTED, MONTHLY_HOURS, SLACK_EPSILON, TIE_INTERACTS
from .demand import DemandSeries
from .errors import InputFormatError, MillrunError
from .plant import Machine, Order, PlantConfig
from .scenario import ScenarioSpec

DEMAND_COLUMNS: tuple[str, ...] = ("period", "demand_kg")
PLANT_COLUMNS: tuple[str, ...] = ("id", "t_kg_h", "e", "m", "s_h")
ORDER_COLUMNS: tuple[str, ...] = ("id", "q_kg", "due_days")

_CFG_SECTION: str = "plant"
_CFG_KEYS: frozenset[str] = frozenset(
    {
        "h_per_day",
        "monthly_hours",
        "a_kg",
        "a_pallets",
        "pallet_kg",
        "slack_epsilon",
        "loss_formula",
        "tie_interacts",
        "enforce_warehouse",
    }
)

# --------------------------------------------------------------------------- #
# Readers
# --------------------------------------------------------------------------- #


def _exists(path: str | Path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise InputFormatError(f"{p}: file not found")
    return p


def read_csv_table(path: str | Path) -> pd.DataFrame:
    """Read any CSV this package writes (or accepts) into a DataFrame."""
    p = _exists(path)
    try:
        return pd.read_csv(p)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise InputFormatError(f"{p}: {exc}") from exc


def _numeric_frame(path: str | Path, required: Sequence[str]) -> pd.DataFrame:
    frame = read_csv_table(path)
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise InputFormatError(f"{path}: missing column(s) {missing}")
    for col in frame.columns:
        if col not in required and col != "sales_kg":
            continue
        values = pd.to_numeric(frame[col], errors="coerce")
        bad = values.isna() & frame[col].notna()
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0]) + 2
            raise InputFormatError(
                f"{path}: line {row}, column {col!r}: not a plain number "
                f"({frame[col].iloc[row - 2]!r}); thousands separators are not allowed"
            )
        frame[col] = values
    if frame[list(required)].isna().any().any():
        raise InputFormatError(f"{path}: empty cell in a required column")
    return frame


def read_demand_csv(path: str | Path) -> DemandSeries:
    frame = _numeric_frame(path, DEMAND_COLUMNS)
    periods = frame["period"].to_numpy()
    if np.any(np.diff(periods) <= 0):
        raise InputFormatError(f"{path}: periods must be strictly increasing")
    sales = None
    if "sales_kg" in frame.columns:
        if frame["sales_kg"].isna().any():
            raise InputFormatError(f"{path}: sales_kg present but incomplete")
        sales = frame["sales_kg"].tolist()
    try:
        return DemandSeries.from_values(frame["demand_kg"].tolist(), sales)
    except MillrunError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


def read_plant_csv(path: str | Path) -> list[Machine]:
    frame = _numeric_frame(path, PLANT_COLUMNS)
    try:
        return [
            Machine(id=int(r.id), t=float(r.t_kg_h), e=float(r.e), m=float(r.m), s=float(r.s_h))
            for r in frame.itertuples(index=False)
        ]
    except MillrunError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


def read_orders_csv(path: str | Path) -> list[Order]:
    frame = _numeric_frame(path, ORDER_COLUMNS)
    try:
        orders = [
            Order(id=int(r.id), quantity=float(r.q_kg), due_days=float(r.due_days))
            for r in frame.itertuples(index=False)
        ]
    except MillrunError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc
    ids = [o.id for o in orders]
    if len(set(ids)) != len(ids):
        raise InputFormatError(f"{path}: duplicate order ids")
    return orders


def _cfg_float(section: configparser.SectionProxy, key: str, path: Path) -> float | None:
    if key not in section:
        return None
    try:
        return float(section[key])
    except ValueError as exc:
        raise InputFormatError(f"{path}: {key} = {section[key]!r} is not a number") from exc


def _cfg_bool(section: configparser.SectionProxy, key: str, default: bool, path: Path) -> bool:
    try:
        return section.getboolean(key, fallback=default)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {key} = {section[key]!r} is not a boolean") from exc


def read_plant_cfg(path: str | Path, machines: Sequence[Machine]) -> PlantConfig:
    """Combine *machines* with the settings in ``plant.cfg``."""
    p = _exists(path)
    text = p.read_text(encoding="utf-8")
    if not re.search(r"^\s*\[", text, flags=re.MULTILINE):
        text = f"[{_CFG_SECTION}]\n{text}"
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(text, source=str(p))
    except configparser.Error as exc:
        raise InputFormatError(f"{p}: {exc}") from exc
    if parser.sections() != [_CFG_SECTION]:
        raise InputFormatError(f"{p}: expected a single [{_CFG_SECTION}] section")
    section = parser[_CFG_SECTION]
    unknown = sorted(set(section) - _CFG_KEYS)
    if unknown:
        raise InputFormatError(f"{p}: unknown key(s) {unknown}")

    h = _cfg_float(section, "h_per_day", p)
    if h is None:
        raise InputFormatError(f"{p}: h_per_day is required")
    a_kg = _cfg_float(section, "a_kg", p)
    a_pallets = _cfg_float(section, "a_pallets", p)
    pallet_kg = _cfg_float(section, "pallet_kg", p)
    if (a_kg is None) == (a_pallets is None):
        raise InputFormatError(f"{p}: give exactly one of A_kg or A_pallets")
    if a_kg is None:
        if pallet_kg is None:
            raise InputFormatError(f"{p}: A_pallets needs pallet_kg")
        a_kg = float(a_pallets or 0.0) * pallet_kg

    monthly = _cfg_float(section, "monthly_hours", p)
    eps = _cfg_float(section, "slack_epsilon", p)
    try:
        return PlantConfig(
            machines=tuple(machines),
            hours_per_day=h,
            warehouse_capacity_kg=a_kg,
            pallet_kg=pallet_kg,
            monthly_hours=MONTHLY_HOURS if monthly is None else monthly,
            slack_epsilon=SLACK_EPSILON if eps is None else eps,
            loss_formula=section.get("loss_formula", LOSS_PRINTED).strip(),
            tie_interacts=_cfg_bool(section, "tie_interacts", TIE_INTERACTS, p),
            enforce_warehouse=_cfg_bool(section, "enforce_warehouse", True, p),
        )
    except MillrunError as exc:
        raise InputFormatError(f"{p}: {exc}") from exc


def load_plant(plant_csv: str | Path, plant_cfg: str | Path) -> PlantConfig:
    return read_plant_cfg(plant_cfg, read_plant_csv(plant_csv))


def read_json_report(path: str | Path) -> Any:
    p = _exists(path)
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{p}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def read_scenario_json(path: str | Path) -> ScenarioSpec:
    data = read_json_report(path)
    if not isinstance(data, dict):
        raise InputFormatError(f"{path}: scenario must be a JSON object")
    try:
        return ScenarioSpec.from_dict(data)
    except (MillrunError, TypeError) as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


# --------------------------------------------------------------------------- #
# Writers
# --------------------------------------------------------------------------- #


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write *text* to *path* via a sibling temp file and ``os.replace``."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise
    return target


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"{type(obj).__name__} is not JSON serialisable")


def dumps_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def write_json(obj: Any, path: str | Path) -> Path:
    return atomic_write_text(path, dumps_json(obj))


def write_csv(frame: pd.DataFrame, path: str | Path) -> Path:
    return atomic_write_text(path, frame.to_csv(index=False, lineterminator="\n"))


def fitted_frame(values: Sequence[float], fitted: Sequence[float | None]) -> pd.DataFrame:
    """Per-period actuals and one-step-ahead forecasts for plotting."""
    return pd.DataFrame(
        {
            "period": range(1, len(values) + 1),
            "actual_kg": list(values),
            "forecast_kg": [math.nan if f is None else f for f in fitted],
        }
    )
