"""
Monthly demand scenarios: order segmentation, warehouse-capacity sweeps,
critical demand and the service risk attached to it.

Segmentation
~~~~~~~~~~~~
A month's demand becomes ``count`` orders.  Quantities are an equal split or
a seeded Dirichlet split, rounded to whole kilograms by largest remainder so
they always sum to the month's demand rounded to the nearest kg.  Due dates
are distinct whole working days, spread evenly or drawn at random, so
``count`` may not exceed the working days of the month.

Each month draws from ``SeedSequence([seed, round(demand)])``: two months with
the same demand and seed get the same orders.

Sweep
~~~~~
Capacities are solved in ascending order and every cell warm-starts local
search from the previous (smaller) capacity's schedule, which stays feasible
when ``A`` grows.  ``Z`` therefore never decreases with ``A``.

What these do NOT mean
~~~~~~~~~~~~~~~~~~~~~~
The critical demand is a property of the solver *and* the segmentation
generator, not of the plant alone.  A different order mix moves it.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd

from .constants import (
    CRITICAL_BRACKET,
    CRITICAL_TOLERANCE,
    LOCAL_SEARCH_BUDGET,
    WORKING_DAYS,
)
from .demand import NormalFit, tail_probability
from .errors import MillrunError, ScenarioError
from .plant import Order, PlantConfig
from .solvers import METHODS, SolveResult, solve

logger = logging.getLogger(__name__)

SPLIT_EQUAL: str = "equal"
SPLIT_DIRICHLET: str = "dirichlet"
DUE_EVEN: str = "even"
DUE_RANDOM: str = "random"

_MAX_BISECTIONS: int = 200
_MONOTONE_CHECKS: int = 4

# --------------------------------------------------------------------------- #
# Domain types
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class OrderGen:
    """How one month's demand is cut into orders."""

    count: int
    split: str = SPLIT_EQUAL
    due: str = DUE_EVEN
    working_days: int = WORKING_DAYS
    concentration: float = 5.0

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ScenarioError(f"order count must be >= 1, got {self.count}")
        if self.split not in (SPLIT_EQUAL, SPLIT_DIRICHLET):
            raise ScenarioError(f"split must be 'equal' or 'dirichlet', got {self.split!r}")
        if self.due not in (DUE_EVEN, DUE_RANDOM):
            raise ScenarioError(f"due must be 'even' or 'random', got {self.due!r}")
        if self.working_days < 1:
            raise ScenarioError(f"working_days must be >= 1, got {self.working_days}")
        if not self.concentration > 0:
            raise ScenarioError(f"concentration must be > 0, got {self.concentration}")
        if self.count > self.working_days:
            raise ScenarioError(
                f"{self.count} orders cannot get distinct due dates in {self.working_days} working days"
            )

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> OrderGen:
        unknown = set(data) - {"count", "split", "due", "working_days", "concentration"}
        if unknown:
            raise ScenarioError(f"unknown order_gen key(s): {sorted(unknown)}")
        if "count" not in data:
            raise ScenarioError("order_gen needs 'count'")
        return cls(**{k: data[k] for k in data})


@dataclass(frozen=True)
class WarehouseOption:
    """Warehouse capacity given in ``pallets``, ``kg`` or unbounded (``inf``)."""

    amount: float
    unit: str = "kg"

    def __post_init__(self) -> None:
        if self.unit not in ("kg", "pallets", "inf"):
            raise ScenarioError(f"capacity unit must be kg, pallets or inf, got {self.unit!r}")
        if self.unit != "inf" and not (math.isfinite(self.amount) and self.amount > 0):
            raise ScenarioError(f"capacity must be > 0, got {self.amount}")

    @classmethod
    def parse(cls, raw: Any) -> WarehouseOption:
        """Accept ``"inf"``, a number (kg), ``{"kg": x}`` or ``{"pallets": x}``."""
        if isinstance(raw, str):
            if raw.strip().lower() in ("inf", "infinity"):
                return cls(math.inf, "inf")
            raise ScenarioError(f"unrecognised capacity {raw!r}")
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return cls(float(raw), "kg")
        if isinstance(raw, Mapping) and len(raw) == 1:
            ((unit, amount),) = raw.items()
            return cls(float(amount), str(unit))
        raise ScenarioError(f"unrecognised capacity {raw!r}")

    def to_kg(self, plant: PlantConfig) -> float:
        if self.unit == "inf":
            return math.inf
        if self.unit == "pallets":
            return plant.pallets_to_kg(self.amount)
        return self.amount

    @property
    def label(self) -> str:
        if self.unit == "inf":
            return "inf"
        return f"{self.amount:g} {self.unit}"


@dataclass(frozen=True)
class ScenarioSpec:
    monthly_demands: tuple[float, ...]
    warehouse_options: tuple[WarehouseOption, ...]
    order_gen: OrderGen
    seed: int = 0
    method: str = "local"
    budget: int = LOCAL_SEARCH_BUDGET

    def __post_init__(self) -> None:
        object.__setattr__(self, "monthly_demands", tuple(float(d) for d in self.monthly_demands))
        object.__setattr__(self, "warehouse_options", tuple(self.warehouse_options))
        if not self.monthly_demands:
            raise ScenarioError("scenario needs at least one monthly demand")
        for k, d in enumerate(self.monthly_demands, 1):
            if not (math.isfinite(d) and d > 0):
                raise ScenarioError(f"month {k}: demand must be > 0, got {d}")
        if not self.warehouse_options:
            raise ScenarioError("scenario needs at least one warehouse option")
        if self.seed < 0:
            raise ScenarioError(f"seed must be >= 0, got {self.seed}")
        if self.method not in METHODS:
            raise ScenarioError(f"unknown method {self.method!r}; choose one of {list(METHODS)}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ScenarioSpec:
        allowed = {"monthly_demands", "warehouse_options", "order_gen", "seed", "method", "budget"}
        unknown = set(data) - allowed
        if unknown:
            raise ScenarioError(f"unknown scenario key(s): {sorted(unknown)}")
        for key in ("monthly_demands", "warehouse_options", "order_gen"):
            if key not in data:
                raise ScenarioError(f"scenario needs '{key}'")
        return cls(
            monthly_demands=tuple(data["monthly_demands"]),
            warehouse_options=tuple(WarehouseOption.parse(w) for w in data["warehouse_options"]),
            order_gen=OrderGen.from_dict(data["order_gen"]),
            seed=int(data.get("seed", 0)),
            method=str(data.get("method", "local")),
            budget=int(data.get("budget", LOCAL_SEARCH_BUDGET)),
        )


# --------------------------------------------------------------------------- #
# Segmentation
# --------------------------------------------------------------------------- #


def _whole_kg(raw: np.ndarray, total: int) -> list[int]:
    """Largest-remainder rounding of *raw* to integers summing to *total*."""
    floors = np.floor(raw).astype(np.int64)
    short = int(total - floors.sum())
    # stable sort: equal remainders favour the lower index
    order = np.argsort(-(raw - floors), kind="stable")
    for k in order[:short]:
        floors[k] += 1
    return [int(v) for v in floors]


def _due_days(gen: OrderGen, rng: np.random.Generator) -> list[int]:
    if gen.due == DUE_EVEN:
        return [math.ceil(k * gen.working_days / gen.count) for k in range(1, gen.count + 1)]
    days = rng.choice(np.arange(1, gen.working_days + 1), size=gen.count, replace=False)
    return sorted(int(d) for d in days)


def month_rng(seed: int, month_demand: float) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(round(month_demand))]))


def segment_demand(month_demand: float, order_gen: OrderGen, seed: int) -> list[Order]:
    """Cut *month_demand* kg into ``order_gen.count`` orders, ids in due-date order.

    Examples
    --------
    >>> [o.quantity for o in segment_demand(400_000.0, OrderGen(count=4), seed=0)]
    [100000.0, 100000.0, 100000.0, 100000.0]
    """
    if not (math.isfinite(month_demand) and month_demand > 0):
        raise ScenarioError(f"month demand must be > 0, got {month_demand}")
    if seed < 0:
        raise ScenarioError(f"seed must be >= 0, got {seed}")
    rng = month_rng(seed, month_demand)
    total = int(round(month_demand))
    if order_gen.split == SPLIT_EQUAL:
        weights = np.full(order_gen.count, 1.0 / order_gen.count)
    else:
        weights = rng.dirichlet(np.full(order_gen.count, order_gen.concentration))
    quantities = _whole_kg(weights * total, total)
    if min(quantities) < 1:
        raise ScenarioError(
            f"demand {month_demand} kg is too small for {order_gen.count} orders of at least 1 kg"
        )
    due = _due_days(order_gen, rng)
    return [
        Order(id=k, quantity=float(qty), due_days=float(d))
        for k, (qty, d) in enumerate(zip(quantities, due), 1)
    ]


# --------------------------------------------------------------------------- #
# Warehouse sweep
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class SweepCell:
    month: int
    capacity: str
    A_kg: float
    demand_kg: float
    unserved: int | None
    Z_kg: float | None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class SweepTable:
    cells: tuple[SweepCell, ...] = field(default=())

    def to_frame(self) -> pd.DataFrame:
        """Long table with columns ``month, A_kg, demand_kg, unserved, Z_kg, status``."""
        return pd.DataFrame(
            {
                "month": [c.month for c in self.cells],
                "A_kg": [c.A_kg for c in self.cells],
                "demand_kg": [c.demand_kg for c in self.cells],
                "unserved": pd.array([c.unserved for c in self.cells], dtype="Int64"),
                "Z_kg": [c.Z_kg for c in self.cells],
                "status": ["failed" if c.failed else "ok" for c in self.cells],
            }
        )

    def unserved_grid(self) -> pd.DataFrame:
        """Month × capacity table of unserved order counts."""
        frame = pd.DataFrame(
            {
                "month": [c.month for c in self.cells],
                "capacity": [c.capacity for c in self.cells],
                "unserved": pd.array([c.unserved for c in self.cells], dtype="Int64"),
            }
        )
        labels = list(dict.fromkeys(c.capacity for c in self.cells))
        return frame.pivot(index="month", columns="capacity", values="unserved")[labels]


def _solve_month(
    orders: Sequence[Order],
    plant: PlantConfig,
    spec: ScenarioSpec,
    warm: Mapping[int, int | None] | None,
) -> SolveResult:
    return solve(spec.method, orders, plant, seed=spec.seed, budget=spec.budget, warm_start=warm)


def warehouse_sweep(spec: ScenarioSpec, plant: PlantConfig) -> SweepTable:
    """Solve every (month, capacity) cell; rows ordered by month then ascending ``A``.

    A cell whose solver fails is kept, marked with the error message; the
    next capacity then starts without a warm start.
    """
    options = sorted(
        ((opt, opt.to_kg(plant)) for opt in spec.warehouse_options), key=lambda pair: pair[1]
    )
    cells: list[SweepCell] = []
    for month, demand in enumerate(spec.monthly_demands, 1):
        orders = segment_demand(demand, spec.order_gen, spec.seed)
        warm: Mapping[int, int | None] | None = None
        for opt, capacity in options:
            try:
                res = _solve_month(orders, plant.with_capacity(capacity), spec, warm)
            except MillrunError as exc:
                logger.warning("month %d, A=%s: %s", month, opt.label, exc)
                cells.append(SweepCell(month, opt.label, capacity, demand, None, None, str(exc)))
                warm = None
                continue
            warm = res.machine_of()
            cells.append(
                SweepCell(month, opt.label, capacity, demand, len(res.unserved), res.Z)
            )
    return SweepTable(tuple(cells))


# --------------------------------------------------------------------------- #
# Critical demand and risk
# --------------------------------------------------------------------------- #


def critical_demand(
    plant: PlantConfig,
    capacity_kg: float,
    order_gen: OrderGen,
    seed: int,
    *,
    method: str = "local",
    budget: int = LOCAL_SEARCH_BUDGET,
    bracket: tuple[float, float] = CRITICAL_BRACKET,
    tol: float = CRITICAL_TOLERANCE,
) -> float:
    """Smallest monthly demand (kg, within *tol*) leaving at least one order unserved.

    Bisection over ``[lo, hi]``: the lower end must be fully served and the
    upper end must not be.  A few interior demands check that the unserved
    indicator is monotone in demand; a violation is logged, not raised.

    Raises
    ------
    ScenarioError
        ``"no critical point in range"`` when the bracket ends agree.
    """
    lo, hi = bracket
    if not (0 < lo < hi):
        raise ScenarioError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    if not tol > 0:
        raise ScenarioError(f"tolerance must be > 0, got {tol}")
    target = plant.with_capacity(capacity_kg)
    seen: dict[float, bool] = {}

    def short(demand: float) -> bool:
        orders = segment_demand(demand, order_gen, seed)
        res = solve(method, orders, target, seed=seed, budget=budget)
        seen[demand] = bool(res.unserved)
        return seen[demand]

    if short(lo) or not short(hi):
        raise ScenarioError(f"no critical point in range [{lo:g}, {hi:g}] kg")

    for k in range(1, _MONOTONE_CHECKS + 1):
        short(lo + (hi - lo) * k / (_MONOTONE_CHECKS + 1))

    for _ in range(_MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if short(mid):
            hi = mid
        else:
            lo = mid

    flags = [seen[d] for d in sorted(seen)]
    if any(a and not b for a, b in zip(flags, flags[1:])):
        logger.warning(
            "unserved orders are not monotone in demand at A=%s kg; critical demand %.0f kg "
            "is one of several crossings",
            capacity_kg,
            hi,
        )
    logger.info("critical demand at A=%s kg: %.0f kg", capacity_kg, hi)
    return hi


def service_risk(fit: NormalFit, critical: float) -> float:
    """Probability that monthly demand exceeds *critical*."""
    return tail_probability(fit, critical)


def shelving_summary(
    fit: NormalFit, capacities_kg: Sequence[float], criticals_kg: Sequence[float]
) -> dict[str, Any]:
    """Space gained between capacities and the service risk at each one.

    Capacities are reported in ascending order; ``space_increase`` is the
    relative growth from the smallest to the largest.
    """
    if len(capacities_kg) != len(criticals_kg) or not capacities_kg:
        raise ScenarioError("need one critical demand per capacity (at least one)")
    rows = sorted(zip(capacities_kg, criticals_kg))
    smallest, largest = rows[0][0], rows[-1][0]
    return {
        "space_increase": (largest / smallest - 1.0) if math.isfinite(largest) else None,
        "capacities": [
            {"A_kg": a, "critical_kg": c, "risk": service_risk(fit, c)} for a, c in rows
        ],
    }
