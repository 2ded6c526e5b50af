"""
Nominal, lost and available plant capacity as a function of monthly startups.

    C_N      = monthly_hours · Σ τ_j
    ΔC(n)    = n · (1/m) · (Σ τ_j) · (Σ s_j)          loss_formula = "printed"
    ΔC(n)    = n · (Σ τ_j / m) · (Σ s_j / m)          loss_formula = "prose"
    avail(n) = C_N − ΔC(n)

``m`` is the machine count.  The printed form applies ``1/m`` once; the prose
form multiplies the average net rate by the average startup, so it is exactly
``1/m`` times the printed value.  Both are always reported so the difference
stays visible.

What these do NOT mean
~~~~~~~~~~~~~~~~~~~~~~
``avail(n)`` is a monthly aggregate.  It says nothing about whether the
orders of a given month can be sequenced before their due dates or stored in
the warehouse; that question belongs to :mod:`millrun.schedule_model`.

Examples::

    >>> from millrun.plant import Machine, PlantConfig
    >>> from millrun.capacity import capacity_loss, nominal_capacity
    >>> plant = PlantConfig(
    ...     machines=[Machine(id=j, t=100.0, e=1.0, m=0.0, s=12.0) for j in range(1, 5)],
    ...     hours_per_day=8.0,
    ...     warehouse_capacity_kg=1e6,
    ... )
    >>> nominal_capacity(plant)
    70400.0
    >>> capacity_loss(plant, 1)
    4800.0
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

import pandas as pd

from .constants import LOSS_FORMULAS, LOSS_PRINTED, LOSS_PROSE
from .demand import DemandSeries
from .errors import CapacityError
from .plant import PlantConfig


@dataclass(frozen=True)
class CapacityProfile:
    """Affine capacity line ``available(n) = nominal_kg − n · loss_per_start``."""

    nominal_kg: float
    loss_per_start: float

    def __post_init__(self) -> None:
        if not self.loss_per_start >= 0:
            raise CapacityError(f"loss per start must be >= 0, got {self.loss_per_start}")

    def loss(self, n: float) -> float:
        if n < 0:
            raise CapacityError(f"startup count must be >= 0, got {n}")
        return n * self.loss_per_start

    def available(self, n: float) -> float:
        return self.nominal_kg - self.loss(n)

    def max_starts(self, required_kg: float) -> float:
        """Largest ``n`` with ``available(n) >= required_kg`` (``inf`` without loss).

        Negative when even ``n = 0`` falls short.
        """
        if self.loss_per_start == 0:
            return math.inf if self.nominal_kg >= required_kg else -math.inf
        return (self.nominal_kg - required_kg) / self.loss_per_start


def nominal_capacity(plant: PlantConfig) -> float:
    """``monthly_hours × Σ τ_j`` in kg/month."""
    return plant.monthly_hours * math.fsum(plant.net_rates)


def loss_per_start(plant: PlantConfig, formula: str | None = None) -> float:
    formula = formula or plant.loss_formula
    rates = math.fsum(plant.net_rates)
    startups = math.fsum(plant.startups)
    m = plant.n_machines
    if formula == LOSS_PRINTED:
        return rates * startups / m
    if formula == LOSS_PROSE:
        return (rates / m) * (startups / m)
    raise CapacityError(f"loss formula must be one of {list(LOSS_FORMULAS)}, got {formula!r}")


def capacity_loss(plant: PlantConfig, n: float, formula: str | None = None) -> float:
    """Capacity lost to ``n`` startups in a month, kg.

    ``formula`` overrides ``plant.loss_formula`` (``"printed"`` or ``"prose"``).

    Raises
    ------
    CapacityError
        If ``n < 0`` or the formula name is unknown.
    """
    if n < 0:
        raise CapacityError(f"startup count must be >= 0, got {n}")
    return n * loss_per_start(plant, formula)


def capacity_profile(plant: PlantConfig, formula: str | None = None) -> CapacityProfile:
    return CapacityProfile(
        nominal_kg=nominal_capacity(plant), loss_per_start=loss_per_start(plant, formula)
    )


# --------------------------------------------------------------------------- #
# Report
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class CapacityReport:
    """Capacity line against the worst month of demand.

    ``table`` has one row per startup count (columns ``n``, ``available_kg``,
    ``required_max_kg``, ``starts_per_day``, ``sufficient``); ``periods`` holds
    the used (sales) and required (demand) kg of every period.
    """

    profile: CapacityProfile
    loss_printed_kg: float
    loss_prose_kg: float
    required_max_kg: float
    table: pd.DataFrame
    periods: pd.DataFrame
    verdict: str

    def summary(self) -> dict[str, Any]:
        return {
            "nominal_kg": self.profile.nominal_kg,
            "loss_per_start_kg": self.profile.loss_per_start,
            "loss_printed_kg": self.loss_printed_kg,
            "loss_prose_kg": self.loss_prose_kg,
            "required_max_kg": self.required_max_kg,
            "max_starts": self.profile.max_starts(self.required_max_kg),
            "verdict": self.verdict,
        }


def capacity_report(
    plant: PlantConfig, demand_series: DemandSeries, n_range: Iterable[int]
) -> CapacityReport:
    """Available capacity for every ``n`` in *n_range* versus peak monthly demand.

    The verdict names the first startup count in the range at which capacity
    no longer covers the peak month, or the largest count if it always does.
    """
    counts = sorted({int(n) for n in n_range})
    if not counts:
        raise CapacityError("n_range must contain at least one startup count")
    if counts[0] < 0:
        raise CapacityError(f"startup count must be >= 0, got {counts[0]}")

    profile = capacity_profile(plant)
    required = max(demand_series.demand)
    available = [profile.available(n) for n in counts]
    table = pd.DataFrame(
        {
            "n": counts,
            "available_kg": available,
            "required_max_kg": [required] * len(counts),
            "starts_per_day": [n / plant.working_days for n in counts],
            "sufficient": [a >= required for a in available],
        }
    )

    short = [n for n, a in zip(counts, available) if a < required]
    if short:
        verdict = f"capacity insufficient at n={short[0]}"
    else:
        verdict = f"capacity sufficient at {counts[-1]} starts/month"

    periods = pd.DataFrame(
        {
            "period": range(1, len(demand_series) + 1),
            "used_kg": list(demand_series.sales) if demand_series.sales is not None else None,
            "required_kg": list(demand_series.demand),
        }
    )
    return CapacityReport(
        profile=profile,
        loss_printed_kg=loss_per_start(plant, LOSS_PRINTED),
        loss_prose_kg=loss_per_start(plant, LOSS_PROSE),
        required_max_kg=required,
        table=table,
        periods=periods,
        verdict=verdict,
    )
