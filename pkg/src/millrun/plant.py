"""
Physical data model of the plant: machines, customer orders, plant settings.

Rate and time formulas
~~~~~~~~~~~~~~~~~~~~~~
A machine with nominal rate ``t`` (kg/h), efficiency ``e`` and scrap fraction
``m`` produces saleable product at the net rate

    τ = t · e · (1 − m)

and an order of ``Q`` kg occupies it for ``s + Q/τ`` hours, ``s`` being the
startup (die swap, cleaning, heat and humidity stabilisation).

Units
~~~~~
All internal times are hours.  Due dates are given in working days and are
converted exactly once, as ``h · E``, where ``h`` is the plant's net hours per
working day.

Fail-closed
~~~~~~~~~~~
Every type validates itself at construction and raises ``PlantError``.  The
formulas below therefore never re-check their inputs.

Examples::

    >>> from millrun.plant import Machine, Order, net_rate, processing_time
    >>> mach = Machine(id=1, t=100.0, e=0.9, m=0.05, s=12.0)
    >>> round(net_rate(mach), 6)
    85.5
    >>> round(processing_time(Order(id=1, quantity=855.0, due_days=3.0), mach), 6)
    22.0
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace

from .constants import LOSS_FORMULAS, LOSS_PRINTED, MONTHLY_HOURS, SLACK_EPSILON, TIE_INTERACTS
from .errors import PlantError

# --------------------------------------------------------------------------- #
# Domain types
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Machine:
    """A production line.

    Parameters
    ----------
    id:
        Small integer identifier.
    t:
        Nominal rate in kg/hour (> 0).
    e:
        Efficiency, fraction in (0, 1].
    m:
        Scrap fraction in [0, 1).
    s:
        Startup time in hours (finite, ≥ 0).
    """

    id: int
    t: float
    e: float
    m: float
    s: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and self.t > 0):
            raise PlantError(f"machine {self.id}: nominal rate t must be > 0, got {self.t}")
        if not (0.0 < self.e <= 1.0):
            raise PlantError(f"machine {self.id}: efficiency e must be in (0, 1], got {self.e}")
        if not (0.0 <= self.m < 1.0):
            raise PlantError(f"machine {self.id}: scrap m must be in [0, 1), got {self.m}")
        if not (math.isfinite(self.s) and self.s >= 0):
            raise PlantError(f"machine {self.id}: startup s must be finite and >= 0, got {self.s}")

    @property
    def net_rate(self) -> float:
        return net_rate(self)


@dataclass(frozen=True)
class Order:
    """A customer order (pedido): ``quantity`` kg due ``due_days`` working days out."""

    id: int
    quantity: float
    due_days: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.quantity) and self.quantity > 0):
            raise PlantError(f"order {self.id}: quantity must be > 0, got {self.quantity}")
        if not (math.isfinite(self.due_days) and self.due_days > 0):
            raise PlantError(f"order {self.id}: due date must be > 0 days, got {self.due_days}")

    def due_hours(self, hours_per_day: float) -> float:
        return hours_per_day * self.due_days


@dataclass(frozen=True)
class PlantConfig:
    """Machines plus the plant-wide settings the scheduling model needs.

    ``warehouse_capacity_kg`` is the finished-goods bound ``A``; use
    :meth:`from_pallets` when capacity is known in pallets.  ``math.inf`` is
    accepted and disables the warehouse bound in practice.
    """

    machines: tuple[Machine, ...]
    hours_per_day: float
    warehouse_capacity_kg: float
    pallet_kg: float | None = None
    monthly_hours: float = MONTHLY_HOURS
    slack_epsilon: float = SLACK_EPSILON
    loss_formula: str = LOSS_PRINTED
    tie_interacts: bool = TIE_INTERACTS
    enforce_warehouse: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "machines", tuple(self.machines))
        if len(self.machines) < 1:
            raise PlantError("plant needs at least one machine")
        ids = tuple(mach.id for mach in self.machines)
        if len(set(ids)) != len(ids):
            raise PlantError(f"machine ids must be unique, got {list(ids)}")
        if not (math.isfinite(self.hours_per_day) and self.hours_per_day > 0):
            raise PlantError(f"hours_per_day must be > 0, got {self.hours_per_day}")
        if not self.warehouse_capacity_kg > 0:
            raise PlantError(f"warehouse capacity must be > 0 kg, got {self.warehouse_capacity_kg}")
        if self.pallet_kg is not None and not (
            math.isfinite(self.pallet_kg) and self.pallet_kg > 0
        ):
            raise PlantError(f"pallet_kg must be > 0, got {self.pallet_kg}")
        if not (math.isfinite(self.monthly_hours) and self.monthly_hours > 0):
            raise PlantError(f"monthly_hours must be > 0, got {self.monthly_hours}")
        if not self.slack_epsilon >= 0:
            raise PlantError(f"slack_epsilon must be >= 0, got {self.slack_epsilon}")
        if self.loss_formula not in LOSS_FORMULAS:
            raise PlantError(
                f"loss_formula must be one of {list(LOSS_FORMULAS)}, got {self.loss_formula!r}"
            )

    @classmethod
    def from_pallets(
        cls,
        machines: Sequence[Machine],
        hours_per_day: float,
        pallets: float,
        pallet_kg: float,
        **settings,
    ) -> PlantConfig:
        """Build a plant whose warehouse capacity is ``pallets × pallet_kg``."""
        if not pallets > 0:
            raise PlantError(f"pallet count must be > 0, got {pallets}")
        if not pallet_kg > 0:
            raise PlantError(f"pallet_kg must be > 0, got {pallet_kg}")
        return cls(
            machines=tuple(machines),
            hours_per_day=hours_per_day,
            warehouse_capacity_kg=pallets * pallet_kg,
            pallet_kg=pallet_kg,
            **settings,
        )

    def with_capacity(self, capacity_kg: float) -> PlantConfig:
        return replace(self, warehouse_capacity_kg=capacity_kg)

    def pallets_to_kg(self, pallets: float) -> float:
        if self.pallet_kg is None:
            raise PlantError("capacity given in pallets but the plant has no pallet_kg")
        return pallets * self.pallet_kg

    @property
    def n_machines(self) -> int:
        return len(self.machines)

    @property
    def working_days(self) -> float:
        """Working days per planning month (``monthly_hours / hours_per_day``)."""
        return self.monthly_hours / self.hours_per_day

    @property
    def net_rates(self) -> tuple[float, ...]:
        return tuple(net_rate(mach) for mach in self.machines)

    @property
    def startups(self) -> tuple[float, ...]:
        return tuple(mach.s for mach in self.machines)


# --------------------------------------------------------------------------- #
# Formulas
# --------------------------------------------------------------------------- #


def net_rate(machine: Machine) -> float:
    """Return ``t · e · (1 − m)`` in kg/hour; strictly positive by construction.

    Examples
    --------
    >>> net_rate(Machine(id=1, t=50.0, e=0.5, m=0.5, s=0.0))
    12.5
    """
    return machine.t * machine.e * (1.0 - machine.m)


def processing_time(order: Order, machine: Machine) -> float:
    """Hours an order occupies a machine: ``s + Q/τ`` (always > ``s``)."""
    return machine.s + order.quantity / net_rate(machine)


def validate_orders(orders: Sequence[Order]) -> None:
    """Reject order lists whose ids are not exactly ``1..n`` in list order."""
    ids = [o.id for o in orders]
    expected = list(range(1, len(orders) + 1))
    if ids != expected:
        raise PlantError(f"order ids must be contiguous from 1 in sequence order, got {ids}")
