"""
Exact evaluator of the order-to-machine assignment model.

Given orders ``1..n`` (processed in id order), machines ``1..m`` and a binary
matrix ``x`` (``x[i, j] = 1`` iff order ``i`` runs on machine ``j``):

    T[i, j] = x[i, j] · (s_j + Q_i / τ_j)           processing hours
    Tp[i]   = Σ_j T[i, j]
    F[i, j] = F[i−1, j] + T[i, j],  F[−1, j] = 0     machine-local clock
    L[i]    = Σ_j x[i, j] · F[i, j]                  finish time
    H[i]    = h · E_i − L[i]                         slack
    λ[i, k] = 1 iff residency [L, h·E) of i and k overlap (assigned orders only)
    O[i]    = (Σ_j x[i, j]) · (Σ_k λ[i, k] Q_k + Q_i)
    Z       = Σ_i Q_i Σ_j x[i, j]

Constraints
~~~~~~~~~~~
``double_assignment``  (``eq1``)  every row of ``x`` sums to at most 1
``late``               (``eq5``)  ``H[i] >= slack_epsilon`` for every assigned order
``warehouse_overflow`` (``eq7``)  ``O[i] <= A`` for every order (only when ``plant.enforce_warehouse``)

The short code in brackets is what serialized verdicts carry as ``code``.

Strict inequalities are realised as ``a + ε <= b`` with ``ε =
plant.slack_epsilon``.  An order finishing exactly at its due time is late.

Fail-closed
~~~~~~~~~~~
Shape mismatches and non-binary matrices raise ``ScheduleError``.  A matrix
that breaks a constraint is *not* an error: it evaluates to a verdict listing
every violated constraint and order id.

What this does NOT mean
~~~~~~~~~~~~~~~~~~~~~~~
``O`` is the pairwise-interaction bound of the model, not the true peak stock
over time; an order resident alongside two orders that never meet each other
still counts both.

Examples::

    >>> from millrun.plant import Machine, Order, PlantConfig
    >>> from millrun.schedule_model import Assignment, evaluate
    >>> plant = PlantConfig(
    ...     machines=[Machine(id=1, t=100.0, e=1.0, m=0.0, s=12.0)],
    ...     hours_per_day=8.0,
    ...     warehouse_capacity_kg=1_000.0,
    ... )
    >>> ev = evaluate([Order(id=1, quantity=100.0, due_days=2.0)], plant, Assignment.from_choices([0], 1))
    >>> ev.L.tolist(), ev.H.tolist(), ev.Z, ev.feasible
    ([13.0], [3.0], 100.0, True)
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from .constants import SLACK_EPSILON, TIE_INTERACTS
from .errors import ScheduleError
from .plant import Machine, Order, PlantConfig, net_rate, validate_orders

DOUBLE_ASSIGNMENT: str = "double_assignment"
LATE: str = "late"
WAREHOUSE_OVERFLOW: str = "warehouse_overflow"

VIOLATION_CODES: dict[str, str] = {
    DOUBLE_ASSIGNMENT: "eq1",
    LATE: "eq5",
    WAREHOUSE_OVERFLOW: "eq7",
}

# --------------------------------------------------------------------------- #
# Domain types
# --------------------------------------------------------------------------- #


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Assignment:
    """Binary ``n × m`` order-to-machine matrix (read-only).

    Machine indices in :meth:`from_choices` / :meth:`choices` are 0-based
    column positions; ``None`` marks an unserved order.
    """

    x: np.ndarray

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=np.int8, copy=True)
        if x.ndim != 2:  # noqa: PLR2004
            raise ScheduleError(f"assignment must be a 2-D matrix, got {x.ndim} dimension(s)")
        if not np.array_equal(x, np.asarray(self.x)):
            raise ScheduleError("assignment entries must be 0 or 1")
        if np.any((x != 0) & (x != 1)):
            raise ScheduleError("assignment entries must be 0 or 1")
        object.__setattr__(self, "x", _readonly(x))

    @classmethod
    def empty(cls, n_orders: int, n_machines: int) -> Assignment:
        return cls(np.zeros((n_orders, n_machines), dtype=np.int8))

    @classmethod
    def from_choices(cls, choices: Sequence[int | None], n_machines: int) -> Assignment:
        x = np.zeros((len(choices), n_machines), dtype=np.int8)
        for i, j in enumerate(choices):
            if j is None:
                continue
            if not (0 <= j < n_machines):
                raise ScheduleError(f"order {i + 1}: machine index {j} outside 0..{n_machines - 1}")
            x[i, j] = 1
        return cls(x)

    def choices(self) -> tuple[int | None, ...]:
        """Machine index per order; rejects rows assigned to several machines."""
        out: list[int | None] = []
        for i, row in enumerate(self.x):
            cols = np.flatnonzero(row)
            if cols.size > 1:
                raise ScheduleError(f"order {i + 1} is assigned to {cols.size} machines")
            out.append(int(cols[0]) if cols.size else None)
        return tuple(out)

    def with_choice(self, i: int, j: int | None) -> Assignment:
        x = self.x.copy()
        x[i, :] = 0
        if j is not None:
            x[i, j] = 1
        return Assignment(x)

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.x.shape[0]), int(self.x.shape[1]))

    @property
    def served(self) -> np.ndarray:
        return self.x.sum(axis=1) > 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Assignment):
            return NotImplemented
        return self.x.shape == other.x.shape and bool(np.array_equal(self.x, other.x))

    def __hash__(self) -> int:
        return hash((self.x.shape, self.x.tobytes()))

    def __repr__(self) -> str:
        return f"Assignment({self.x.tolist()})"


@dataclass(frozen=True)
class Violation:
    constraint: str
    order: int

    @property
    def code(self) -> str:
        return VIOLATION_CODES[self.constraint]

    def __str__(self) -> str:
        return f"{self.constraint}:{self.order}"

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "constraint": self.constraint, "order": self.order}


@dataclass(frozen=True, eq=False)
class ScheduleEvaluation:
    """Every intermediate quantity of one evaluation plus the verdict.

    Times are hours; ``O`` and ``Z`` are kg.  ``violations`` is empty iff the
    assignment is feasible.
    """

    T: np.ndarray
    Tp: np.ndarray
    F: np.ndarray
    L: np.ndarray
    H: np.ndarray
    lam: np.ndarray
    O: np.ndarray  # noqa: E741
    Z: float
    violations: tuple[Violation, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations

    def violated(self, constraint: str) -> list[int]:
        return [v.order for v in self.violations if v.constraint == constraint]

    def to_dict(self) -> dict[str, Any]:
        return {
            "T": self.T.tolist(),
            "Tp": self.Tp.tolist(),
            "F": self.F.tolist(),
            "L": self.L.tolist(),
            "H": self.H.tolist(),
            "lambda": self.lam.astype(int).tolist(),
            "O": self.O.tolist(),
            "Z": self.Z,
            "feasible": self.feasible,
            "violations": [v.to_dict() for v in self.violations],
        }


# --------------------------------------------------------------------------- #
# Pieces of the model
# --------------------------------------------------------------------------- #


def _matrix(x: Assignment | np.ndarray | Sequence[Sequence[int]]) -> np.ndarray:
    if isinstance(x, Assignment):
        return x.x
    return Assignment(np.asarray(x)).x


def _check_shape(x: np.ndarray, n_orders: int, n_machines: int) -> None:
    if x.shape != (n_orders, n_machines):
        raise ScheduleError(
            f"assignment shape {x.shape} does not match {n_orders} orders × {n_machines} machines"
        )


def _quantities(orders: Sequence[Order]) -> np.ndarray:
    return np.array([o.quantity for o in orders], dtype=float)


def processing_matrix(
    orders: Sequence[Order], machines: Sequence[Machine], x: Assignment | np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """``T[i, j] = x[i, j]·(s_j + Q_i/τ_j)`` and its row sums ``Tp``."""
    xm = _matrix(x)
    _check_shape(xm, len(orders), len(machines))
    q = _quantities(orders)
    tau = np.array([net_rate(mach) for mach in machines], dtype=float)
    s = np.array([mach.s for mach in machines], dtype=float)
    T = xm * (s[None, :] + q[:, None] / tau[None, :])
    return T, T.sum(axis=1)


def completion_times(
    orders: Sequence[Order], machines: Sequence[Machine], x: Assignment | np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Machine-local clocks ``F`` and per-order finish times ``L``.

    Orders run in id order; a machine's clock only advances for orders it
    processes.  Unserved orders get ``L = 0``.
    """
    xm = _matrix(x)
    T, _ = processing_matrix(orders, machines, xm)
    F = np.cumsum(T, axis=0)
    return F, (xm * F).sum(axis=1)


def slacks(
    orders: Sequence[Order],
    L: np.ndarray,
    hours_per_day: float,
    *,
    served: np.ndarray | None = None,
    epsilon: float = SLACK_EPSILON,
) -> tuple[np.ndarray, list[Violation]]:
    """``H = h·E − L`` and the ``late`` violations of served orders.

    ``served`` defaults to ``L > 0``.
    """
    L = np.asarray(L, dtype=float)
    due = np.array([o.due_hours(hours_per_day) for o in orders], dtype=float)
    H = due - L
    mask = L > 0 if served is None else np.asarray(served, dtype=bool)
    late = np.flatnonzero(mask & (H < epsilon))
    return H, [Violation(LATE, orders[i].id) for i in late]


def interaction_matrix(
    L: np.ndarray,
    due_hours: np.ndarray,
    *,
    served: np.ndarray | None = None,
    epsilon: float = SLACK_EPSILON,
    tie_interacts: bool = TIE_INTERACTS,
) -> np.ndarray:
    """Binary, symmetric, zero-diagonal warehouse interaction matrix.

    ``λ[i, k] = 1`` iff ``L_i < L_k < E_i`` or ``L_k < L_i < E_k`` (``E`` in
    hours).  With ``tie_interacts`` two orders finishing at the same time
    interact while both are still resident.  Only ``served`` orders (default
    ``L > 0``) participate.

    Examples
    --------
    >>> interaction_matrix(np.array([10.0, 12.0]), np.array([20.0, 30.0])).tolist()
    [[0, 1], [1, 0]]
    >>> interaction_matrix(np.array([10.0, 25.0]), np.array([20.0, 40.0])).tolist()
    [[0, 0], [0, 0]]
    """
    L = np.asarray(L, dtype=float)
    E = np.asarray(due_hours, dtype=float)
    if L.shape != E.shape:
        raise ScheduleError(f"finish times {L.shape} and due hours {E.shape} are not aligned")
    mask = L > 0 if served is None else np.asarray(served, dtype=bool)

    Li, Lk = L[:, None], L[None, :]
    Ei, Ek = E[:, None], E[None, :]

    def before(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a + epsilon <= b

    hit = (before(Li, Lk) & before(Lk, Ei)) | (before(Lk, Li) & before(Li, Ek))
    if tie_interacts:
        hit |= (np.abs(Li - Lk) < epsilon) & before(Lk, Ei) & before(Li, Ek)
    hit &= mask[:, None] & mask[None, :]
    np.fill_diagonal(hit, False)
    return hit.astype(np.int8)


def occupancy(
    orders: Sequence[Order],
    x: Assignment | np.ndarray,
    lam: np.ndarray,
    capacity_kg: float | None = None,
) -> tuple[np.ndarray, list[Violation]]:
    """``O[i] = (Σ_j x[i, j])·(Σ_k λ[i, k]·Q_k + Q_i)`` and its ``warehouse_overflow`` violations.

    No violations are reported when ``capacity_kg`` is ``None``.
    """
    xm = _matrix(x)
    q = _quantities(orders)
    O = xm.sum(axis=1) * (np.asarray(lam, dtype=float) @ q + q)  # noqa: E741
    if capacity_kg is None:
        return O, []
    return O, [Violation(WAREHOUSE_OVERFLOW, orders[i].id) for i in np.flatnonzero(O > capacity_kg)]


def objective(orders: Sequence[Order], x: Assignment | np.ndarray) -> float:
    """Kilograms produced: ``Σ_i Q_i Σ_j x[i, j]``."""
    xm = _matrix(x)
    if xm.shape[0] != len(orders):
        raise ScheduleError(f"assignment has {xm.shape[0]} rows for {len(orders)} orders")
    return float(_quantities(orders) @ xm.sum(axis=1))


# --------------------------------------------------------------------------- #
# Full evaluation
# --------------------------------------------------------------------------- #


def evaluate(
    orders: Sequence[Order], plant: PlantConfig, x: Assignment | np.ndarray
) -> ScheduleEvaluation:
    """Evaluate *x* against every constraint of the model.

    Raises
    ------
    ScheduleError
        When ``x`` is not a binary ``len(orders) × plant.n_machines`` matrix.
    """
    validate_orders(orders)
    xm = _matrix(x)
    _check_shape(xm, len(orders), plant.n_machines)

    served = xm.sum(axis=1) > 0
    violations = [Violation(DOUBLE_ASSIGNMENT, orders[i].id) for i in np.flatnonzero(xm.sum(axis=1) > 1)]

    T, Tp = processing_matrix(orders, plant.machines, xm)
    F = np.cumsum(T, axis=0)
    L = (xm * F).sum(axis=1)
    H, late = slacks(orders, L, plant.hours_per_day, served=served, epsilon=plant.slack_epsilon)
    violations += late

    due = np.array([o.due_hours(plant.hours_per_day) for o in orders], dtype=float)
    lam = interaction_matrix(
        L, due, served=served, epsilon=plant.slack_epsilon, tie_interacts=plant.tie_interacts
    )
    capacity = plant.warehouse_capacity_kg if plant.enforce_warehouse else None
    O, full = occupancy(orders, xm, lam, capacity)  # noqa: E741
    violations += full

    return ScheduleEvaluation(
        T=_readonly(T),
        Tp=_readonly(Tp),
        F=_readonly(F),
        L=_readonly(L),
        H=_readonly(H),
        lam=_readonly(lam),
        O=_readonly(O),
        Z=objective(orders, xm),
        violations=tuple(violations),
    )
