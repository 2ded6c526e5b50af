"""Incremental schedule state shared by the solvers.

Orders are decided strictly in sequence.  Because machine clocks are local and
later orders never move earlier finish times, a decided prefix that satisfies
the due-time and warehouse constraints stays feasible under every completion;
occupancy of a decided order only grows as further orders join it.

The arithmetic mirrors :func:`millrun.schedule_model.evaluate` operation for
operation so the verdicts agree.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from ..errors import SolverError
from ..plant import Order, PlantConfig

Choice = int | None


def resequence(orders: Sequence[Order]) -> tuple[list[Order], tuple[int, ...]]:
    """Sort by ``(due_days, id)`` and relabel ``1..n``; return the original ids."""
    ids = [o.id for o in orders]
    if len(set(ids)) != len(ids):
        raise SolverError(f"order ids must be unique, got {ids}")
    ranked = sorted(orders, key=lambda o: (o.due_days, o.id))
    relabelled = [
        Order(id=k, quantity=o.quantity, due_days=o.due_days) for k, o in enumerate(ranked, 1)
    ]
    return relabelled, tuple(o.id for o in ranked)


class PartialSchedule:
    """Decide orders ``0, 1, …`` one at a time with undo."""

    def __init__(self, orders: Sequence[Order], plant: PlantConfig) -> None:
        self.q = [o.quantity for o in orders]
        self.due = [o.due_hours(plant.hours_per_day) for o in orders]
        self.tau = list(plant.net_rates)
        self.s = list(plant.startups)
        self.eps = plant.slack_epsilon
        self.tie = plant.tie_interacts
        self.cap = plant.warehouse_capacity_kg if plant.enforce_warehouse else math.inf
        self.clock = [0.0] * plant.n_machines
        self.L = [0.0] * len(orders)
        self.occ = [0.0] * len(orders)
        self.choice: list[Choice] = [None] * len(orders)
        self._undo: list[tuple[Choice, float, list[int], list[float]]] = []

    @property
    def depth(self) -> int:
        return len(self._undo)

    @property
    def n_orders(self) -> int:
        return len(self.q)

    def _before(self, a: float, b: float) -> bool:
        return a + self.eps <= b

    def _interacts(self, i: int, k: int) -> bool:
        li, lk, ei, ek = self.L[i], self.L[k], self.due[i], self.due[k]
        if (self._before(li, lk) and self._before(lk, ei)) or (
            self._before(lk, li) and self._before(li, ek)
        ):
            return True
        return (
            self.tie
            and abs(li - lk) < self.eps
            and self._before(lk, ei)
            and self._before(li, ek)
        )

    def _check(self, j: int) -> tuple[float, list[int]] | None:
        i = self.depth
        finish = self.clock[j] + (self.s[j] + self.q[i] / self.tau[j])
        if self.due[i] - finish < self.eps:
            return None
        saved, self.L[i] = self.L[i], finish
        partners = [k for k in range(i) if self.choice[k] is not None and self._interacts(i, k)]
        self.L[i] = saved
        qi = self.q[i]
        if qi + math.fsum(self.q[k] for k in partners) > self.cap:
            return None
        if any(self.occ[k] + qi > self.cap for k in partners):
            return None
        return finish, partners

    def finish_on(self, j: int) -> float | None:
        """Finish time of the next order on machine *j*, or ``None`` if infeasible."""
        hit = self._check(j)
        return None if hit is None else hit[0]

    def push(self, j: Choice) -> bool:
        """Decide the next order; ``False`` (state unchanged) when infeasible."""
        i = self.depth
        if i >= self.n_orders:
            raise SolverError("every order is already decided")
        if j is None:
            self._undo.append((None, 0.0, [], []))
            return True
        hit = self._check(j)
        if hit is None:
            return False
        finish, partners = hit
        self._undo.append((j, self.clock[j], partners, [self.occ[k] for k in partners]))
        self.clock[j] = finish
        self.L[i] = finish
        self.choice[i] = j
        self.occ[i] = self.q[i] + math.fsum(self.q[k] for k in partners)
        for k in partners:
            self.occ[k] += self.q[i]
        return True

    def pop(self) -> None:
        j, clock, partners, before = self._undo.pop()
        i = self.depth
        if j is None:
            return
        self.clock[j] = clock
        self.L[i] = 0.0
        self.choice[i] = None
        self.occ[i] = 0.0
        for k, occ in zip(partners, before):
            self.occ[k] = occ


def replay(orders: Sequence[Order], plant: PlantConfig, choices: Sequence[Choice]) -> bool:
    """Feasibility of a full choice vector, decided in sequence."""
    state = PartialSchedule(orders, plant)
    return all(state.push(j) for j in choices)


def score(quantities: Sequence[float], choices: Sequence[Choice]) -> tuple[float, int]:
    """Ranking key to maximise: ``(Z, −unserved)``."""
    served = [q for q, j in zip(quantities, choices) if j is not None]
    return math.fsum(served), len(served) - len(quantities)
