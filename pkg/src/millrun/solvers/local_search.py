"""
Iterated local search over order-to-machine choices.

Elementary moves change the choice of one order: move it to another machine,
unserve it, or serve an unserved order.  A step applies one elementary move or
a chain of two on different orders, visiting the neighbourhood in a seeded
random order and taking the first candidate that strictly improves
``(Z, −unserved)`` and is feasible.  At a local optimum a seeded kick
reassigns a couple of orders at random and the descent restarts from there;
the best assignment seen is kept.

Budget
~~~~~~
``budget`` counts full feasibility checks.  Candidates that cannot improve
the key are discarded before any check, so the budget is spent on real
contenders only.

Determinism
~~~~~~~~~~~
All randomness flows through one ``random.Random(seed)``; a fixed seed gives
an identical result.
"""

from __future__ import annotations

import itertools
import logging
import random
from collections.abc import Iterator, Mapping, Sequence

from ..constants import LOCAL_SEARCH_BUDGET, LOCAL_SEARCH_KICKS
from ..errors import SolverError
from ..plant import Order, PlantConfig
from ..schedule_model import Assignment
from ._partial import Choice, replay, resequence, score
from .greedy import greedy_choices
from .result import METHOD_LOCAL_SEARCH, SolveResult, build_result

logger = logging.getLogger(__name__)

_KICK_SIZE: int = 2

Move = tuple[int, Choice]


class _Search:
    def __init__(
        self, seq: Sequence[Order], plant: PlantConfig, rng: random.Random, budget: int
    ) -> None:
        self.seq = seq
        self.plant = plant
        self.q = [o.quantity for o in seq]
        self.options: tuple[Choice, ...] = (None, *range(plant.n_machines))
        self.rng = rng
        self.budget = budget
        self.evaluations = 0

    @property
    def exhausted(self) -> bool:
        return self.evaluations >= self.budget

    def feasible(self, choices: Sequence[Choice]) -> bool:
        self.evaluations += 1
        return replay(self.seq, self.plant, choices)

    def _moves(self, choices: Sequence[Choice]) -> list[Move]:
        return [(i, v) for i, cur in enumerate(choices) for v in self.options if v != cur]

    def _neighbours(self, choices: list[Choice]) -> Iterator[list[Choice]]:
        singles = self._moves(choices)
        self.rng.shuffle(singles)
        for i, v in singles:
            cand = list(choices)
            cand[i] = v
            yield cand
        pairs = [(a, b) for a, b in itertools.combinations(singles, 2) if a[0] != b[0]]
        self.rng.shuffle(pairs)
        for (i, v), (k, w) in pairs:
            cand = list(choices)
            cand[i], cand[k] = v, w
            yield cand

    def descend(self, choices: list[Choice]) -> list[Choice]:
        key = score(self.q, choices)
        while not self.exhausted:
            for cand in self._neighbours(choices):
                if self.exhausted:
                    return choices
                cand_key = score(self.q, cand)
                if cand_key > key and self.feasible(cand):
                    choices, key = cand, cand_key
                    break
            else:
                return choices
        return choices

    def kick(self, choices: list[Choice]) -> list[Choice]:
        cand = list(choices)
        for i in self.rng.sample(range(len(cand)), min(_KICK_SIZE, len(cand))):
            cand[i] = self.rng.choice([v for v in self.options if v != cand[i]])
        return cand


def _warm_choices(
    original_ids: Sequence[int], plant: PlantConfig, warm: Mapping[int, int | None]
) -> list[Choice]:
    unknown = sorted(set(warm) - set(original_ids))
    if unknown:
        raise SolverError(f"warm start names unknown order id(s) {unknown}")
    index = {m.id: j for j, m in enumerate(plant.machines)}
    choices: list[Choice] = []
    for oid in original_ids:
        machine = warm.get(oid)
        if machine is not None and machine not in index:
            raise SolverError(f"warm start puts order {oid} on unknown machine {machine}")
        choices.append(None if machine is None else index[machine])
    return choices


def solve_local_search(
    orders: Sequence[Order],
    plant: PlantConfig,
    seed: int = 0,
    budget: int = LOCAL_SEARCH_BUDGET,
    *,
    kicks: int = LOCAL_SEARCH_KICKS,
    warm_start: Mapping[int, int | None] | None = None,
) -> SolveResult:
    """Improve on the greedy schedule (or a better *warm_start*) by local search.

    Parameters
    ----------
    orders, plant:
        The instance.
    seed:
        Seed of the neighbourhood order and of the kicks.
    budget:
        Maximum number of feasibility checks (> 0).
    kicks:
        Perturbation restarts after the first local optimum.
    warm_start:
        Optional input order id → machine id map, as returned by
        :meth:`SolveResult.machine_of`; orders it omits start unserved.  Used
        as the starting point when feasible and better than greedy.

    Raises
    ------
    SolverError
        If ``budget <= 0``, ``kicks < 0`` or the warm start names an unknown
        order or machine.
    """
    if budget <= 0:
        raise SolverError(f"budget must be > 0, got {budget}")
    if kicks < 0:
        raise SolverError(f"kicks must be >= 0, got {kicks}")
    seq, original_ids = resequence(orders)
    search = _Search(seq, plant, random.Random(seed), budget)

    current = greedy_choices(seq, plant)
    if warm_start is not None:
        warm = _warm_choices(original_ids, plant, warm_start)
        if not search.feasible(warm):
            logger.warning("warm start is infeasible for this plant; starting from greedy")
        elif score(search.q, warm) > score(search.q, current):
            current = warm

    best = search.descend(current)
    best_key = score(search.q, best)
    for _ in range(kicks):
        if search.exhausted or not seq:
            break
        cand = search.kick(best)
        if not search.feasible(cand):
            continue
        cand = search.descend(cand)
        cand_key = score(search.q, cand)
        if cand_key > best_key:
            best, best_key = cand, cand_key

    logger.info(
        "local search: seed=%d, %d evaluations, Z=%s, unserved=%d",
        seed,
        search.evaluations,
        best_key[0],
        -best_key[1],
    )
    x = Assignment.from_choices(best, plant.n_machines)
    return build_result(
        METHOD_LOCAL_SEARCH,
        seq,
        original_ids,
        plant,
        x,
        seed=seed,
        iterations=search.evaluations,
    )
