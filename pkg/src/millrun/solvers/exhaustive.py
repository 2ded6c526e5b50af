"""
Exhaustive oracle over all ``(m + 1)^n`` assignments.

Every order is either unserved or placed on one of the ``m`` machines.  The
search is a depth-first walk in lexicographic order of the flattened ``x``
(unserved first, then machine ``m`` down to machine ``1``), so the first
assignment reaching the best ``(Z, −unserved)`` key is also the
lexicographically smallest one.  Subtrees are cut when

* the newly decided order is late or overflows the warehouse (a decided prefix
  can only get worse), or
* serving every remaining order could not strictly beat the incumbent.

The answer is the true optimum of the model; pruning only skips subtrees that
cannot contain a strictly better assignment.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

from ..constants import EXHAUSTIVE_LIMIT
from ..errors import SolverError
from ..plant import Order, PlantConfig, validate_orders
from ..schedule_model import Assignment
from ._partial import Choice, PartialSchedule, resequence, score
from .result import METHOD_ORACLE, SolveResult, build_result

logger = logging.getLogger(__name__)


def search_space(n_orders: int, n_machines: int) -> int:
    return (n_machines + 1) ** n_orders


def solve_exhaustive(
    orders: Sequence[Order], plant: PlantConfig, limit: int = EXHAUSTIVE_LIMIT
) -> SolveResult:
    """Optimal assignment maximising ``Z``, then fewest unserved orders.

    Raises
    ------
    SolverError
        When ``(m + 1)^n`` exceeds *limit*; use the greedy or local-search
        solver for such instances.
    """
    size = search_space(len(orders), plant.n_machines)
    if size > limit:
        raise SolverError(
            f"search space (m+1)^n = {size} exceeds limit {limit}; "
            "use the greedy or local_search method"
        )
    seq, original_ids = resequence(orders)
    validate_orders(seq)

    n, m = len(seq), plant.n_machines
    state = PartialSchedule(seq, plant)
    q = state.q
    remaining = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        remaining[i] = remaining[i + 1] + q[i]

    branch: tuple[Choice, ...] = (None, *range(m - 1, -1, -1))
    best_choices: list[Choice] = [None] * n
    best_key = score(q, best_choices)
    current: list[Choice] = [None] * n
    nodes = 0

    def walk(i: int, served_kg: float, unserved: int) -> None:
        nonlocal best_choices, best_key, nodes
        nodes += 1
        if i == n:
            key = score(q, current)
            if key > best_key:
                best_key, best_choices = key, list(current)
            return
        if (served_kg + remaining[i], -unserved) <= best_key:
            return
        for j in branch:
            if not state.push(j):
                continue
            current[i] = j
            if j is None:
                walk(i + 1, served_kg, unserved + 1)
            else:
                walk(i + 1, served_kg + q[i], unserved)
            current[i] = None
            state.pop()

    walk(0, 0.0, 0)
    logger.info("oracle: %d orders, %d machines, %d nodes, Z=%s", n, m, nodes, best_key[0])
    x = Assignment.from_choices(best_choices, m)
    return build_result(METHOD_ORACLE, seq, original_ids, plant, x, iterations=nodes)
