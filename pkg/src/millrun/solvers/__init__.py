"""
Assignment solvers for the warehouse-constrained scheduling model.

    oracle        exhaustive enumeration, exact, desk-scale only
    greedy        earliest feasible finish in due-date order
    local_search  seeded iterated local search started from greedy

Every solver relabels the orders by ``(due date, id)`` before solving; see
:class:`SolveResult` for the mapping back to input ids.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

from ..constants import EXHAUSTIVE_LIMIT, LOCAL_SEARCH_BUDGET, LOCAL_SEARCH_KICKS
from ..errors import SolverError
from ..plant import Order, PlantConfig
from .exhaustive import search_space, solve_exhaustive
from .greedy import solve_greedy
from .local_search import solve_local_search
from .result import METHOD_GREEDY, METHOD_LOCAL_SEARCH, METHOD_ORACLE, SolveResult

_ALIASES: dict[str, str] = {
    "oracle": METHOD_ORACLE,
    "exhaustive": METHOD_ORACLE,
    "greedy": METHOD_GREEDY,
    "local": METHOD_LOCAL_SEARCH,
    "local_search": METHOD_LOCAL_SEARCH,
}

METHODS: tuple[str, ...] = tuple(_ALIASES)


def solve(
    method: str,
    orders: Sequence[Order],
    plant: PlantConfig,
    *,
    seed: int = 0,
    budget: int = LOCAL_SEARCH_BUDGET,
    kicks: int = LOCAL_SEARCH_KICKS,
    limit: int = EXHAUSTIVE_LIMIT,
    warm_start: Mapping[int, int | None] | None = None,
) -> SolveResult:
    """Run the solver named *method* (``oracle``, ``greedy`` or ``local``).

    ``warm_start`` (input order id → machine id) only affects local search;
    the other methods ignore it.
    """
    name = _ALIASES.get(method)
    if name is None:
        raise SolverError(f"unknown method {method!r}; choose one of {list(METHODS)}")
    if name == METHOD_ORACLE:
        return solve_exhaustive(orders, plant, limit=limit)
    if name == METHOD_GREEDY:
        return solve_greedy(orders, plant)
    return solve_local_search(
        orders, plant, seed=seed, budget=budget, kicks=kicks, warm_start=warm_start
    )


__all__ = [
    "METHODS",
    "METHOD_GREEDY",
    "METHOD_LOCAL_SEARCH",
    "METHOD_ORACLE",
    "SolveResult",
    "search_space",
    "solve",
    "solve_exhaustive",
    "solve_greedy",
    "solve_local_search",
]
