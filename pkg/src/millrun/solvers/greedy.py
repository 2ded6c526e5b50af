"""Earliest-finish greedy: orders by due date, each onto its fastest feasible machine."""

from __future__ import annotations

import logging
from collections.abc import Sequence

from ..plant import Order, PlantConfig
from ..schedule_model import Assignment
from ._partial import Choice, PartialSchedule, resequence
from .result import METHOD_GREEDY, SolveResult, build_result

logger = logging.getLogger(__name__)


def greedy_choices(seq: Sequence[Order], plant: PlantConfig) -> list[Choice]:
    """Machine index per sequenced order; ``None`` when no machine keeps it feasible.

    Ties in finish time go to the lower machine index.
    """
    state = PartialSchedule(seq, plant)
    out: list[Choice] = []
    for _ in seq:
        best: Choice = None
        best_finish = 0.0
        for j in range(plant.n_machines):
            finish = state.finish_on(j)
            if finish is not None and (best is None or finish < best_finish):
                best, best_finish = j, finish
        state.push(best)
        out.append(best)
    return out


def solve_greedy(orders: Sequence[Order], plant: PlantConfig) -> SolveResult:
    """Deterministic constructive schedule; never fails, worst case serves nothing."""
    seq, original_ids = resequence(orders)
    choices = greedy_choices(seq, plant)
    skipped = sum(j is None for j in choices)
    if skipped:
        logger.info("greedy: %d of %d orders left unserved", skipped, len(seq))
    x = Assignment.from_choices(choices, plant.n_machines)
    return build_result(METHOD_GREEDY, seq, original_ids, plant, x, iterations=len(seq))
