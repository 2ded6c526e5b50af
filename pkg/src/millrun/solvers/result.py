"""Solver output shared by every method."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from ..errors import SolverError
from ..plant import Order, PlantConfig
from ..schedule_model import Assignment, ScheduleEvaluation, evaluate

METHOD_ORACLE: str = "oracle"
METHOD_GREEDY: str = "greedy"
METHOD_LOCAL_SEARCH: str = "local_search"


@dataclass(frozen=True)
class SolveResult:
    """A feasible assignment with its evaluation.

    ``orders`` and the rows of ``best_x`` are in solving sequence (due date,
    then input id); ``original_ids[k]`` is the input id of sequence position
    ``k``.  ``unserved`` lists input ids, ascending.  The result is feasible
    in the sense that ``evaluate(orders, plant, best_x)`` reproduces
    ``best_eval``.
    """

    method: str
    orders: tuple[Order, ...]
    original_ids: tuple[int, ...]
    machine_ids: tuple[int, ...]
    best_x: Assignment
    best_eval: ScheduleEvaluation
    seed: int | None = None
    iterations: int = 0

    def __post_init__(self) -> None:
        if not self.best_eval.feasible:
            bad = ", ".join(str(v) for v in self.best_eval.violations)
            raise SolverError(f"{self.method} produced an infeasible assignment ({bad})")

    @property
    def Z(self) -> float:  # noqa: N802
        return self.best_eval.Z

    @property
    def unserved(self) -> tuple[int, ...]:
        served = self.best_x.served
        return tuple(sorted(oid for oid, ok in zip(self.original_ids, served) if not ok))

    def machine_of(self) -> dict[int, int | None]:
        """Input order id → machine id (``None`` when unserved)."""
        out: dict[int, int | None] = {}
        for oid, j in zip(self.original_ids, self.best_x.choices()):
            out[oid] = None if j is None else self.machine_ids[j]
        return out

    def to_dict(self) -> dict[str, Any]:
        ev = self.best_eval
        rows = []
        for k, (oid, j) in enumerate(zip(self.original_ids, self.best_x.choices())):
            rows.append(
                {
                    "order": oid,
                    "sequence": k + 1,
                    "machine": None if j is None else self.machine_ids[j],
                    "quantity_kg": self.orders[k].quantity,
                    "due_days": self.orders[k].due_days,
                    "finish_h": float(ev.L[k]),
                    "slack_h": float(ev.H[k]),
                    "occupancy_kg": float(ev.O[k]),
                }
            )
        return {
            "method": self.method,
            "seed": self.seed,
            "iterations": self.iterations,
            "Z_kg": self.Z,
            "unserved": list(self.unserved),
            "feasible": ev.feasible,
            "orders": rows,
        }


def build_result(
    method: str,
    orders: Sequence[Order],
    original_ids: Sequence[int],
    plant: PlantConfig,
    x: Assignment,
    *,
    seed: int | None = None,
    iterations: int = 0,
) -> SolveResult:
    """Evaluate *x* once more with the full model and wrap it."""
    return SolveResult(
        method=method,
        orders=tuple(orders),
        original_ids=tuple(original_ids),
        machine_ids=tuple(mach.id for mach in plant.machines),
        best_x=x,
        best_eval=evaluate(orders, plant, x),
        seed=seed,
        iterations=iterations,
    )
