"""
Exception hierarchy.

Every error raised for invalid input derives from ``MillrunError``, itself a
``ValueError`` so callers that only know the builtin still catch it.  The
``module`` attribute names the area that rejected the input; the CLI uses it
as the prefix of its one-line diagnostic.

Model infeasibility is *not* an error: the schedule evaluator reports it as a
list of violations.
"""

from __future__ import annotations


class MillrunError(ValueError):
    """Base class for all millrun input and computation errors."""

    module: str = "millrun"

    def __str__(self) -> str:
        return f"{self.module}: {super().__str__()}"


class PlantError(MillrunError):
    module = "plant"


class DemandError(MillrunError):
    module = "demand"


class ForecastError(MillrunError):
    module = "forecast"


class CapacityError(MillrunError):
    module = "capacity"


class ScheduleError(MillrunError):
    module = "schedule"


class SolverError(MillrunError):
    module = "solver"


class ScenarioError(MillrunError):
    module = "scenario"


class InputFormatError(MillrunError):
    module = "io"


class UsageError(MillrunError):
    module = "usage"
