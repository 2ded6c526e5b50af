from .capacity import (
    CapacityProfile,
    CapacityReport,
    capacity_loss,
    capacity_profile,
    capacity_report,
    nominal_capacity,
)
from .demand import (
    AndersonDarling,
    DemandSeries,
    NormalFit,
    anderson_darling_p,
    coefficient_of_variation,
    demand_report,
    descriptive_stats,
    is_normal,
    tail_probability,
    unmet_demand_ratio,
)
from .errors import (
    CapacityError,
    DemandError,
    ForecastError,
    InputFormatError,
    MillrunError,
    PlantError,
    ScenarioError,
    ScheduleError,
    SolverError,
    UsageError,
)
from .forecasting import (
    BacktestResult,
    ForecastModelSpec,
    GridConfig,
    ModelKind,
    best_per_kind,
    fit_forecast,
    grid_search,
    mape,
    min_history,
)
from .plant import Machine, Order, PlantConfig, net_rate, processing_time, validate_orders
from .scenario import (
    OrderGen,
    ScenarioSpec,
    SweepTable,
    WarehouseOption,
    critical_demand,
    segment_demand,
    service_risk,
    shelving_summary,
    warehouse_sweep,
)
from .schedule_model import (
    Assignment,
    ScheduleEvaluation,
    Violation,
    completion_times,
    evaluate,
    interaction_matrix,
    objective,
    occupancy,
    processing_matrix,
    slacks,
)
from .solvers import SolveResult, solve, solve_exhaustive, solve_greedy, solve_local_search

__version__ = "0.1.0"

__all__ = [
    # --- plant ---
    "Machine",
    "Order",
    "PlantConfig",
    "net_rate",
    "processing_time",
    "validate_orders",
    # --- demand analytics ---
    "DemandSeries",
    "NormalFit",
    "AndersonDarling",
    "unmet_demand_ratio",
    "descriptive_stats",
    "anderson_darling_p",
    "is_normal",
    "tail_probability",
    "coefficient_of_variation",
    "demand_report",
    # --- forecasting ---
    "ModelKind",
    "ForecastModelSpec",
    "BacktestResult",
    "GridConfig",
    "fit_forecast",
    "mape",
    "min_history",
    "grid_search",
    "best_per_kind",
    # --- capacity ---
    "CapacityProfile",
    "CapacityReport",
    "nominal_capacity",
    "capacity_loss",
    "capacity_profile",
    "capacity_report",
    # --- schedule model ---
    "Assignment",
    "ScheduleEvaluation",
    "Violation",
    "processing_matrix",
    "completion_times",
    "slacks",
    "interaction_matrix",
    "occupancy",
    "objective",
    "evaluate",
    # --- solvers ---
    "SolveResult",
    "solve",
    "solve_exhaustive",
    "solve_greedy",
    "solve_local_search",
    # --- scenario ---
    "OrderGen",
    "WarehouseOption",
    "ScenarioSpec",
    "SweepTable",
    "segment_demand",
    "warehouse_sweep",
    "critical_demand",
    "service_risk",
    "shelving_summary",
    # --- errors ---
    "MillrunError",
    "PlantError",
    "DemandError",
    "ForecastError",
    "CapacityError",
    "ScheduleError",
    "SolverError",
    "ScenarioError",
    "InputFormatError",
    "UsageError",
]
