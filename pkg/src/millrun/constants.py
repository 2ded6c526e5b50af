"""
Plant-wide constants for production planning computations.

Values here are defaults; every function that uses one accepts a keyword
override so a plant with different conventions never has to edit this file.
"""

# Hours in a planning month used for nominal capacity: 22 working days × 8 h.
MONTHLY_HOURS: float = 176.0

# Working days in a planning month; bounds the number of orders with
# distinct due dates a month can be cut into.
WORKING_DAYS: int = 22

# Strict inequalities of the scheduling model (slack > 0, interaction
# ordering) are realised as ``a + SLACK_EPSILON <= b``.  Unit: hours.
SLACK_EPSILON: float = 1e-6

# Ties L_i == L_k count as a warehouse interaction by default.
TIE_INTERACTS: bool = True

# Loss-per-startup variants.  "printed" applies 1/m once to
# (Σ τ_j)(Σ s_j); "prose" multiplies the average rate by the average startup.
LOSS_PRINTED: str = "printed"
LOSS_PROSE: str = "prose"
LOSS_FORMULAS: tuple[str, ...] = (LOSS_PRINTED, LOSS_PROSE)

# Forecasting defaults
DEFAULT_SEASON_LENGTH: int = 12
MA_WINDOW_MIN: int = 2
MA_WINDOW_MAX: int = 23

# Exhaustive search refuses spaces larger than this many assignments.
EXHAUSTIVE_LIMIT: int = 10**7

# Local search: feasibility checks per run and perturbation restarts.
LOCAL_SEARCH_BUDGET: int = 20_000
LOCAL_SEARCH_KICKS: int = 25

# Critical-demand bisection bracket and tolerance (kg)
CRITICAL_BRACKET: tuple[float, float] = (1e4, 1e7)
CRITICAL_TOLERANCE: float = 1_000.0

# Significance level used to accept normality of monthly demand.
NORMALITY_SIGNIFICANCE: float = 0.05

# Anderson–Darling p-value approximation is unreliable below this sample size.
AD_MIN_SAMPLES: int = 8

# Monthly 2013 demand (kg), one value per month January..December.
DEMAND_2013_KG: tuple[float, ...] = (
    435_536.0,
    342_621.0,
    294_082.0,
    326_342.0,
    410_814.0,
    377_721.0,
    351_338.0,
    491_975.0,
    424_908.0,
    535_150.0,
    343_411.0,
    430_795.0,
)
