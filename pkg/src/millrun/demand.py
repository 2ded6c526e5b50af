"""
Demand analytics: unmet-demand ratio, normal fit, normality test, tail risk.

Quantities
~~~~~~~~~~
d_ins
    Mean over periods of the per-period shortfall fraction ``(D − V)/D``.
    Periods where sales exceed demand contribute a negative fraction; the
    mean is not clamped.
NormalFit
    Sample mean and sample standard deviation (``n − 1`` denominator) of the
    monthly demands.  The 2013 demands give μ ≈ 397,058 kg, σ ≈ 71,078 kg;
    the population formula would give ≈ 68,053 kg instead.
Anderson–Darling
    Case-3 test (μ and σ estimated), small-sample corrected
    ``A*² = A²(1 + 0.75/n + 2.25/n²)`` and mapped to a p-value with the
    D'Agostino–Stephens four-branch exponential approximation.
Tail probability
    ``P(D > x) = 1 − Φ((x − μ)/σ)`` through ``scipy.stats.norm.sf``.

What these do NOT mean
~~~~~~~~~~~~~~~~~~~~~~
A large AD p-value fails to reject normality; it does not prove it.  Tail
probabilities inherit every weakness of the normal assumption, in particular
for thresholds several σ from the mean.

Examples::

    >>> from millrun.demand import DemandSeries, descriptive_stats, tail_probability
    >>> fit = descriptive_stats(DemandSeries.from_values([397_058.0 - 1, 397_058.0 + 1]))
    >>> round(tail_probability(fit, fit.mu), 6)
    0.5
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np
from scipy import stats

from .constants import AD_MIN_SAMPLES, NORMALITY_SIGNIFICANCE
from .errors import DemandError

logger = logging.getLogger(__name__)

_MIN_FIT_SAMPLES: int = 2

# --------------------------------------------------------------------------- #
# Domain types
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class DemandSeries:
    """Ordered monthly ``(demand, sales)`` pairs in kg.

    ``sales`` is ``None`` for forecast-only series (demand history without the
    matching deliveries).
    """

    demand: tuple[float, ...]
    sales: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        demand = tuple(float(d) for d in self.demand)
        object.__setattr__(self, "demand", demand)
        if len(demand) < 1:
            raise DemandError("demand series must contain at least one period")
        for i, d in enumerate(demand):
            if not (math.isfinite(d) and d >= 0):
                raise DemandError(f"period {i}: demand must be finite and >= 0, got {d}")
        if self.sales is not None:
            sales = tuple(float(v) for v in self.sales)
            object.__setattr__(self, "sales", sales)
            if len(sales) != len(demand):
                raise DemandError(
                    f"sales length {len(sales)} does not match demand length {len(demand)}"
                )
            for i, v in enumerate(sales):
                if not (math.isfinite(v) and v >= 0):
                    raise DemandError(f"period {i}: sales must be finite and >= 0, got {v}")

    @classmethod
    def from_values(
        cls, demand: Iterable[float], sales: Iterable[float] | None = None
    ) -> DemandSeries:
        return cls(tuple(demand), tuple(sales) if sales is not None else None)

    def __len__(self) -> int:
        return len(self.demand)

    @property
    def has_sales(self) -> bool:
        return self.sales is not None


@dataclass(frozen=True)
class NormalFit:
    """Normal approximation of monthly demand (``sigma`` is the sample SD)."""

    mu: float
    sigma: float
    n: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DemandError(f"sigma must be > 0, got {self.sigma}")
        if not math.isfinite(self.mu):
            raise DemandError(f"mu must be finite, got {self.mu}")


class AndersonDarling(NamedTuple):
    statistic: float
    p_value: float


# --------------------------------------------------------------------------- #
# Operations
# --------------------------------------------------------------------------- #


def unmet_demand_ratio(series: DemandSeries) -> float:
    """Mean of ``(D_i − V_i)/D_i`` over every period of *series*.

    Raises
    ------
    DemandError
        When sales are missing or a period has zero demand (the offending
        period index is named).

    Examples
    --------
    >>> round(unmet_demand_ratio(DemandSeries((100.0,), (90.0,))), 12)
    0.1
    """
    if series.sales is None:
        raise DemandError("unmet demand ratio needs sales for every period")
    fractions = []
    for i, (d, v) in enumerate(zip(series.demand, series.sales)):
        if d == 0:
            raise DemandError(f"period {i}: demand is zero, shortfall fraction undefined")
        fractions.append((d - v) / d)
    return math.fsum(fractions) / len(fractions)


def descriptive_stats(series: DemandSeries) -> NormalFit:
    """Sample mean and sample standard deviation (``ddof=1``) of the demands."""
    values = np.asarray(series.demand, dtype=float)
    n = values.size
    if n < _MIN_FIT_SAMPLES:
        raise DemandError(f"need at least {_MIN_FIT_SAMPLES} periods for a normal fit, got {n}")
    sigma = float(np.std(values, ddof=1))
    if sigma == 0:
        raise DemandError("demand series is constant; sigma would be 0")
    return NormalFit(mu=float(np.mean(values)), sigma=sigma, n=int(n))


def _ad_pvalue(ad2a: float) -> float:
    if ad2a < 0.200:  # noqa: PLR2004
        return 1.0 - math.exp(-13.436 + 101.14 * ad2a - 223.73 * ad2a**2)
    if ad2a < 0.340:  # noqa: PLR2004
        return 1.0 - math.exp(-8.318 + 42.796 * ad2a - 59.938 * ad2a**2)
    if ad2a < 0.600:  # noqa: PLR2004
        return math.exp(0.9177 - 4.279 * ad2a - 1.38 * ad2a**2)
    if ad2a <= 13.0:  # noqa: PLR2004
        return math.exp(1.2937 - 5.709 * ad2a + 0.0186 * ad2a**2)
    return 0.0


def anderson_darling_p(series: DemandSeries) -> AndersonDarling:
    """Anderson–Darling normality test with estimated mean and variance.

    Returns
    -------
    AndersonDarling
        ``(statistic, p_value)``; ``statistic`` is the uncorrected A².

    Raises
    ------
    DemandError
        For fewer than 8 observations, or tied / constant data.
    """
    values = np.sort(np.asarray(series.demand, dtype=float))
    n = values.size
    if n < AD_MIN_SAMPLES:
        raise DemandError(
            f"Anderson-Darling p-value needs at least {AD_MIN_SAMPLES} periods, got {n}"
        )
    if np.unique(values).size != n:
        raise DemandError("Anderson-Darling test rejects tied observations")

    w = (values - values.mean()) / values.std(ddof=1)
    i = np.arange(1, n + 1)
    terms = (2 * i - 1) * (stats.norm.logcdf(w) + stats.norm.logsf(w[::-1]))
    a2 = float(-n - terms.sum() / n)
    a2_star = a2 * (1.0 + 0.75 / n + 2.25 / n**2)
    return AndersonDarling(statistic=a2, p_value=_ad_pvalue(a2_star))


def is_normal(p_value: float, significance: float = NORMALITY_SIGNIFICANCE) -> bool:
    """True when the test fails to reject normality at *significance*."""
    return p_value > significance


def tail_probability(fit: NormalFit, threshold: float) -> float:
    """``P(demand > threshold)`` under *fit*.

    Examples
    --------
    >>> fit = NormalFit(mu=397_058.0, sigma=71_078.0, n=12)
    >>> round(tail_probability(fit, 377_721.0), 4)
    0.6072
    """
    return float(stats.norm.sf(threshold, loc=fit.mu, scale=fit.sigma))


def coefficient_of_variation(fit: NormalFit) -> float:
    """``σ/μ``; rejects ``μ = 0``."""
    if fit.mu == 0:
        raise DemandError("coefficient of variation undefined for mu = 0")
    return fit.sigma / fit.mu


def demand_report(series: DemandSeries, thresholds: Sequence[float] = ()) -> dict[str, Any]:
    """Assemble the JSON-ready analytics report for *series*.

    Keys ``d_ins``, ``mu``, ``sigma``, ``cv``, ``ad_stat``, ``ad_p``,
    ``normal_at_5pct``, ``n`` and ``tail`` (one entry per threshold).  Values
    that cannot be computed for this series are ``None`` and a warning is
    logged; a constant or single-period series still raises.
    """
    fit = descriptive_stats(series)
    d_ins = None
    if series.has_sales:
        d_ins = unmet_demand_ratio(series)
    ad_stat = ad_p = None
    normal = None
    if len(series) >= AD_MIN_SAMPLES:
        ad = anderson_darling_p(series)
        ad_stat, ad_p = ad.statistic, ad.p_value
        normal = is_normal(ad.p_value)
    else:
        logger.warning(
            "series has %d periods; Anderson-Darling needs %d, skipped", len(series), AD_MIN_SAMPLES
        )
    return {
        "n": fit.n,
        "d_ins": d_ins,
        "mu": fit.mu,
        "sigma": fit.sigma,
        "cv": coefficient_of_variation(fit),
        "ad_stat": ad_stat,
        "ad_p": ad_p,
        "normal_at_5pct": normal,
        "tail": [
            {"threshold_kg": float(x), "probability": tail_probability(fit, x)} for x in thresholds
        ],
    }
