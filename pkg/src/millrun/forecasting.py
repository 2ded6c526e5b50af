"""
Time-series forecast models, MAPE scoring and grid-search model selection.

Six model families are fitted as in-sample, one-step-ahead backtests: the
forecast for period ``t`` only ever uses observations ``< t``.

    mean               running mean of all history
    moving_average     mean of the last ``k`` observations (k = 2..23)
    ses                simple exponential smoothing, level = first observation
    holt               level + trend; level = y₁, trend = y₁ − y₀ at period 1
    winters            multiplicative level/trend/season, initialised from the
                       first two seasons (level = first-season mean, trend =
                       difference of season means / season length, indices =
                       first-season values / first-season mean)
    linear_regression  ordinary least squares on the time index, refitted on
                       the history before each period

Smoothing
~~~~~~~~~
SES, Holt and Winters run on statsmodels' ``ExponentialSmoothing`` with the
known initial state above and fixed constants (``optimized=False``).  The
Winters season is updated against the level and trend before the period:
``s ← δ·y / (l + b) + (1 − δ)·s``.

Warm-up
~~~~~~~
Periods before a model's first defined forecast are ``None`` in
``BacktestResult.fitted``.  A series is fittable when it has at least one
scored period: ``min_history(spec)`` = first forecast index + 1.  Winters
builds its initial state from the first two seasons, so its first forecast is
period ``2·s`` and it needs ``2·s + 1`` periods (25 for monthly data).

MAPE
~~~~
Mean of ``|a − f| / a`` over periods with a defined forecast.  Periods with a
zero actual are excluded and a warning is recorded on the result.

Examples::

    >>> from millrun.forecasting import ForecastModelSpec, ModelKind, fit_forecast
    >>> res = fit_forecast([100.0, 200.0] * 6, ForecastModelSpec(ModelKind.MOVING_AVERAGE, window=2))
    >>> round(res.mape, 6)
    0.375
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any

import numpy as np
from statsmodels.tsa.holtwinters import ExponentialSmoothing

from .constants import DEFAULT_SEASON_LENGTH, MA_WINDOW_MAX, MA_WINDOW_MIN
from .errors import ForecastError

logger = logging.getLogger(__name__)

_ROUND_DIGITS: int = 10
# MAPEs equal to this many decimals rank as ties.
_MAPE_TIE_DIGITS: int = 12


class ModelKind(str, Enum):
    MEAN = "mean"
    MOVING_AVERAGE = "moving_average"
    SES = "ses"
    HOLT = "holt"
    WINTERS = "winters"
    LINEAR_REGRESSION = "linear_regression"


# Complexity used to break MAPE ties: fewer parameters first, then this order.
_N_PARAMS: dict[ModelKind, int] = {
    ModelKind.MEAN: 0,
    ModelKind.MOVING_AVERAGE: 1,
    ModelKind.SES: 1,
    ModelKind.LINEAR_REGRESSION: 2,
    ModelKind.HOLT: 2,
    ModelKind.WINTERS: 3,
}
_KIND_RANK: dict[ModelKind, int] = {kind: rank for rank, kind in enumerate(_N_PARAMS)}

_FRACTIONS: dict[ModelKind, tuple[str, ...]] = {
    ModelKind.MEAN: (),
    ModelKind.MOVING_AVERAGE: (),
    ModelKind.SES: ("alpha",),
    ModelKind.HOLT: ("alpha", "gamma"),
    ModelKind.WINTERS: ("alpha", "gamma", "delta"),
    ModelKind.LINEAR_REGRESSION: (),
}

# --------------------------------------------------------------------------- #
# Domain types
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class ForecastModelSpec:
    """One forecast model with its hyperparameters.

    Exactly the parameters of ``kind`` must be given: ``window`` for the
    moving average; ``alpha`` for SES; ``alpha, gamma`` for Holt;
    ``alpha, gamma, delta`` (and optionally ``season_length``) for Winters.
    Smoothing constants lie in the open interval (0, 1).
    """

    kind: ModelKind
    window: int | None = None
    alpha: float | None = None
    gamma: float | None = None
    delta: float | None = None
    season_length: int | None = None

    def __post_init__(self) -> None:
        kind = ModelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ModelKind.WINTERS and self.season_length is None:
            object.__setattr__(self, "season_length", DEFAULT_SEASON_LENGTH)

        wanted = set(_FRACTIONS[kind])
        for name in ("alpha", "gamma", "delta"):
            value = getattr(self, name)
            if name in wanted:
                if value is None:
                    raise ForecastError(f"{kind.value} requires {name}")
                if not (0.0 < value < 1.0):
                    raise ForecastError(f"{name} must be in (0, 1), got {value}")
            elif value is not None:
                raise ForecastError(f"{kind.value} does not take {name}")

        if kind is ModelKind.MOVING_AVERAGE:
            if self.window is None:
                raise ForecastError("moving_average requires window")
            if not (MA_WINDOW_MIN <= self.window <= MA_WINDOW_MAX):
                raise ForecastError(
                    f"window must be in {MA_WINDOW_MIN}..{MA_WINDOW_MAX}, got {self.window}"
                )
        elif self.window is not None:
            raise ForecastError(f"{kind.value} does not take window")

        if kind is ModelKind.WINTERS:
            if self.season_length is None or self.season_length < 2:  # noqa: PLR2004
                raise ForecastError(f"season_length must be >= 2, got {self.season_length}")
        elif self.season_length is not None:
            raise ForecastError(f"{kind.value} does not take season_length")

    @property
    def n_params(self) -> int:
        return _N_PARAMS[self.kind]

    @property
    def first_forecast(self) -> int:
        """Index of the first period with a defined forecast."""
        if self.kind is ModelKind.MOVING_AVERAGE:
            return int(self.window or 0)
        if self.kind in (ModelKind.HOLT, ModelKind.LINEAR_REGRESSION):
            return 2
        if self.kind is ModelKind.WINTERS:
            return 2 * int(self.season_length or 0)
        return 1

    def parameters(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        if self.window is not None:
            out["window"] = self.window
        for name in _FRACTIONS[self.kind]:
            out[name] = getattr(self, name)
        if self.season_length is not None:
            out["season_length"] = self.season_length
        return out

    def label(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.parameters().items())
        return f"{self.kind.value}({params})" if params else self.kind.value

    def sort_key(self) -> tuple:
        return (
            self.n_params,
            _KIND_RANK[self.kind],
            self.window or 0,
            self.alpha or 0.0,
            self.gamma or 0.0,
            self.delta or 0.0,
        )


def min_history(spec: ForecastModelSpec) -> int:
    """Shortest series with at least one scored forecast under *spec*."""
    return spec.first_forecast + 1


@dataclass(frozen=True)
class BacktestResult:
    """In-sample one-step-ahead backtest of a single model."""

    spec: ForecastModelSpec
    fitted: tuple[float | None, ...]
    mape: float
    next_forecast: float
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.spec.kind.value,
            "parameters": self.spec.parameters(),
            "mape": self.mape,
            "next_forecast": self.next_forecast,
        }


@dataclass(frozen=True)
class GridConfig:
    """Hyperparameter grid searched by :func:`grid_search`.

    The Winters search evaluates a coarse cube, then every point within
    ``winters_refine_radius`` of the best coarse cell at
    ``winters_refine_step``.
    """

    ma_windows: tuple[int, ...] = tuple(range(MA_WINDOW_MIN, MA_WINDOW_MAX + 1))
    ses_step: float = 0.01
    holt_step: float = 0.01
    winters_coarse_step: float = 0.05
    winters_refine_step: float = 0.01
    winters_refine_radius: float = 0.04
    season_length: int = DEFAULT_SEASON_LENGTH


# --------------------------------------------------------------------------- #
# Model recursions
# --------------------------------------------------------------------------- #


def _mean_forecasts(y: list[float]) -> tuple[list[float | None], float]:
    fitted: list[float | None] = [None] * len(y)
    total = 0.0
    for t in range(len(y)):
        if t >= 1:
            fitted[t] = total / t
        total += y[t]
    return fitted, total / len(y)


def _moving_average_forecasts(y: list[float], k: int) -> tuple[list[float | None], float]:
    fitted: list[float | None] = [None] * len(y)
    for t in range(k, len(y)):
        fitted[t] = sum(y[t - k : t]) / k
    return fitted, sum(y[-k:]) / k


@lru_cache(maxsize=32)
def _smoother(y: tuple[float, ...], kind: ModelKind, s: int) -> ExponentialSmoothing:
    """Smoothing model of *kind* on *y* with its known initial state."""
    data = np.asarray(y, dtype=float)
    if kind is ModelKind.SES:
        return ExponentialSmoothing(data, initialization_method="known", initial_level=y[0])
    if kind is ModelKind.HOLT:
        # backcast one period: after y[0], y[1] the state is level y[1], trend y[1] − y[0]
        slope = y[1] - y[0]
        return ExponentialSmoothing(
            data,
            trend="add",
            initialization_method="known",
            initial_level=y[0] - slope,
            initial_trend=slope,
        )
    first = math.fsum(y[:s]) / s
    second = math.fsum(y[s : 2 * s]) / s
    if first <= 0:
        raise ForecastError("winters needs a positive first-season mean")
    season = [v / first for v in y[:s]]
    if min(season) <= 0:
        raise ForecastError("winters needs positive first-season values (multiplicative form)")
    if min(y[s:]) <= 0:
        raise ForecastError("winters needs positive values after the first season (multiplicative form)")
    return ExponentialSmoothing(
        data[s:],
        trend="add",
        seasonal="mul",
        seasonal_periods=s,
        initialization_method="known",
        initial_level=first,
        initial_trend=(second - first) / s,
        initial_seasonal=season,
    )


def _smoothing_forecasts(y: list[float], spec: ForecastModelSpec) -> tuple[list[float | None], float]:
    s = int(spec.season_length or 0)
    model = _smoother(tuple(y), spec.kind, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        res = model.fit(
            smoothing_level=spec.alpha,
            smoothing_trend=spec.gamma,
            smoothing_seasonal=spec.delta,
            optimized=False,
        )
        nxt = float(np.asarray(res.forecast(1))[0])
    if spec.kind is ModelKind.WINTERS:
        collapsed = np.flatnonzero(np.asarray(res.level) <= 0)
        if collapsed.size:
            raise ForecastError(f"winters level collapsed at period {int(collapsed[0]) + s}")
    offset = s if spec.kind is ModelKind.WINTERS else 0
    values = np.asarray(res.fittedvalues, dtype=float)
    fitted: list[float | None] = [None] * len(y)
    for t in range(spec.first_forecast, len(y)):
        fitted[t] = float(values[t - offset])
    return fitted, nxt


def _ols_predict(y: Sequence[float], at: int) -> float:
    slope, intercept = np.polyfit(np.arange(len(y), dtype=float), np.asarray(y, dtype=float), 1)
    return float(intercept + slope * at)


def _regression_forecasts(y: list[float]) -> tuple[list[float | None], float]:
    fitted: list[float | None] = [None] * len(y)
    for t in range(2, len(y)):
        fitted[t] = _ols_predict(y[:t], t)
    return fitted, _ols_predict(y, len(y))


def _forecasts(y: list[float], spec: ForecastModelSpec) -> tuple[list[float | None], float]:
    kind = spec.kind
    if kind is ModelKind.MEAN:
        return _mean_forecasts(y)
    if kind is ModelKind.MOVING_AVERAGE:
        return _moving_average_forecasts(y, int(spec.window or 0))
    if kind in (ModelKind.SES, ModelKind.HOLT, ModelKind.WINTERS):
        return _smoothing_forecasts(y, spec)
    return _regression_forecasts(y)


# --------------------------------------------------------------------------- #
# Scoring
# --------------------------------------------------------------------------- #


def mape(actuals: Sequence[float], forecasts: Sequence[float | None]) -> float:
    """Mean absolute percentage error over positions with a defined forecast.

    Raises
    ------
    ForecastError
        On length mismatch, a non-positive actual at a scored position, or an
        empty scored set.

    Examples
    --------
    >>> round(mape([100.0, 200.0], [110.0, 180.0]), 12)
    0.1
    >>> mape([100.0], [0.0])
    1.0
    """
    if len(actuals) != len(forecasts):
        raise ForecastError(f"length mismatch: {len(actuals)} actuals vs {len(forecasts)} forecasts")
    errors = []
    for t, (a, f) in enumerate(zip(actuals, forecasts)):
        if f is None:
            continue
        if not a > 0:
            raise ForecastError(f"period {t}: actual must be > 0 to be scored, got {a}")
        errors.append(abs(a - f) / a)
    if not errors:
        raise ForecastError("no scored periods")
    return math.fsum(errors) / len(errors)


def _as_values(series: Sequence[float]) -> list[float]:
    values = [float(v) for v in series]
    for t, v in enumerate(values):
        if not (math.isfinite(v) and v >= 0):
            raise ForecastError(f"period {t}: value must be finite and >= 0, got {v}")
    return values


def _backtest(values: list[float], spec: ForecastModelSpec) -> BacktestResult:
    need = min_history(spec)
    if len(values) < need:
        raise ForecastError(
            f"{spec.label()} needs at least {need} periods of history, got {len(values)}"
        )
    fitted, nxt = _forecasts(values, spec)
    notes: list[str] = []
    scored: list[float | None] = list(fitted)
    for t, (a, f) in enumerate(zip(values, fitted)):
        if f is not None and a == 0:
            scored[t] = None
            notes.append(f"period {t}: zero actual excluded from MAPE")
    for note in notes:
        logger.warning("%s: %s", spec.label(), note)
    return BacktestResult(
        spec=spec,
        fitted=tuple(fitted),
        mape=mape(values, scored),
        next_forecast=float(nxt),
        warnings=tuple(notes),
    )


def fit_forecast(series: Sequence[float], spec: ForecastModelSpec) -> BacktestResult:
    """Backtest *spec* on *series* (one value per period, kg)."""
    return _backtest(_as_values(series), spec)


# --------------------------------------------------------------------------- #
# Grid search
# --------------------------------------------------------------------------- #


def fraction_grid(step: float) -> list[float]:
    """Points ``step, 2·step, …`` strictly inside (0, 1), rounded to kill drift."""
    if not (0.0 < step < 1.0):
        raise ForecastError(f"grid step must be in (0, 1), got {step}")
    count = int(round(1.0 / step))
    points = [round(i * step, _ROUND_DIGITS) for i in range(1, count + 1)]
    return [p for p in points if 0.0 < p < 1.0]


def _neighbourhood(centre: float, step: float, radius: float) -> list[float]:
    reach = int(round(radius / step))
    points = [round(centre + j * step, _ROUND_DIGITS) for j in range(-reach, reach + 1)]
    return [p for p in points if 0.0 < p < 1.0]


def _candidate_specs(config: GridConfig) -> Iterator[ForecastModelSpec]:
    yield ForecastModelSpec(ModelKind.MEAN)
    for k in config.ma_windows:
        yield ForecastModelSpec(ModelKind.MOVING_AVERAGE, window=k)
    for a in fraction_grid(config.ses_step):
        yield ForecastModelSpec(ModelKind.SES, alpha=a)
    holt = fraction_grid(config.holt_step)
    for a in holt:
        for g in holt:
            yield ForecastModelSpec(ModelKind.HOLT, alpha=a, gamma=g)
    yield ForecastModelSpec(ModelKind.LINEAR_REGRESSION)


def _winters_specs(config: GridConfig) -> Iterator[ForecastModelSpec]:
    coarse = fraction_grid(config.winters_coarse_step)
    for a in coarse:
        for g in coarse:
            for d in coarse:
                yield ForecastModelSpec(
                    ModelKind.WINTERS, alpha=a, gamma=g, delta=d, season_length=config.season_length
                )


def _refined_winters_specs(
    best: ForecastModelSpec, config: GridConfig
) -> Iterator[ForecastModelSpec]:
    step, radius = config.winters_refine_step, config.winters_refine_radius
    for a in _neighbourhood(float(best.alpha or 0.0), step, radius):
        for g in _neighbourhood(float(best.gamma or 0.0), step, radius):
            for d in _neighbourhood(float(best.delta or 0.0), step, radius):
                yield ForecastModelSpec(
                    ModelKind.WINTERS, alpha=a, gamma=g, delta=d, season_length=config.season_length
                )


def ranking_key(result: BacktestResult) -> tuple:
    """Total order: MAPE, then simpler model, then smaller window / constants."""
    return (round(result.mape, _MAPE_TIE_DIGITS), *result.spec.sort_key())


def grid_search(
    series: Sequence[float], config: GridConfig | None = None
) -> list[BacktestResult]:
    """Evaluate every model of the grid and rank ascending by MAPE.

    Models whose history requirement exceeds the series are dropped with a
    warning; if nothing is fittable a ``ForecastError`` is raised.
    """
    config = config or GridConfig()
    values = _as_values(series)
    results: list[BacktestResult] = []
    dropped: list[str] = []

    def _try(spec: ForecastModelSpec) -> BacktestResult | None:
        if len(values) < min_history(spec):
            dropped.append(spec.label())
            return None
        try:
            return _backtest(values, spec)
        except ForecastError as exc:
            dropped.append(f"{spec.label()} ({exc})")
            return None

    for spec in _candidate_specs(config):
        res = _try(spec)
        if res is not None:
            results.append(res)

    winters: list[BacktestResult] = []
    for spec in _winters_specs(config):
        res = _try(spec)
        if res is not None:
            winters.append(res)
    if winters:
        seen = {r.spec for r in winters}
        best = min(winters, key=ranking_key).spec
        for spec in _refined_winters_specs(best, config):
            if spec in seen:
                continue
            seen.add(spec)
            res = _try(spec)
            if res is not None:
                winters.append(res)
    results.extend(winters)

    if dropped:
        logger.warning(
            "grid search dropped %d model(s) for a %d-period series, e.g. %s",
            len(dropped),
            len(values),
            dropped[0],
        )
    if not results:
        raise ForecastError(f"series of {len(values)} periods is shorter than every model's warm-up")
    return sorted(results, key=ranking_key)


def best_per_kind(results: Sequence[BacktestResult]) -> list[BacktestResult]:
    """First (best-ranked) result of every model family, in ranked order."""
    seen: set[ModelKind] = set()
    table = []
    for res in sorted(results, key=ranking_key):
        if res.spec.kind not in seen:
            seen.add(res.spec.kind)
            table.append(res)
    return table
