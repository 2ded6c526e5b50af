"""Tests for millrun.demand: unmet-demand ratio, normal fit, AD test, tail risk."""

import logging
import time

import numpy as np
import pytest

from millrun.constants import DEMAND_2013_KG
from millrun.demand import (
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
from millrun.errors import DemandError

SERIES_2013 = DemandSeries.from_values(DEMAND_2013_KG)
FIT_2013 = NormalFit(mu=397_058.0, sigma=71_078.0, n=12)


# --------------------------------------------------------------------------- #
# Normal fit on the 2013 demands
# --------------------------------------------------------------------------- #


def test_descriptive_stats_2013():
    start = time.perf_counter()
    fit = descriptive_stats(SERIES_2013)
    elapsed = time.perf_counter() - start
    assert fit.mu == pytest.approx(397_058, abs=1)
    assert fit.sigma == pytest.approx(71_078, abs=1)
    assert fit.n == 12  # noqa: PLR2004
    assert elapsed < 0.05  # noqa: PLR2004


def test_sigma_is_sample_not_population():
    fit = descriptive_stats(SERIES_2013)
    assert abs(fit.sigma - 68_052) > 2_000  # noqa: PLR2004


def test_descriptive_stats_rejects_short_or_constant():
    with pytest.raises(DemandError, match="at least 2"):
        descriptive_stats(DemandSeries.from_values([5.0]))
    with pytest.raises(DemandError, match="constant"):
        descriptive_stats(DemandSeries.from_values([5.0, 5.0, 5.0]))


@pytest.mark.parametrize("shift", [0.0, 1.0, 12_345.5, 1e6])
def test_shift_moves_mean_and_keeps_sigma(shift):
    base = descriptive_stats(SERIES_2013)
    moved = descriptive_stats(DemandSeries.from_values([d + shift for d in DEMAND_2013_KG]))
    assert moved.mu == pytest.approx(base.mu + shift, rel=1e-12)
    assert moved.sigma == pytest.approx(base.sigma, rel=1e-9)

# --------------------------------------------------------------------------- #
# Tail probabilities and CV
# --------------------------------------------------------------------------- #


def test_tail_probabilities_of_2013_fit():
    assert tail_probability(FIT_2013, 377_721) == pytest.approx(0.6072, abs=0.0005)
    assert tail_probability(FIT_2013, 625_000) == pytest.approx(0.0007, abs=0.0002)


def test_tail_probability_limits():
    assert tail_probability(FIT_2013, FIT_2013.mu) == pytest.approx(0.5)
    assert tail_probability(FIT_2013, float("-inf")) == 1.0
    assert tail_probability(FIT_2013, float("inf")) == 0.0


def test_tail_probability_is_decreasing_and_symmetric():
    xs = np.linspace(FIT_2013.mu - 4 * FIT_2013.sigma, FIT_2013.mu + 4 * FIT_2013.sigma, 81)
    tails = [tail_probability(FIT_2013, float(x)) for x in xs]
    assert all(a >= b for a, b in zip(tails, tails[1:]))
    for x in (0.0, 1_000.0, 35_539.0, 71_078.0, 250_000.0):
        below = tail_probability(FIT_2013, FIT_2013.mu - x)
        above = tail_probability(FIT_2013, FIT_2013.mu + x)
        assert below + above == pytest.approx(1.0, abs=1e-9)


def test_coefficient_of_variation():
    fit = NormalFit(mu=380_506.0, sigma=160_689.0, n=36)
    assert coefficient_of_variation(fit) == pytest.approx(0.4223, abs=0.0001)
    with pytest.raises(DemandError, match="mu = 0"):
        coefficient_of_variation(NormalFit(mu=0.0, sigma=1.0, n=2))


def test_normal_fit_rejects_zero_sigma():
    with pytest.raises(DemandError, match="sigma"):
        NormalFit(mu=1.0, sigma=0.0, n=3)


# --------------------------------------------------------------------------- #
# Anderson–Darling
# --------------------------------------------------------------------------- #


def test_anderson_darling_2013():
    ad = anderson_darling_p(SERIES_2013)
    assert ad.p_value == pytest.approx(0.609, abs=0.05)
    assert ad.statistic == pytest.approx(0.270, abs=0.01)
    assert is_normal(ad.p_value)


def test_anderson_darling_rejects_clearly_non_normal():
    skewed = DemandSeries.from_values([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 500, 10_000])
    ad = anderson_darling_p(skewed)
    assert ad.p_value < 0.05  # noqa: PLR2004
    assert not is_normal(ad.p_value)


def test_anderson_darling_rejects_uniform_draws():
    values = np.random.default_rng(2013).uniform(100_000.0, 700_000.0, size=1_000)
    assert anderson_darling_p(DemandSeries.from_values(values)).p_value < 0.01  # noqa: PLR2004


def test_anderson_darling_false_rejection_rate_near_significance():
    rejected = 0
    for seed in range(200):
        values = np.random.default_rng(seed).normal(400_000.0, 70_000.0, size=100)
        rejected += not is_normal(anderson_darling_p(DemandSeries.from_values(values)).p_value)
    assert 0.01 <= rejected / 200 <= 0.10  # noqa: PLR2004


def test_anderson_darling_preconditions():
    with pytest.raises(DemandError, match="at least 8"):
        anderson_darling_p(DemandSeries.from_values([1, 2, 3, 4, 5, 6, 7]))
    with pytest.raises(DemandError, match="tied"):
        anderson_darling_p(DemandSeries.from_values([1, 2, 3, 4, 5, 6, 7, 7]))


def test_is_normal_threshold():
    assert is_normal(0.06)
    assert not is_normal(0.05)
    assert is_normal(0.02, significance=0.01)


# --------------------------------------------------------------------------- #
# Unmet demand ratio
# --------------------------------------------------------------------------- #


def test_unmet_demand_ratio_examples():
    assert unmet_demand_ratio(DemandSeries((100.0,), (90.0,))) == pytest.approx(0.1)
    assert unmet_demand_ratio(DemandSeries((100.0, 200.0), (100.0, 200.0))) == 0.0
    assert unmet_demand_ratio(DemandSeries((100.0, 100.0), (80.0, 120.0))) == pytest.approx(0.0)


@pytest.mark.parametrize("scale", [1e-3, 0.5, 7.5, 1e6])
def test_unmet_demand_ratio_ignores_units(scale):
    demand = (120_000.0, 95_000.0, 310_000.0, 40_000.0)
    sales = (100_000.0, 95_000.0, 250_500.0, 12_000.0)
    base = unmet_demand_ratio(DemandSeries(demand, sales))
    scaled = DemandSeries(tuple(d * scale for d in demand), tuple(v * scale for v in sales))
    assert unmet_demand_ratio(scaled) == pytest.approx(base, rel=1e-12)


def test_unmet_demand_ratio_errors():
    with pytest.raises(DemandError, match="period 1"):
        unmet_demand_ratio(DemandSeries((100.0, 0.0), (90.0, 0.0)))
    with pytest.raises(DemandError, match="sales"):
        unmet_demand_ratio(SERIES_2013)


def test_demand_series_validation():
    with pytest.raises(DemandError, match="at least one"):
        DemandSeries(())
    with pytest.raises(DemandError, match="period 0"):
        DemandSeries((-1.0,))
    with pytest.raises(DemandError, match="does not match"):
        DemandSeries((1.0, 2.0), (1.0,))


# --------------------------------------------------------------------------- #
# Report
# --------------------------------------------------------------------------- #


def test_demand_report_keys_and_values():
    report = demand_report(SERIES_2013, thresholds=[377_721.0, 625_000.0])
    assert report["n"] == 12  # noqa: PLR2004
    assert report["d_ins"] is None
    assert report["mu"] == pytest.approx(397_058, abs=1)
    assert report["ad_p"] == pytest.approx(0.609, abs=0.05)
    assert report["normal_at_5pct"] is True
    assert [t["threshold_kg"] for t in report["tail"]] == [377_721.0, 625_000.0]
    assert report["tail"][0]["probability"] == pytest.approx(0.6072, abs=0.001)


def test_demand_report_short_series_skips_ad(caplog):
    series = DemandSeries.from_values([10.0, 12.0, 11.0], [9.0, 12.0, 11.0])
    with caplog.at_level(logging.WARNING, logger="millrun.demand"):
        report = demand_report(series)
    assert report["ad_p"] is None
    assert report["normal_at_5pct"] is None
    assert report["d_ins"] == pytest.approx(0.1 / 3)
    assert "Anderson-Darling" in caplog.text
