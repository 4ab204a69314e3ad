import math

import numpy as np
import pytest

from misreport import (
    AcfEstimate,
    ArmaParams,
    DataError,
    MisreportModel,
    Series,
    acf_damping_factor,
    detect_misreporting,
    log_acf_regression,
    sample_acf,
    simulate,
    simulate_observed,
)

AR1 = ArmaParams(alpha=(0.5,), mu_eps=1.0, sigma2_eps=1.0)
MIS = MisreportModel(arma=AR1, q=0.3, omega=0.5)


def test_sample_acf_white_noise_is_small():
    rng = np.random.default_rng(0)
    y = Series(rng.normal(size=10_000))
    acf = sample_acf(y, 10)
    assert acf.rho[0] == 1.0
    assert np.all(np.abs(acf.rho[1:]) < 4 / math.sqrt(10_000))


def test_sample_acf_ar1():
    y = simulate(AR1, 100_000, seed=1)
    acf = sample_acf(y, 3)
    assert acf.rho[1] == pytest.approx(0.5, abs=0.02)


def test_sample_acf_scale_invariant():
    y = simulate(AR1, 2000, seed=2)
    a = sample_acf(y, 10)
    b = sample_acf(Series(2.0 * y.values), 10)
    assert a.rho == pytest.approx(b.rho, abs=1e-12)


def test_sample_acf_bounded_by_one():
    y = simulate(AR1, 500, seed=3)
    acf = sample_acf(y, 20)
    assert np.all(np.abs(acf.rho) <= 1.0)


def test_sample_acf_excludes_missing_pairwise():
    vals = simulate(AR1, 4000, seed=4).values.copy()
    vals[::7] = np.nan
    acf = sample_acf(Series(vals), 5)
    assert acf.n == int((~np.isnan(vals)).sum())
    assert acf.rho[1] == pytest.approx(0.5, abs=0.05)


def test_sample_acf_rejects_constant():
    with pytest.raises(DataError):
        sample_acf(Series(np.full(100, 2.0)), 5)


def test_sample_acf_rejects_large_lag():
    with pytest.raises(DataError):
        sample_acf(Series(np.arange(20.0)), 10)


def test_log_regression_noiseless_identity():
    c, alpha = 0.7, 0.5
    lags = np.arange(0, 11)
    rho = np.concatenate([[1.0], c * alpha ** lags[1:]])
    report = log_acf_regression(AcfEstimate(lags=lags, rho=rho, n=1000))
    assert report.intercept == pytest.approx(math.log(c), abs=1e-10)
    assert report.slope == pytest.approx(math.log(alpha), abs=1e-10)
    assert report.lags_used == tuple(range(1, 11))


def test_log_regression_stops_at_first_nonpositive():
    lags = np.arange(0, 8)
    rho = np.array([1.0, 0.5, 0.25, 0.12, -0.01, 0.06, 0.03, 0.01])
    report = log_acf_regression(AcfEstimate(lags=lags, rho=rho, n=500))
    assert report.lags_used == (1, 2, 3)


def test_log_regression_insufficient_lags():
    lags = np.arange(0, 6)
    rho = np.array([1.0, 0.4, -0.02, 0.3, 0.2, 0.1])
    with pytest.raises(DataError, match="insufficient positive autocorrelation"):
        log_acf_regression(AcfEstimate(lags=lags, rho=rho, n=500))


def test_log_regression_not_applicable_when_acf_grows():
    lags = np.arange(0, 5)
    rho = np.array([1.0, 0.1, 0.2, 0.4, 0.8])
    report = log_acf_regression(AcfEstimate(lags=lags, rho=rho, n=500))
    assert not report.applicable
    assert not report.verdict
    assert "not applicable" in report.message


def test_verdict_scale_invariant():
    s = simulate_observed(MIS, 2000, seed=9)
    _, a = detect_misreporting(s.y)
    _, b = detect_misreporting(Series(100.0 * s.y.values))
    assert a.verdict == b.verdict
    assert a.p_value == pytest.approx(b.p_value, rel=1e-9)


def test_misreported_series_show_negative_intercept():
    log_c = math.log(acf_damping_factor(MIS))
    rejections = 0
    intercepts = []
    for seed in range(40):
        s = simulate_observed(MIS, 2000, seed=300 + seed)
        try:
            _, report = detect_misreporting(s.y)
        except DataError:
            continue
        intercepts.append(report.intercept)
        rejections += report.verdict
    mean_int = float(np.mean(intercepts))
    # the intercept points at log(c) (within the log-ACF noise floor) and the
    # diagnostic fires far above its nominal size
    assert mean_int < -0.3
    assert abs(mean_int - log_c) < 0.5
    assert rejections >= 0.25 * len(intercepts)


def test_plain_series_rarely_reject():
    rejections, total = 0, 0
    for seed in range(40):
        y = simulate(AR1, 1000, seed=400 + seed)
        try:
            _, report = detect_misreporting(y, max_lag=5)
        except DataError:
            continue
        total += 1
        rejections += report.verdict
    assert total >= 30
    assert rejections <= 0.15 * total
