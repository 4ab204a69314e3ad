"""Misreporting diagnostics from the sample autocorrelation function.

For a latent AR(1) the observed ACF is rho_Y(k) = c * alpha^k, so
log(rho_Y(k)) is linear in k with intercept log(c). c < 1 under misreporting,
hence a significantly nonzero intercept of the OLS regression of log sample
autocorrelations on the lag is evidence that the recorded series is a
distorted version of the latent one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DataError
from .series import Series, as_series


def _acf_array(values: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased-denominator sample ACF; NaN entries are excluded pairwise.

    On a complete series this is exactly the textbook estimator that divides
    every lag by n. With gaps, each lag's cross products are averaged over
    the available pairs and rescaled by (n_obs - k) / n_obs, which reduces to
    the same thing when nothing is missing but does not shrink toward zero
    under systematic missingness. Lags with no available pairs come back as
    0; values are clipped to [-1, 1].
    """
    obs = ~np.isnan(values)
    n_obs = int(obs.sum())
    if n_obs < 2:
        raise DataError("need at least 2 non-missing values for an ACF")
    centered = np.where(obs, values - values[obs].mean(), 0.0)
    var0 = float(np.sum(centered[obs] ** 2)) / n_obs
    if var0 == 0.0:
        raise DataError("series is constant; autocorrelation undefined")
    rho = np.empty(max_lag + 1)
    rho[0] = 1.0
    for k in range(1, max_lag + 1):
        both = obs[:-k] & obs[k:]
        n_pairs = int(both.sum())
        if n_pairs == 0 or n_obs <= k:
            rho[k] = 0.0
            continue
        mean_prod = float(np.sum(centered[:-k][both] * centered[k:][both])) / n_pairs
        rho[k] = mean_prod * (n_obs - k) / n_obs / var0
    return np.clip(rho, -1.0, 1.0)


@dataclass(frozen=True)
class AcfEstimate:
    """Sample autocorrelations rho(0..max_lag) of a series.

    ``n`` is the number of non-missing observations used.
    """

    lags: np.ndarray
    rho: np.ndarray
    n: int


@dataclass(frozen=True)
class DetectionReport:
    intercept: float
    slope: float
    intercept_se: float
    slope_se: float
    p_value: float
    lags_used: tuple[int, ...]
    verdict: bool
    applicable: bool
    alpha_level: float
    message: str = ""


def default_max_lag(n: int) -> int:
    return min(10, n // 4)


def sample_acf(y: Series | np.ndarray, max_lag: int) -> AcfEstimate:
    """Standard biased-denominator sample ACF with pairwise exclusion of NaNs."""
    series = as_series(y)
    if max_lag < 0:
        raise DataError("max_lag must be >= 0")
    if max_lag >= len(series) / 2:
        raise DataError(f"max_lag {max_lag} must be below half the series length {len(series)}")
    rho = _acf_array(series.values, max_lag)
    return AcfEstimate(lags=np.arange(max_lag + 1), rho=rho, n=series.n_observed)


def log_acf_regression(acf: AcfEstimate, alpha_level: float = 0.05, min_lags: int = 3) -> DetectionReport:
    """OLS of log sample autocorrelations on the lag.

    Lags enter in order 1, 2, ... and stop at the first non-positive
    autocorrelation (its log is undefined). The intercept's two-sided t-test
    uses ordinary OLS standard errors; because the ACF estimates are
    themselves correlated this is an approximation, and the empirical size
    is what the calibration tests measure. When the fitted slope is
    non-negative the geometric-decay reading breaks down and the report is
    marked not applicable instead of issuing a verdict.
    """
    usable = []
    for k in range(1, acf.lags[-1] + 1):
        if acf.rho[k] <= 0:
            break
        usable.append(k)
    if len(usable) < min_lags:
        raise DataError(
            "insufficient positive autocorrelation for AR(1) log-regression "
            f"(need {min_lags} leading positive lags, found {len(usable)})"
        )
    ks = np.asarray(usable, dtype=float)
    logr = np.log(acf.rho[usable])
    n = ks.size
    X = np.column_stack([np.ones(n), ks])
    coef, *_ = np.linalg.lstsq(X, logr, rcond=None)
    fitted = X @ coef
    dof = n - 2
    s2 = float(np.sum((logr - fitted) ** 2) / dof) if dof > 0 else np.inf
    xtx_inv = np.linalg.inv(X.T @ X)
    se = np.sqrt(np.maximum(s2 * np.diag(xtx_inv), 0.0))
    intercept, slope = float(coef[0]), float(coef[1])
    intercept_se = float(se[0])
    if dof > 0 and intercept_se > 0:
        t_stat = intercept / intercept_se
        p_value = float(2 * stats.t.sf(abs(t_stat), dof))
    else:
        p_value = float("nan")
    applicable = slope < 0
    verdict = bool(applicable and np.isfinite(p_value) and p_value < alpha_level)
    message = "" if applicable else (
        "diagnostic not applicable: fitted slope is non-negative, "
        "so the ACF does not decay like a stationary AR(1)"
    )
    return DetectionReport(
        intercept=intercept,
        slope=slope,
        intercept_se=intercept_se,
        slope_se=float(se[1]),
        p_value=p_value,
        lags_used=tuple(usable),
        verdict=verdict,
        applicable=applicable,
        alpha_level=alpha_level,
        message=message,
    )


def detect_misreporting(
    y: Series | np.ndarray,
    max_lag: int | None = None,
    alpha_level: float = 0.05,
) -> tuple[AcfEstimate, DetectionReport]:
    """Convenience pipeline: sample ACF at the default lag range + regression."""
    series = as_series(y)
    if max_lag is None:
        max_lag = default_max_lag(len(series))
    acf = sample_acf(series, max_lag)
    return acf, log_acf_regression(acf, alpha_level=alpha_level)
