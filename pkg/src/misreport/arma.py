"""Gaussian ARMA(p, r) processes with nonzero innovation mean.

Covers representation and validation, simulation, exact second-order theory
(autocovariances via the stationary state-space covariance) and exact maximum
likelihood fitting with missing-data support. The innovation convention is

    x_t = alpha_1 x_{t-1} + ... + alpha_p x_{t-p}
        + eps_t + theta_1 eps_{t-1} + ... + theta_r eps_{t-r},

with eps_t i.i.d. N(mu_eps, sigma2_eps). The stationary mean is therefore
mu_eps * (1 + sum(theta)) / (1 - sum(alpha)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import signal
from scipy.optimize import minimize

from . import _filter
from .errors import DataError, InvalidParamsError
from .series import Series, as_series

_PACF_CLIP = 0.98
_BOUNDARY_PACF = 0.9995


@dataclass(frozen=True)
class ArmaParams:
    """Orders, coefficients and innovation law of an ARMA(p, r) process."""

    alpha: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()
    mu_eps: float = 0.0
    sigma2_eps: float = 1.0

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        object.__setattr__(self, "alpha", tuple(float(a) for a in alpha))
        object.__setattr__(self, "theta", tuple(float(t) for t in theta))
        if not math.isfinite(self.mu_eps):
            raise InvalidParamsError("mu_eps must be finite")
        if not (self.sigma2_eps > 0 and math.isfinite(self.sigma2_eps)):
            raise InvalidParamsError(f"sigma2_eps must be positive, got {self.sigma2_eps}")

    @property
    def p(self) -> int:
        return len(self.alpha)

    @property
    def r(self) -> int:
        return len(self.theta)


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    message: str

    def __bool__(self) -> bool:
        return self.ok


def validate(params: ArmaParams) -> ValidationResult:
    """Check stationarity (AR roots) and invertibility (MA roots).

    Total function: never raises for any coefficient values.
    """
    problems = []
    for name, coefs, sign in (("AR", params.alpha, -1.0), ("MA", params.theta, +1.0)):
        coefs = np.asarray(coefs, dtype=float)
        if coefs.size == 0 or not np.any(coefs):
            continue
        # polynomial 1 -+ c_1 z - ... ; numpy wants highest degree first.
        # Negligible leading coefficients only contribute roots of enormous
        # modulus (always outside the unit circle) but overflow the companion
        # matrix, so drop them before computing roots.
        poly = np.concatenate([sign * coefs[::-1], [1.0]])
        while poly.size > 1 and abs(poly[0]) < 1e-12:
            poly = poly[1:]
        if poly.size < 2:
            continue
        roots = np.roots(poly)
        if roots.size and np.min(np.abs(roots)) <= 1.0:
            problems.append(
                f"{name} root on or inside unit circle (min modulus "
                f"{np.min(np.abs(roots)):.6g})"
            )
    if problems:
        return ValidationResult(False, "; ".join(problems))
    return ValidationResult(True, "stationary and invertible")


def require_valid(params: ArmaParams) -> None:
    res = validate(params)
    if not res.ok:
        raise InvalidParamsError(res.message)


def stationary_mean(params: ArmaParams) -> float:
    """Exact stationary mean mu_eps (1 + sum theta) / (1 - sum alpha)."""
    return params.mu_eps * (1.0 + sum(params.theta)) / (1.0 - sum(params.alpha))


def mu_eps_for_mean(alpha: Sequence[float], theta: Sequence[float], mean: float) -> float:
    """Innovation mean that gives the process the requested stationary mean."""
    return mean * (1.0 - sum(alpha)) / (1.0 + sum(theta))


def default_burn_in(params: ArmaParams) -> int:
    """Presample length long enough for the zero-start transient to vanish."""
    if params.p == 0 or not any(params.alpha):
        return max(params.r, 1)
    poly = np.concatenate([-np.asarray(params.alpha[::-1]), [1.0]])
    roots = np.roots(poly)
    if roots.size == 0:
        return 100 + params.r
    radius = 1.0 / np.min(np.abs(roots))
    if not 0.0 < radius < 1.0:
        return 100 + params.r
    n = int(np.ceil(np.log(1e-10) / np.log(radius)))
    return min(100000, max(100, n)) + params.r


def simulate(params: ArmaParams, n: int, seed, burn_in: int | None = None) -> Series:
    """Draw n consecutive values of a stationary realization.

    Deterministic given ``seed`` (int, SeedSequence or Generator). The
    recursion starts from zero initial conditions and ``burn_in`` values are
    discarded; the default burn-in makes the residual transient < 1e-10.
    """
    require_valid(params)
    if n < 1:
        raise InvalidParamsError("n must be >= 1")
    if burn_in is None:
        burn_in = default_burn_in(params)
    rng = np.random.default_rng(seed)
    eps = rng.normal(params.mu_eps, math.sqrt(params.sigma2_eps), size=n + burn_in)
    b = np.concatenate([[1.0], np.asarray(params.theta, dtype=float)])
    a = np.concatenate([[1.0], -np.asarray(params.alpha, dtype=float)])
    x = signal.lfilter(b, a, eps)
    return Series(x[burn_in:])


def _system_matrices(params: ArmaParams):
    alpha = np.asarray(params.alpha, dtype=float)
    theta = np.asarray(params.theta, dtype=float)
    return _filter._build_system(alpha, theta)


def theoretical_acvf(params: ArmaParams, max_lag: int) -> np.ndarray:
    """Exact autocovariances gamma(0..max_lag)."""
    require_valid(params)
    if max_lag < 0:
        raise InvalidParamsError("max_lag must be >= 0")
    T, R = _system_matrices(params)
    P0 = _filter._stationary_cov(T, R)
    g = P0[:, 0].copy()
    out = np.empty(max_lag + 1)
    out[0] = g[0]
    for k in range(1, max_lag + 1):
        g = T @ g
        out[k] = g[0]
    return out * params.sigma2_eps


def theoretical_acf(params: ArmaParams, max_lag: int) -> np.ndarray:
    """Exact autocorrelations rho(0..max_lag); rho(0) = 1."""
    acvf = theoretical_acvf(params, max_lag)
    return acvf / acvf[0]


def stationary_variance_exact(params: ArmaParams) -> float:
    """Exact Var(x_t) from the stationary state-space covariance."""
    return float(theoretical_acvf(params, 0)[0])


def stationary_variance_closed_form(params: ArmaParams) -> float:
    """Closed-form shortcut sigma2 (1 + sum theta^2) / (1 - sum alpha^2).

    Exact for pure AR(1) and pure MA processes; for mixed or higher-order
    models it ignores AR-MA cross terms and is only an approximation.
    """
    num = params.sigma2_eps * (1.0 + sum(t * t for t in params.theta))
    den = 1.0 - sum(a * a for a in params.alpha)
    if den <= 0:
        raise InvalidParamsError("sum of squared AR coefficients must be < 1")
    return num / den


@dataclass(frozen=True)
class ArmaFit:
    """Result of maximum-likelihood fitting."""

    params: ArmaParams
    process_mean: float
    loglik: float
    aic: float
    residuals: Series
    converged: bool
    iterations: int
    message: str = ""
    trend_coefs: tuple[float, ...] = ()
    flags: tuple[str, ...] = ()

    @property
    def n_free_params(self) -> int:
        return self.params.p + self.params.r + 2 + len(self.trend_coefs)


def _pacf_from_sample_acf(rho: np.ndarray, p: int) -> np.ndarray:
    """Durbin-Levinson partial autocorrelations from sample ACF values."""
    phi_prev = np.zeros(0)
    pacf = np.zeros(p)
    for k in range(1, p + 1):
        if k == 1:
            num = rho[1]
            den = 1.0
        else:
            num = rho[k] - phi_prev @ rho[k - 1:0:-1]
            den = 1.0 - phi_prev @ rho[1:k]
        pk = num / den if abs(den) > 1e-12 else 0.0
        pk = float(np.clip(pk, -_PACF_CLIP, _PACF_CLIP))
        pacf[k - 1] = pk
        phi = np.empty(k)
        phi[:k - 1] = phi_prev - pk * phi_prev[::-1]
        phi[k - 1] = pk
        phi_prev = phi
    return pacf


def _starting_points(y_std: np.ndarray, p: int, r: int, k_trend: int, multi_start: bool):
    from .detect import _acf_array  # local import; detect has no arma dependency

    n_par = p + r + 1 + k_trend
    starts = [np.zeros(n_par)]
    if p > 0:
        max_lag = min(p + r + 1, max(1, np.sum(~np.isnan(y_std)) // 2 - 1))
        if max_lag >= 1:
            try:
                rho = _acf_array(y_std, max_lag)
                x0 = np.zeros(n_par)
                if p == 1 and r >= 1 and max_lag >= 2 and abs(rho[1]) > 1e-8:
                    # moment start for mixed models: gamma(2)/gamma(1)
                    a0 = np.clip(rho[2] / rho[1], -_PACF_CLIP, _PACF_CLIP)
                    x0[0] = np.arctanh(a0)
                else:
                    lags = min(p, max_lag)
                    pacf = _pacf_from_sample_acf(rho, lags)
                    x0[:lags] = np.arctanh(pacf)
                starts.insert(0, x0)
            except (ValueError, FloatingPointError):
                pass
    if not multi_start and len(starts) > 1:
        starts = starts[:1]
    return starts


def fit(
    y: Series | np.ndarray,
    p: int,
    r: int,
    trend: np.ndarray | None = None,
    tol: float = 1e-8,
    max_iter: int = 500,
    multi_start: bool = True,
) -> ArmaFit:
    """Exact Gaussian maximum likelihood via the state-space filter.

    Missing entries (NaN) only skip the measurement update, so any missing
    pattern is allowed as long as max(p, r) + 5 values remain. ``trend`` is
    an optional n-by-k design matrix of deterministic regressors fitted
    jointly (regression with ARMA errors). The optimizer searches partial
    autocorrelations through tanh, so iterates stay inside the
    stationarity/invertibility region; sigma2 is profiled out.
    """
    series = as_series(y)
    if p < 0 or r < 0:
        raise InvalidParamsError("orders must be non-negative")
    n_obs = series.n_observed
    if n_obs < max(p, r) + 5:
        raise DataError(
            f"need at least {max(p, r) + 5} non-missing values to fit ARMA({p},{r}), got {n_obs}"
        )
    values = series.values
    obs = series.observed_mask
    center = float(values[obs].mean())
    scale = float(values[obs].std())
    if scale == 0.0:
        raise DataError("series is constant; ARMA likelihood is degenerate")
    y_std = (values - center) / scale
    y_filled = np.where(obs, y_std, 0.0)

    if trend is None:
        X = np.zeros((len(series), 0))
        x_scale = np.zeros(0)
    else:
        X = np.asarray(trend, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] != len(series):
            raise DataError("trend design matrix length does not match series")
        x_scale = X.std(axis=0)
        x_scale[x_scale == 0] = 1.0
        X = X / x_scale
    k_trend = X.shape[1]

    def objective(x):
        return _filter.concentrated_nll(x, y_filled, obs, X, p, r)

    best = None
    for x0 in _starting_points(np.where(obs, y_std, np.nan), p, r, k_trend, multi_start):
        res = minimize(
            objective,
            x0,
            method="L-BFGS-B",
            options={"maxiter": max_iter, "ftol": tol, "gtol": 1e-9},
        )
        if best is None or res.fun < best.fun:
            best = res
    assert best is not None

    x_opt = best.x
    u_ar = _filter.bounded_pacf(x_opt[:p])
    u_ma = _filter.bounded_pacf(x_opt[p:p + r])
    alpha = _filter.pacf_to_coef(u_ar)
    theta = -_filter.pacf_to_coef(u_ma)
    mean_std = x_opt[p + r]
    beta_std = x_opt[p + r + 1:]

    flags = []
    if p and np.max(np.abs(u_ar)) > _BOUNDARY_PACF:
        flags.append("ar_near_boundary")
    if r and np.max(np.abs(u_ma)) > _BOUNDARY_PACF:
        flags.append("ma_near_boundary")

    # final filter pass at the optimum for sigma2 and residuals
    e = y_filled - mean_std - X @ beta_std
    T, R = _filter._build_system(alpha, theta)
    P0 = _filter._stationary_cov(T, R)
    sum_log_f, ssq, nobs, v, _ = _filter.kalman_filter_pass(e, obs, T, R, P0)
    sigma2_std = max(ssq / nobs, 1e-300)
    loglik_std = -0.5 * (nobs * (_filter.LOG_2PI + 1.0 + np.log(sigma2_std)) + sum_log_f)
    loglik = float(loglik_std - nobs * math.log(scale))

    process_mean = center + scale * mean_std
    sigma2 = sigma2_std * scale * scale
    mu_eps = mu_eps_for_mean(alpha, theta, process_mean)
    params = ArmaParams(tuple(alpha), tuple(theta), mu_eps, sigma2)
    trend_coefs = tuple(beta_std * scale / x_scale) if k_trend else ()
    residuals = series.with_values(np.where(obs, v * scale, np.nan))
    n_free = p + r + 2 + k_trend
    return ArmaFit(
        params=params,
        process_mean=float(process_mean),
        loglik=loglik,
        aic=float(2 * n_free - 2 * loglik),
        residuals=residuals,
        converged=bool(best.success),
        iterations=int(best.nit),
        message=str(best.message),
        trend_coefs=trend_coefs,
        flags=tuple(flags),
    )


def loglik(params: ArmaParams, y: Series | np.ndarray, process_mean: float | None = None) -> float:
    """Exact Gaussian log-likelihood of given parameters on a series.

    ``process_mean`` defaults to the stationary mean implied by mu_eps.
    Missing entries contribute through the marginal of the observed ones.
    """
    require_valid(params)
    series = as_series(y)
    if process_mean is None:
        process_mean = stationary_mean(params)
    obs = series.observed_mask
    e = np.where(obs, series.values - process_mean, 0.0)
    T, R = _system_matrices(params)
    P0 = _filter._stationary_cov(T, R)
    sum_log_f, ssq, nobs, _, _ = _filter.kalman_filter_pass(e, obs, T, R, P0)
    s2 = params.sigma2_eps
    return float(-0.5 * (nobs * (_filter.LOG_2PI + math.log(s2)) + sum_log_f + ssq / s2))


def _nll_natural(xi: np.ndarray, series: Series, p: int, r: int) -> float:
    alpha = tuple(xi[:p])
    theta = tuple(xi[p:p + r])
    mean = xi[p + r]
    s2 = math.exp(xi[p + r + 1])
    try:
        params = ArmaParams(alpha, theta, 0.0, s2)
    except InvalidParamsError:
        return np.inf
    if not validate(params).ok:
        return np.inf
    return -loglik(params, series, process_mean=mean)


def coef_standard_errors(series: Series | np.ndarray, fit_result: ArmaFit) -> dict[str, float]:
    """Asymptotic standard errors from the numerically observed information.

    Hessian of the negative log-likelihood in natural coordinates
    (alpha, theta, mean, log sigma2) at the fitted optimum; entries that
    cannot be stabilized come back as NaN.
    """
    series = as_series(series)
    params = fit_result.params
    p, r = params.p, params.r
    xi = np.concatenate([
        params.alpha, params.theta,
        [fit_result.process_mean, math.log(params.sigma2_eps)],
    ])
    d = xi.size
    h = 1e-4 * np.maximum(1.0, np.abs(xi))
    H = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            ei = np.zeros(d); ei[i] = h[i]
            ej = np.zeros(d); ej[j] = h[j]
            fpp = _nll_natural(xi + ei + ej, series, p, r)
            fpm = _nll_natural(xi + ei - ej, series, p, r)
            fmp = _nll_natural(xi - ei + ej, series, p, r)
            fmm = _nll_natural(xi - ei - ej, series, p, r)
            H[i, j] = H[j, i] = (fpp - fpm - fmp + fmm) / (4 * h[i] * h[j])
    names = [f"alpha_{i+1}" for i in range(p)] + [f"theta_{j+1}" for j in range(r)] + ["mean", "log_sigma2"]
    ses = {}
    try:
        cov = np.linalg.inv(H)
        diag = np.diag(cov)
    except np.linalg.LinAlgError:
        diag = np.full(d, np.nan)
    for name, var in zip(names, diag):
        ses[name] = math.sqrt(var) if np.isfinite(var) and var > 0 else float("nan")
    return ses
