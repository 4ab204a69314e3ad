"""The misreported-series model.

A latent stationary ARMA process x_t is recorded as

    y_t = x_t       with probability 1 - omega
    y_t = q * x_t   with probability omega,

with the Bernoulli draws independent of the latent process. q is the
misreporting intensity (q < 1: underreporting, q > 1: overreporting) and
omega the misreporting frequency. This module provides forward simulation,
closed-form moments of the observed process, the ACF damping constant, the
iterative estimation algorithm and the latent-series reconstruction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import arma
from .arma import ArmaFit, ArmaParams
from .errors import DataError, EstimationError, InvalidParamsError
from .mixture import (
    MixtureParams,
    Responsibilities,
    em_fit,
    em_fit_weights_only,
    label_components,
    single_gaussian_loglik,
)
from .seeds import child_seed
from .series import Series, as_series


@dataclass(frozen=True)
class MisreportModel:
    """Latent ARMA law plus misreporting intensity q and frequency omega."""

    arma: ArmaParams
    q: float
    omega: float

    def __post_init__(self):
        if not (self.q > 0 and math.isfinite(self.q)):
            raise InvalidParamsError(f"q must be positive, got {self.q}")
        if not (0.0 <= self.omega <= 1.0):
            raise InvalidParamsError(f"omega must be in [0,1], got {self.omega}")

    @property
    def identifiable(self) -> bool:
        """False when omega is at a boundary or q = 1 (y is then a plain ARMA)."""
        return not (self.omega in (0.0, 1.0) or self.q == 1.0)


def validate_model(model: MisreportModel) -> None:
    arma.require_valid(model.arma)


@dataclass(frozen=True)
class ObservedSample:
    """Joint draw of observed series, latent series and misreporting flags."""

    y: Series
    x: Series
    z: np.ndarray


def simulate_observed(model: MisreportModel, n: int, seed, burn_in: int | None = None) -> ObservedSample:
    """Simulate the latent path, the Bernoulli flags and the recorded series.

    ``seed`` must be an int or SeedSequence; the latent-path and flag streams
    are derived from it by a stateless split, so equal seeds always give
    equal samples.
    """
    validate_model(model)
    if n < 1:
        raise InvalidParamsError("n must be >= 1")
    seed_x = child_seed(seed, 0)
    seed_z = child_seed(seed, 1)
    x = arma.simulate(model.arma, n, seed_x, burn_in=burn_in)
    z = (np.random.default_rng(seed_z).random(n) < model.omega).astype(np.int8)
    y = np.where(z == 1, model.q * x.values, x.values)
    return ObservedSample(y=Series(y), x=x, z=z)


def _latent_moments(model: MisreportModel, exact_latent: bool) -> tuple[float, float]:
    if exact_latent:
        mean = arma.stationary_mean(model.arma)
        var = arma.stationary_variance_exact(model.arma)
    else:
        mean = model.arma.mu_eps / (1.0 - sum(model.arma.alpha))
        var = arma.stationary_variance_closed_form(model.arma)
    return mean, var


def _observed_moments(mean_x: float, var_x: float, q: float, omega: float) -> tuple[float, float]:
    shrink = 1.0 - omega + q * omega
    mean_y = mean_x * shrink
    var_y = (var_x + mean_x ** 2) * (1.0 + omega * (q * q - 1.0)) - (mean_x * shrink) ** 2
    return mean_y, var_y


def observed_mean(model: MisreportModel, exact_latent: bool = True) -> float:
    """Mean of the recorded process: E(x_t) * (1 - omega + q omega).

    With ``exact_latent=False`` the latent mean is replaced by the shortcut
    mu_eps / (1 - sum alpha), which drops the moving-average factor
    (1 + sum theta) and is exact only when r = 0.
    """
    validate_model(model)
    mean_x, _ = _latent_moments(model, exact_latent)
    return mean_x * (1.0 - model.omega + model.q * model.omega)


def observed_variance(model: MisreportModel, exact_latent: bool = True) -> float:
    """Variance of the recorded process.

    V(y) = (V(x) + E(x)^2)(1 + omega (q^2 - 1)) - E(x)^2 (1 - omega + q omega)^2.
    ``exact_latent`` chooses between the exact latent moments (oracle mode)
    and the pure-AR(1)/pure-MA closed-form shortcuts.
    """
    validate_model(model)
    mean_x, var_x = _latent_moments(model, exact_latent)
    return _observed_moments(mean_x, var_x, model.q, model.omega)[1]


def acf_damping_factor(model: MisreportModel, form: str = "moments", exact_latent: bool = True) -> float:
    """Constant c with rho_Y(k) = c * rho_X(k) for every lag k >= 1.

    form="moments" (default) evaluates
        c = V(x)(1 - omega + q omega)^2 / V(y)
    from the latent moments. form="ar1_expanded" reproduces an alternative
    AR(1)-only algebraic expansion that normalizes the squared-mean term
    inside the second factor by (1 - alpha^2) instead of (1 - alpha)^2; the
    two disagree whenever mu_eps != 0 and are kept side by side on purpose.
    """
    validate_model(model)
    if form == "moments":
        mean_x, var_x = _latent_moments(model, exact_latent)
        var_y = _observed_moments(mean_x, var_x, model.q, model.omega)[1]
        if var_y <= 0:
            raise InvalidParamsError("observed variance must be positive")
        return var_x * (1.0 - model.omega + model.q * model.omega) ** 2 / var_y
    if form == "ar1_expanded":
        if model.arma.p != 1 or model.arma.r != 0:
            raise InvalidParamsError("form='ar1_expanded' is defined for AR(1) only")
        a = model.arma.alpha[0]
        mu, s2 = model.arma.mu_eps, model.arma.sigma2_eps
        q, w = model.q, model.omega
        shrink = 1.0 - w + q * w
        bracket = (s2 / (1 - a * a) + mu * mu / (1 - a * a)) * (1.0 + w * (q * q - 1.0)) \
            - shrink ** 2 * mu * mu / (1 - a) ** 2
        return shrink ** 2 * s2 / ((1 - a * a) * bracket)
    raise ValueError(f"unknown form {form!r}")


def reconstruct(y: Series | np.ndarray, q: float, z_hat: np.ndarray) -> Series:
    """Invert the misreporting map: x_hat = y where z=0, y / q where z=1.

    Missing entries stay missing.
    """
    series = as_series(y)
    if not (q > 0 and math.isfinite(q)):
        raise InvalidParamsError(f"q must be positive, got {q}")
    z = np.asarray(z_hat)
    if z.shape != series.values.shape:
        raise DataError("z_hat length does not match the series")
    x = np.where(z == 1, series.values / q, series.values)
    return series.with_values(x)


@dataclass(frozen=True)
class EstimateOptions:
    direction: str = "under"
    tolerance: float = 1e-6
    max_iterations: int = 100
    seed: int = 0
    q_bounds: tuple[float, float] = (1e-3, 1e3)
    omega_bounds: tuple[float, float] = (1e-6, 1.0 - 1e-6)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    q: float
    omega: float
    alpha: tuple[float, ...]
    theta: tuple[float, ...]
    distance: float


@dataclass(frozen=True)
class FitResult:
    """Point estimates plus everything needed to audit the iteration."""

    model: MisreportModel
    responsibilities: Responsibilities
    z_hat: np.ndarray
    x_hat: Series
    trace: tuple[IterationRecord, ...]
    converged: bool
    iterations: int
    flags: tuple[str, ...]
    options: EstimateOptions
    arma_fit: ArmaFit


def _side_profile(values: np.ndarray, index, p: int, r: int, fallback_sd: float):
    """Process mean / stationary sd of one sub-series, with moment fallback.

    Returns (mean, sd, fit-or-None). The ARMA fit needs max(p, r) + 5 points;
    thinner sides fall back to their sample moments.
    """
    observed = values[~np.isnan(values)]
    if observed.size >= max(p, r) + 5:
        try:
            fit = arma.fit(Series(values, index), p, r, multi_start=False)
            sd = math.sqrt(arma.stationary_variance_exact(fit.params))
            return fit.process_mean, sd, fit
        except (DataError, InvalidParamsError):
            pass
    if observed.size == 0:
        return math.nan, math.nan, None
    mean = float(observed.mean())
    sd = float(observed.std()) if observed.size > 1 else 0.0
    if sd <= 0:
        sd = max(1e-8 * fallback_sd, 1e-300)
    return mean, sd, None


def estimate(
    y: Series | np.ndarray,
    p: int,
    r: int,
    options: EstimateOptions | None = None,
    **overrides,
) -> FitResult:
    """Fit the misreporting model by the iterative marginal-mixture algorithm.

    The steps per sweep: split the series by the current hard indicators,
    fit the ARMA law to each half (the other half marked missing), update
    q from the ratio of fitted process means, re-estimate omega by the
    weight-only mixture fit with components pinned to the two fitted laws,
    refresh the posteriors/indicators, and stop once the squared distance
    between consecutive parameter vectors (q, omega, alpha, theta) falls
    below the tolerance. The latent series is then reconstructed and the
    final ARMA parameters are re-estimated from it.
    """
    if options is None:
        options = EstimateOptions(**overrides)
    elif overrides:
        options = replace(options, **overrides)
    series = as_series(y)
    if series.n_observed < 30:
        raise DataError(f"need at least 30 non-missing values, got {series.n_observed}")
    if max(p, r) + 5 > series.n_observed // 2:
        raise DataError("orders too large relative to the series length")

    obs_mask = series.observed_mask
    obs_values = series.values[obs_mask]
    overall_sd = float(obs_values.std())
    flags: list[str] = []

    # initialization: unconstrained mixture on the marginal
    mix = em_fit(obs_values, seed=options.seed)
    _, _, ll_single = single_gaussian_loglik(obs_values)
    aic_single = 2 * 2 - 2 * ll_single
    aic_mix = 2 * 5 - 2 * mix.loglik
    if aic_mix - aic_single > 2.0:
        # the marginal shows no mixture structure at all
        final_fit = arma.fit(series, p, r)
        model = MisreportModel(arma=final_fit.params, q=1.0, omega=0.0)
        resp = Responsibilities(np.zeros(obs_values.size))
        z_full = np.zeros(len(series), dtype=np.int8)
        return FitResult(
            model=model,
            responsibilities=resp,
            z_hat=z_full,
            x_hat=series.with_values(series.values.copy()),
            trace=(),
            converged=True,
            iterations=0,
            flags=("no_misreporting",),
            options=options,
            arma_fit=final_fit,
        )

    labeled = label_components(mix.params, options.direction)
    if labeled.q <= 0:
        raise EstimationError(
            f"initial intensity estimate is not positive (component means "
            f"{labeled.mixture.m1:.4g} and {labeled.mixture.m2:.4g} have opposite signs)"
        )
    q_lo, q_hi = options.q_bounds
    w_lo, w_hi = options.omega_bounds
    q_cur = float(np.clip(labeled.q, q_lo, q_hi))
    omega_cur = float(np.clip(labeled.omega, w_lo, w_hi))
    post = mix.responsibilities.posterior
    post = 1.0 - post if labeled.swapped else post
    resp = Responsibilities(post)
    z_obs = resp.hard_labels()

    alpha_cur = np.zeros(p)
    theta_cur = np.zeros(r)
    trace: list[IterationRecord] = []
    converged = False
    iterations = 0
    stop_flag = None

    for it in range(1, options.max_iterations + 1):
        iterations = it
        n_mis = int(z_obs.sum())
        n_true = z_obs.size - n_mis
        if n_mis == 0:
            # all entries labeled true-scale: a fixed point meaning no misreporting
            stop_flag = "no_misreporting"
            break
        if n_true == 0:
            # everything labeled misreported: q is no longer identifiable
            stop_flag = "all_misreported"
            break

        # split: each half keeps its own entries, the rest marked missing
        z_full = np.zeros(len(series), dtype=np.int8)
        z_full[obs_mask] = z_obs
        vals_true = np.where(obs_mask & (z_full == 0), series.values, np.nan)
        vals_mis = np.where(obs_mask & (z_full == 1), series.values, np.nan)
        m_true, s_true, fit_true = _side_profile(vals_true, series.index, p, r, overall_sd)
        m_mis, s_mis, fit_mis = _side_profile(vals_mis, series.index, p, r, overall_sd)

        if abs(m_true) <= 1e-12 * max(s_true, 1e-300):
            raise EstimationError("fitted true-scale mean is ~0; intensity update undefined")
        q_new = m_mis / m_true
        if q_new <= 0:
            raise EstimationError(
                f"intensity update gave a non-positive ratio ({m_mis:.4g} / {m_true:.4g}); "
                "the two sub-series have means of opposite signs"
            )
        if q_new < q_lo or q_new > q_hi:
            flags.append("q_clamped")
        q_new = float(np.clip(q_new, q_lo, q_hi))

        # coefficient tracker: observation-weighted average of the half fits
        weights = []
        coef_alpha = []
        coef_theta = []
        for side_fit, n_side in ((fit_true, n_true), (fit_mis, n_mis)):
            if side_fit is not None:
                weights.append(n_side)
                coef_alpha.append(side_fit.params.alpha)
                coef_theta.append(side_fit.params.theta)
        if weights:
            wsum = float(sum(weights))
            alpha_new = np.sum([w * np.asarray(a) for w, a in zip(weights, coef_alpha)], axis=0) / wsum if p else np.zeros(0)
            theta_new = np.sum([w * np.asarray(t) for w, t in zip(weights, coef_theta)], axis=0) / wsum if r else np.zeros(0)
        else:
            alpha_new, theta_new = alpha_cur, theta_cur

        components = MixtureParams(
            w1=float(np.clip(1.0 - omega_cur, 1e-6, 1 - 1e-6)),
            m1=m_true, s1=s_true, m2=m_mis, s2=s_mis,
        )
        wfit = em_fit_weights_only(obs_values, components)
        omega_new = float(np.clip(1.0 - wfit.w1, w_lo, w_hi))
        resp = wfit.responsibilities
        z_obs = resp.hard_labels()

        if it == 1:
            distance = math.nan
        else:
            distance = (
                (q_new - q_prev) ** 2
                + (omega_new - omega_prev) ** 2
                + float(np.sum((np.asarray(alpha_new) - np.asarray(alpha_prev)) ** 2))
                + float(np.sum((np.asarray(theta_new) - np.asarray(theta_prev)) ** 2))
            )
        trace.append(IterationRecord(it, q_new, omega_new, tuple(alpha_new), tuple(theta_new), distance))
        q_prev, omega_prev, alpha_prev, theta_prev = q_new, omega_new, alpha_new, theta_new
        q_cur, omega_cur, alpha_cur, theta_cur = q_new, omega_new, alpha_new, theta_new
        if it >= 2 and distance < options.tolerance:
            converged = True
            break

    if stop_flag:
        flags.append("degenerate_split")
        flags.append(stop_flag)
    if omega_cur <= w_lo or omega_cur >= w_hi:
        flags.append("omega_boundary")
    elif not 0.02 <= omega_cur <= 0.98:
        # close to omega in {0,1}: y is indistinguishable from a plain ARMA
        flags.append("omega_near_boundary")

    z_full = np.zeros(len(series), dtype=np.int8)
    z_full[obs_mask] = z_obs
    x_hat = reconstruct(series, q_cur, z_full)
    final_fit = arma.fit(x_hat, p, r)
    flags.extend(f"latent_fit_{f}" for f in final_fit.flags)
    model = MisreportModel(arma=final_fit.params, q=q_cur, omega=omega_cur)
    if not model.identifiable:
        flags.append("non_identifiable")
    return FitResult(
        model=model,
        responsibilities=resp,
        z_hat=z_full,
        x_hat=x_hat,
        trace=tuple(trace),
        converged=converged,
        iterations=iterations,
        flags=tuple(dict.fromkeys(flags)),
        options=options,
        arma_fit=final_fit,
    )
