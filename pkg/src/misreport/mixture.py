"""Two-component Gaussian mixture estimation by EM.

Two variants are used by the misreporting estimator: the unconstrained fit
(initialization step) and the weight-only fit where both component laws are
pinned and only the mixing weight is re-estimated. Component 1 is the
"true-scale" component and component 2 the "misreported" one once
``label_components`` has oriented a fit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import MixtureDegeneracyError, NonIdentifiableError

_LOG_2PI = math.log(2.0 * math.pi)
_WEIGHT_CLIP = 1e-6


@dataclass(frozen=True)
class MixtureParams:
    """Weights, means and standard deviations of the two components."""

    w1: float
    m1: float
    s1: float
    m2: float
    s2: float

    def __post_init__(self):
        if not (0.0 < self.w1 < 1.0):
            raise NonIdentifiableError(f"w1 must be in (0,1), got {self.w1}")
        if self.s1 <= 0 or self.s2 <= 0:
            raise NonIdentifiableError("component standard deviations must be positive")

    @property
    def w2(self) -> float:
        return 1.0 - self.w1


@dataclass(frozen=True)
class Responsibilities:
    """Posterior probabilities of the second component, one per value."""

    posterior: np.ndarray

    def __post_init__(self):
        post = np.asarray(self.posterior, dtype=float)
        post.setflags(write=False)
        object.__setattr__(self, "posterior", post)

    def hard_labels(self, threshold: float = 0.5) -> np.ndarray:
        """Indicator of the second component; ties go to the second."""
        return (self.posterior >= threshold).astype(np.int8)


@dataclass(frozen=True)
class MixtureFit:
    params: MixtureParams
    responsibilities: Responsibilities
    loglik: float
    iterations: int
    converged: bool
    loglik_path: tuple[float, ...] = ()


@dataclass(frozen=True)
class WeightFit:
    w1: float
    responsibilities: Responsibilities
    loglik: float
    iterations: int
    converged: bool
    loglik_path: tuple[float, ...] = ()


@dataclass(frozen=True)
class LabeledMixture:
    """Mixture with component 1 = true scale, component 2 = misreported."""

    mixture: MixtureParams
    q: float
    omega: float
    swapped: bool


def _log_density(v, w, m1, s1, m2, s2):
    l1 = -0.5 * (((v - m1) / s1) ** 2) - math.log(s1) - 0.5 * _LOG_2PI + math.log(w)
    l2 = -0.5 * (((v - m2) / s2) ** 2) - math.log(s2) - 0.5 * _LOG_2PI + math.log(1.0 - w)
    return l1, l2


def _em_run(v, w, m1, s1, m2, s2, tol, max_iter, floor_var):
    prev_ll = -np.inf
    ll = -np.inf
    converged = False
    it = 0
    r2 = np.full(v.size, 1.0 - w)
    ll_path = []
    for it in range(1, max_iter + 1):
        l1, l2 = _log_density(v, w, m1, s1, m2, s2)
        ll = float(np.logaddexp(l1, l2).sum())
        ll_path.append(ll)
        with np.errstate(over="ignore"):
            r2 = 1.0 / (1.0 + np.exp(l1 - l2))
        if abs(ll - prev_ll) < tol * (abs(ll) + 1e-12):
            converged = True
            break
        prev_ll = ll
        r1 = 1.0 - r2
        n1 = r1.sum()
        n2 = r2.sum()
        if n1 <= 1e-12 or n2 <= 1e-12:
            return (w, m1, s1, m2, s2), r2, ll, it, False, True, ll_path
        w = float(np.clip(n1 / v.size, _WEIGHT_CLIP, 1.0 - _WEIGHT_CLIP))
        m1 = float((r1 * v).sum() / n1)
        m2 = float((r2 * v).sum() / n2)
        s1 = math.sqrt(max((r1 * (v - m1) ** 2).sum() / n1, floor_var))
        s2 = math.sqrt(max((r2 * (v - m2) ** 2).sum() / n2, floor_var))
    collapsed = (s1 * s1 <= floor_var * 1.01) or (s2 * s2 <= floor_var * 1.01)
    return (w, m1, s1, m2, s2), r2, ll, it, converged, collapsed, ll_path


def _ordered(params, r2):
    w, m1, s1, m2, s2 = params
    if (m1, s1) <= (m2, s2):
        return params, r2
    return (1.0 - w, m2, s2, m1, s1), 1.0 - r2


def em_fit(
    values: np.ndarray,
    init: MixtureParams | None = None,
    seed: int = 0,
    tol: float = 1e-8,
    max_iter: int = 1000,
    n_restarts: int = 5,
) -> MixtureFit:
    """Unconstrained two-component Gaussian mixture by EM.

    Runs from a median-split start plus ``n_restarts`` random restarts (all
    seeded) and keeps the best local maximizer; components come back ordered
    by mean. A run whose component variance collapses onto the floor
    (1e-10 times the data variance) is retried from a perturbed start up to
    5 times before being discarded.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 10:
        raise ValueError("need at least 10 values for a two-component mixture fit")
    if np.ptp(v) == 0.0:
        raise ValueError("values are all identical; mixture fit is degenerate")

    center = float(v.mean())
    scale = float(v.std())
    z = (v - center) / scale
    floor_var = 1e-10  # relative to unit data variance after standardization
    rng = np.random.default_rng(seed)

    def initial_points():
        if init is not None:
            yield ((1.0 - init.w2), (init.m1 - center) / scale, init.s1 / scale,
                   (init.m2 - center) / scale, init.s2 / scale)
            return
        med = np.median(z)
        lo, hi = z[z <= med], z[z > med]
        if hi.size == 0:
            lo, hi = z[z < med], z[z >= med]
        m1 = float(lo.mean()) if lo.size else -1.0
        m2 = float(hi.mean()) if hi.size else 1.0
        s1 = max(float(lo.std()), 1e-3) if lo.size > 1 else 0.5
        s2 = max(float(hi.std()), 1e-3) if hi.size > 1 else 0.5
        yield (0.5, m1, s1, m2, s2)
        for _ in range(n_restarts):
            i, j = rng.choice(z.size, size=2, replace=False)
            yield (
                float(rng.uniform(0.2, 0.8)),
                float(z[i]), float(np.exp(rng.uniform(-0.7, 0.3))),
                float(z[j]), float(np.exp(rng.uniform(-0.7, 0.3))),
            )

    best = None
    for start in initial_points():
        point = start
        for attempt in range(6):
            params, r2, ll, it, converged, collapsed, ll_path = _em_run(
                z, *point, tol=tol, max_iter=max_iter, floor_var=floor_var
            )
            if not collapsed:
                if best is None or ll > best[2]:
                    best = (params, r2, ll, it, converged, ll_path)
                break
            w0, m10, s10, m20, s20 = start
            point = (
                float(np.clip(w0 + rng.uniform(-0.2, 0.2), 0.05, 0.95)),
                m10 + rng.normal(0, 0.5), s10 * float(np.exp(rng.uniform(0, 0.7))),
                m20 + rng.normal(0, 0.5), s20 * float(np.exp(rng.uniform(0, 0.7))),
            )
    if best is None:
        raise MixtureDegeneracyError(
            "every EM run collapsed onto a zero-variance component despite perturbed restarts"
        )
    params, r2, ll, it, converged, ll_path = best
    (w, m1, s1, m2, s2), r2 = _ordered(params, r2)
    fitted = MixtureParams(
        w1=w,
        m1=center + scale * m1, s1=scale * s1,
        m2=center + scale * m2, s2=scale * s2,
    )
    # log-likelihood in original units
    shift = v.size * math.log(scale)
    return MixtureFit(fitted, Responsibilities(r2), float(ll - shift), it, converged,
                      tuple(x - shift for x in ll_path))


def em_fit_weights_only(
    values: np.ndarray,
    components: MixtureParams,
    tol: float = 1e-8,
    max_iter: int = 1000,
) -> WeightFit:
    """ML mixing weight with both component laws fixed.

    At convergence the weight of component 2 equals the mean of the
    posterior responsibilities. The weight is clipped to
    [1e-6, 1 - 1e-6] so boundary data cannot push it outside (0, 1).
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 10:
        raise ValueError("need at least 10 values for the weight-only mixture fit")
    scale = max(abs(components.s1), abs(components.s2))
    if (
        abs(components.m1 - components.m2) <= 1e-12 * max(scale, abs(components.m1))
        and abs(components.s1 - components.s2) <= 1e-12 * scale
    ):
        raise NonIdentifiableError(
            "fixed components are identical, so the mixing weight is not identifiable "
            "(the everything-misreported degenerate case)"
        )
    w = float(np.clip(components.w1, _WEIGHT_CLIP, 1.0 - _WEIGHT_CLIP))
    m1, s1, m2, s2 = components.m1, components.s1, components.m2, components.s2
    prev_ll = -np.inf
    ll = -np.inf
    converged = False
    it = 0
    r2 = np.full(v.size, 1.0 - w)
    ll_path = []
    for it in range(1, max_iter + 1):
        l1, l2 = _log_density(v, w, m1, s1, m2, s2)
        ll = float(np.logaddexp(l1, l2).sum())
        ll_path.append(ll)
        with np.errstate(over="ignore"):
            r2 = 1.0 / (1.0 + np.exp(l1 - l2))
        if abs(ll - prev_ll) < tol * (abs(ll) + 1e-12):
            converged = True
            break
        prev_ll = ll
        w = float(np.clip(1.0 - r2.mean(), _WEIGHT_CLIP, 1.0 - _WEIGHT_CLIP))
    return WeightFit(w, Responsibilities(r2), ll, it, converged, tuple(ll_path))


def label_components(mix: MixtureParams, direction: str = "auto") -> LabeledMixture:
    """Decide which component is the misreported one and read off q and omega.

    ``under`` forces q < 1 (misreported component has the smaller mean),
    ``over`` forces q > 1, and ``auto`` picks the assignment whose mean ratio
    best agrees with its sd ratio, since scaling by q moves both equally.
    """
    scale = max(mix.s1, mix.s2)
    if abs(mix.m1 - mix.m2) <= 1e-12 * max(scale, abs(mix.m1)) and abs(mix.s1 - mix.s2) <= 1e-12 * scale:
        raise NonIdentifiableError(
            "mixture components coincide; intensity and frequency are not identifiable"
        )
    if direction not in ("under", "over", "auto"):
        raise ValueError(f"direction must be 'under', 'over' or 'auto', got {direction!r}")

    def ratio_score(m_true, s_true, m_mis, s_mis):
        if abs(m_true) <= 1e-12 * s_true:
            return np.inf
        return abs(m_mis / m_true - s_mis / s_true)

    # orientation: True means component 2 is the misreported one (no swap)
    if direction == "under":
        comp2_mis = mix.m2 < mix.m1
    elif direction == "over":
        comp2_mis = mix.m2 > mix.m1
    else:
        score_c2_mis = ratio_score(mix.m1, mix.s1, mix.m2, mix.s2)
        score_c1_mis = ratio_score(mix.m2, mix.s2, mix.m1, mix.s1)
        if not np.isfinite(score_c2_mis) and not np.isfinite(score_c1_mis):
            raise NonIdentifiableError(
                "both component means are ~0; q cannot be read from the mean ratio"
            )
        # exactly proportional components score 0 both ways; fall back to the
        # underreporting orientation (smaller mean is the misreported one)
        if abs(score_c2_mis - score_c1_mis) <= 1e-12 * max(1.0, score_c2_mis, score_c1_mis):
            comp2_mis = mix.m2 < mix.m1
        else:
            comp2_mis = score_c2_mis < score_c1_mis
    if comp2_mis:
        m_true, s_true, m_mis, s_mis = mix.m1, mix.s1, mix.m2, mix.s2
        w_true = mix.w1
        swapped = False
    else:
        m_true, s_true, m_mis, s_mis = mix.m2, mix.s2, mix.m1, mix.s1
        w_true = mix.w2
        swapped = True
    if abs(m_true) < 1e-8 * s_true:
        raise NonIdentifiableError(
            "true-scale component mean is ~0; q is undefined from the mean ratio"
        )
    q = m_mis / m_true
    omega = 1.0 - w_true
    labeled = MixtureParams(w1=w_true, m1=m_true, s1=s_true, m2=m_mis, s2=s_mis)
    return LabeledMixture(mixture=labeled, q=float(q), omega=float(omega), swapped=swapped)


def single_gaussian_loglik(values: np.ndarray) -> tuple[float, float, float]:
    """ML fit of one normal: (mean, ML sd, loglik)."""
    v = np.asarray(values, dtype=float)
    m = float(v.mean())
    s = float(v.std())
    if s == 0.0:
        raise ValueError("values are all identical")
    ll = -0.5 * v.size * (_LOG_2PI + 1.0 + 2.0 * math.log(s))
    return m, s, float(ll)
