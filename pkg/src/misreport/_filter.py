"""Compiled state-space kernels for the Gaussian ARMA likelihood.

The ARMA(p, r) process is embedded in the standard companion state space
with state dimension m = max(p, r + 1):

    s_{t+1} = T s_t + R eps_{t+1},   x_t = s_t[0] + mean

The filter runs with unit innovation variance and profiles sigma^2 out of
the likelihood, so the optimizer only searches over coefficients and mean.
Coefficients are re-parameterized through partial autocorrelations mapped
by tanh from the real line, which keeps every iterate strictly inside the
stationarity/invertibility region.
"""
import numpy as np
from numba import njit

LOG_2PI = 1.8378770664093453
# tanh saturates to exactly 1.0 in double precision around |x| > 19, which
# would make the stationary-covariance solve singular; stay strictly inside
PACF_LIMIT = 1.0 - 1e-7


@njit(cache=True)
def bounded_pacf(x):
    u = np.tanh(x)
    for i in range(u.shape[0]):
        if u[i] > PACF_LIMIT:
            u[i] = PACF_LIMIT
        elif u[i] < -PACF_LIMIT:
            u[i] = -PACF_LIMIT
    return u


@njit(cache=True)
def pacf_to_coef(u):
    """Durbin-Levinson map from partial autocorrelations in (-1,1)^k to
    coefficients of a stationary polynomial 1 - a_1 z - ... - a_k z^k."""
    k = u.shape[0]
    a = np.zeros(k)
    tmp = np.zeros(k)
    for j in range(k):
        aj = u[j]
        for i in range(j):
            tmp[i] = a[i] - aj * a[j - 1 - i]
        for i in range(j):
            a[i] = tmp[i]
        a[j] = aj
    return a


@njit(cache=True)
def _build_system(alpha, theta):
    p = alpha.shape[0]
    r = theta.shape[0]
    m = max(p, r + 1)
    T = np.zeros((m, m))
    for i in range(p):
        T[i, 0] = alpha[i]
    for i in range(m - 1):
        T[i, i + 1] = 1.0
    R = np.zeros(m)
    R[0] = 1.0
    for j in range(r):
        R[j + 1] = theta[j]
    return T, R


@njit(cache=True)
def _stationary_cov(T, R):
    """Solve P = T P T' + R R' exactly (unit innovation variance)."""
    m = T.shape[0]
    m2 = m * m
    A = np.zeros((m2, m2))
    b = np.zeros(m2)
    for i in range(m):
        for j in range(m):
            row = i * m + j
            b[row] = R[i] * R[j]
            for k in range(m):
                for l in range(m):
                    A[row, k * m + l] = -T[i, k] * T[j, l]
            A[row, row] += 1.0
    x = np.linalg.solve(A, b)
    return x.reshape((m, m))


@njit(cache=True)
def kalman_filter_pass(e, obs, T, R, P0):
    """One filtering pass over the mean-adjusted data ``e`` with unit sigma^2.

    Returns (sum log F_t, sum v_t^2/F_t, n_observed, v, F); entries of v/F at
    missing positions are NaN. Missing observations skip the update step.
    """
    m = T.shape[0]
    n = e.shape[0]
    a = np.zeros(m)
    P = P0.copy()
    K = np.zeros(m)
    row0 = np.zeros(m)
    anew = np.zeros(m)
    PT = np.zeros((m, m))
    v_out = np.full(n, np.nan)
    f_out = np.full(n, np.nan)
    sum_log_f = 0.0
    ssq = 0.0
    nobs = 0
    for t in range(n):
        if obs[t]:
            F = P[0, 0]
            if F < 1e-300:
                F = 1e-300
            v = e[t] - a[0]
            v_out[t] = v
            f_out[t] = F
            sum_log_f += np.log(F)
            ssq += v * v / F
            nobs += 1
            for i in range(m):
                K[i] = P[i, 0] / F
                row0[i] = P[0, i]
            for i in range(m):
                a[i] += K[i] * v
                for j in range(m):
                    P[i, j] -= K[i] * row0[j]
        # predict
        for i in range(m):
            s = 0.0
            for k in range(m):
                s += T[i, k] * a[k]
            anew[i] = s
        for i in range(m):
            a[i] = anew[i]
        for i in range(m):
            for j in range(m):
                s = 0.0
                for k in range(m):
                    s += T[i, k] * P[k, j]
                PT[i, j] = s
        for i in range(m):
            for j in range(m):
                s = 0.0
                for k in range(m):
                    s += PT[i, k] * T[j, k]
                P[i, j] = s + R[i] * R[j]
    return sum_log_f, ssq, nobs, v_out, f_out


@njit(cache=True)
def concentrated_nll(x, y, obs, X, p, r):
    """Negative log-likelihood with sigma^2 profiled out.

    x = [pacf-space AR (p), pacf-space MA (r), mean, regression coefs (k)];
    X is the n-by-k design matrix of extra regressors (k may be 0).
    """
    u_ar = bounded_pacf(x[:p])
    u_ma = bounded_pacf(x[p:p + r])
    alpha = pacf_to_coef(u_ar)
    theta = -pacf_to_coef(u_ma)
    mu = x[p + r]
    k = X.shape[1]
    n = y.shape[0]
    e = np.empty(n)
    for t in range(n):
        s = y[t] - mu
        for j in range(k):
            s -= x[p + r + 1 + j] * X[t, j]
        e[t] = s
    T, R = _build_system(alpha, theta)
    P0 = _stationary_cov(T, R)
    sum_log_f, ssq, nobs, _, _ = kalman_filter_pass(e, obs, T, R, P0)
    if nobs == 0:
        return np.inf
    s2 = ssq / nobs
    if s2 < 1e-300:
        s2 = 1e-300
    return 0.5 * (nobs * (LOG_2PI + 1.0 + np.log(s2)) + sum_log_f)


def coef_to_pacf(a):
    """Inverse Durbin-Levinson map; valid for stationary coefficient vectors."""
    a = np.asarray(a, dtype=float).copy()
    k = a.size
    u = np.zeros(k)
    for j in range(k - 1, -1, -1):
        uj = a[j]
        u[j] = uj
        if j == 0:
            break
        denom = 1.0 - uj * uj
        if abs(denom) < 1e-14:
            denom = np.copysign(1e-14, denom)
        prev = np.empty(j)
        for i in range(j):
            prev[i] = (a[i] + uj * a[j - 1 - i]) / denom
        a[:j] = prev
    return u


def warm_up():
    """Trigger JIT compilation of all kernels (first call is slow otherwise)."""
    y = np.array([0.1, -0.2, 0.3, 0.05, -0.1])
    obs = np.ones(5, dtype=np.bool_)
    X = np.zeros((5, 0))
    concentrated_nll(np.array([0.1, 0.1, 0.0]), y, obs, X, 1, 1)
