import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misreport import (
    MixtureParams,
    NonIdentifiableError,
    em_fit,
    em_fit_weights_only,
    label_components,
)
from misreport.mixture import single_gaussian_loglik


def two_component_sample(seed, n1=1000, n2=1000, m1=0.0, m2=10.0, s1=1.0, s2=1.0):
    rng = np.random.default_rng(seed)
    v = np.concatenate([rng.normal(m1, s1, n1), rng.normal(m2, s2, n2)])
    rng.shuffle(v)
    return v


def test_em_fit_recovers_well_separated_components():
    v = two_component_sample(0)
    res = em_fit(v, seed=0)
    assert res.params.m1 == pytest.approx(0.0, abs=0.15)
    assert res.params.m2 == pytest.approx(10.0, abs=0.15)
    assert res.params.w1 == pytest.approx(0.5, abs=0.04)
    assert res.converged


def test_em_fit_nests_single_gaussian():
    rng = np.random.default_rng(1)
    v = rng.normal(3.0, 2.0, 500)
    res = em_fit(v, seed=1)
    _, _, ll1 = single_gaussian_loglik(v)
    assert res.loglik >= ll1 - 1e-6


def test_em_fit_symmetric_init_is_stable():
    rng = np.random.default_rng(2)
    v = rng.normal(5.0, 2.0, 300)
    init = MixtureParams(w1=0.5, m1=5.0, s1=2.0, m2=5.0, s2=2.0)
    res = em_fit(v, init=init)
    # symmetric stationary point: components remain identical, no crash
    assert res.params.m1 == pytest.approx(res.params.m2, abs=1e-6)


def test_em_fit_rejects_degenerate_input():
    with pytest.raises(ValueError):
        em_fit(np.full(100, 2.0))
    with pytest.raises(ValueError):
        em_fit(np.arange(5.0))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_em_loglik_is_monotone(seed):
    rng = np.random.default_rng(seed)
    sep = rng.uniform(0.0, 6.0)
    w = rng.uniform(0.2, 0.8)
    n = 200
    n1 = int(n * w)
    v = np.concatenate([rng.normal(0, 1, n1), rng.normal(sep, rng.uniform(0.5, 2.0), n - n1)])
    res = em_fit(v, seed=seed, n_restarts=1)
    path = np.asarray(res.loglik_path)
    assert np.all(np.diff(path) >= -1e-10 * np.maximum(1.0, np.abs(path[:-1])))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_responsibilities_are_probabilities(seed):
    v = two_component_sample(seed, n1=60, n2=60, m2=3.0)
    res = em_fit(v, seed=seed, n_restarts=1)
    post = res.responsibilities.posterior
    assert np.all(post >= 0.0) and np.all(post <= 1.0)
    # P(Z=0) + P(Z=1) = 1 holds exactly by construction of the complement
    assert np.all((1.0 - post) + post == 1.0)


def test_em_fit_scale_equivariance():
    v = two_component_sample(3)
    lam = 7.5
    a = em_fit(v, seed=3)
    b = em_fit(v * lam, seed=3)
    assert np.allclose(a.responsibilities.posterior, b.responsibilities.posterior, atol=1e-8)
    assert b.params.m1 == pytest.approx(lam * a.params.m1, rel=1e-8, abs=1e-8)
    assert b.params.m2 == pytest.approx(lam * a.params.m2, rel=1e-8)
    assert b.params.s1 == pytest.approx(lam * a.params.s1, rel=1e-8)
    assert b.params.w1 == pytest.approx(a.params.w1, abs=1e-10)


def test_weights_only_recovers_weight():
    rng = np.random.default_rng(4)
    v = np.concatenate([rng.normal(0, 1, 500), rng.normal(10, 1, 1500)])
    comp = MixtureParams(w1=0.5, m1=0.0, s1=1.0, m2=10.0, s2=1.0)
    res = em_fit_weights_only(v, comp)
    assert 1.0 - res.w1 == pytest.approx(0.75, abs=0.03)
    # the fitted weight equals the mean posterior responsibility
    assert 1.0 - res.w1 == pytest.approx(res.responsibilities.posterior.mean(), abs=1e-6)


def test_weights_only_boundary_clamped():
    rng = np.random.default_rng(5)
    comp = MixtureParams(w1=0.5, m1=0.0, s1=1.0, m2=10.0, s2=1.0)
    res = em_fit_weights_only(rng.normal(0, 1, 200), comp)
    assert 1e-6 <= res.w1 <= 1 - 1e-6
    assert res.w1 > 0.999


def test_weights_only_symmetric_point():
    comp = MixtureParams(w1=0.5, m1=0.0, s1=1.0, m2=4.0, s2=1.0)
    res = em_fit_weights_only(np.full(12, 2.0), comp)
    assert np.allclose(res.responsibilities.posterior, 0.5, atol=1e-9)


def test_weights_only_identical_components_error():
    comp = MixtureParams(w1=0.5, m1=1.0, s1=0.5, m2=1.0, s2=0.5)
    with pytest.raises(NonIdentifiableError):
        em_fit_weights_only(np.arange(20.0), comp)


def test_weights_only_is_fixed_point_of_em_fit():
    v = two_component_sample(6)
    full = em_fit(v, seed=6)
    res = em_fit_weights_only(v, full.params)
    assert res.w1 == pytest.approx(full.params.w1, abs=1e-6)


def test_label_components_consistent_ratios():
    # mean ratio 0.25 equals sd ratio 0.25
    mix = MixtureParams(w1=0.5, m1=0.5, s1=0.25, m2=2.0, s2=1.0)
    lab = label_components(mix, direction="auto")
    assert lab.q == pytest.approx(0.25, abs=1e-12)
    assert lab.swapped


def test_label_components_underreporting_profile():
    # weekly-incidence style fit: small component is the misreported one
    mix = MixtureParams(w1=0.76, m1=0.152, s1=0.097, m2=0.629, s2=0.4)
    lab = label_components(mix, direction="auto")
    assert lab.q == pytest.approx(0.242, abs=0.01)
    assert lab.omega == pytest.approx(0.760, abs=1e-12)


def test_label_components_directions():
    mix = MixtureParams(w1=0.3, m1=1.0, s1=0.5, m2=4.0, s2=1.0)
    under = label_components(mix, direction="under")
    assert under.q == pytest.approx(0.25)
    assert under.omega == pytest.approx(0.3)
    over = label_components(mix, direction="over")
    assert over.q == pytest.approx(4.0)
    assert over.omega == pytest.approx(0.7)


def test_label_components_identical_error():
    with pytest.raises(NonIdentifiableError):
        label_components(MixtureParams(w1=0.4, m1=1.0, s1=0.5, m2=1.0, s2=0.5))


def test_label_components_zero_mean_error():
    with pytest.raises(NonIdentifiableError):
        label_components(MixtureParams(w1=0.4, m1=0.0, s1=1.0, m2=0.0, s2=2.0), direction="under")
