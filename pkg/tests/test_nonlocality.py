import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gausscorr import (
    CarlParams,
    OptimizerConfig,
    SettingsVector,
    evolve_cm,
    mermin_klyshko,
    optimize_svetlichny,
    parity_correlation,
    svetlichny,
    wigner,
)
from gausscorr.nonlocality import CLASSICAL_BOUND, QUANTUM_BOUND, _s_and_grad, _kernel

from oracles import local_symplectic, random_mixed, svetlichny_random_search

seeds = st.integers(0, 2**32 - 1)
SATURATION = 16 / 3 ** (9 / 8)


def carl(rho, tau):
    return evolve_cm(CarlParams(rho), tau)


def test_parity_vacuum():
    assert parity_correlation(np.eye(6), np.zeros(6)) == pytest.approx(1.0)
    assert parity_correlation(np.eye(6), [1, 0, 0, 0, 0, 0]) == pytest.approx(np.exp(-2))


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_parity_is_scaled_wigner(seed):
    rng = np.random.default_rng(seed)
    sigma = random_mixed(3, rng)
    xi = rng.normal(size=6)
    value = parity_correlation(sigma, xi)
    assert 0 < value <= 1
    assert value == pytest.approx(np.pi**3 / 8 * wigner(sigma, xi), rel=1e-10)


def test_parity_batched_and_checks():
    xi = np.zeros((4, 6))
    assert np.allclose(parity_correlation(np.eye(6), xi), 1.0)
    with pytest.raises(ValueError):
        parity_correlation(np.eye(6), np.zeros(4))
    with pytest.raises(ValueError):
        parity_correlation(np.eye(4), np.zeros(4))


def test_settings_vector():
    x = np.arange(12.0)
    sv = SettingsVector.from_array(x)
    assert np.array_equal(sv.to_array(), x)
    assert np.array_equal(sv.b_prime, [6, 7])
    assert np.array_equal(sv.swapped().a, [2, 3])
    with pytest.raises(ValueError):
        SettingsVector.from_array([np.nan] + [0] * 11)


def test_mermin_klyshko_vacuum():
    m, mp = mermin_klyshko(np.eye(6), SettingsVector.zeros())
    assert m == pytest.approx(2) and mp == pytest.approx(2)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_mermin_klyshko_symmetries(seed):
    rng = np.random.default_rng(seed)
    sigma = random_mixed(3, rng)
    sv = SettingsVector.from_array(rng.normal(size=12))
    m, mp = mermin_klyshko(sigma, sv)
    ms, mps = mermin_klyshko(sigma, sv.swapped())
    assert (ms, mps) == pytest.approx((mp, m), rel=1e-12)
    # Wigner evenness
    mn, mpn = mermin_klyshko(sigma, SettingsVector.from_array(-sv.to_array()))
    assert (mn, mpn) == pytest.approx((m, mp), rel=1e-12)
    # degenerate collapse
    a, b, c = rng.normal(size=(3, 2))
    m, mp = mermin_klyshko(sigma, SettingsVector(a, a, b, b, c, c))
    pi = parity_correlation(sigma, np.concatenate([a, b, c]))
    assert m == pytest.approx(2 * pi) and mp == pytest.approx(2 * pi)


def test_svetlichny_vacuum():
    res = svetlichny(np.eye(6), SettingsVector.zeros())
    assert res.s_value == pytest.approx(4.0, abs=1e-12)
    assert not res.violated
    assert res.s_value - (res.m + res.m_prime) == 0


def test_violation_flag():
    sigma = carl(10.0, 3.0)
    res = optimize_svetlichny(sigma)
    assert res.violated == (abs(res.s_value) - CLASSICAL_BOUND > 1e-9)
    assert res.violated


def test_gradient_matches_finite_differences():
    sigma = carl(1.0, 2.0)
    q, pref = _kernel(sigma)
    x = np.random.default_rng(3).normal(scale=0.3, size=12)
    _, g = _s_and_grad(x, q, pref)
    h = 1e-6
    fd = np.array([(_s_and_grad(x + h * e, q, pref)[0] - _s_and_grad(x - h * e, q, pref)[0]) / (2 * h)
                   for e in np.eye(12)])
    assert np.allclose(g, fd, atol=1e-7)


def test_optimum_vacuum_matches_random_search():
    res = optimize_svetlichny(np.eye(6), OptimizerConfig(restarts=16))
    assert abs(res.s_value) == pytest.approx(4.0, abs=1e-9)
    oracle = svetlichny_random_search(np.eye(6), 10**6, np.random.default_rng(0))
    assert oracle <= 4 + 1e-6


def test_small_corner_no_violation():
    res = optimize_svetlichny(carl(0.05, 0.05))
    assert abs(res.s_value) == pytest.approx(4.0, abs=1e-4)
    assert not res.violated


def test_large_rho_monotone_and_saturating():
    values = [abs(optimize_svetlichny(carl(10.0, t)).s_value) for t in np.linspace(0.5, 4.0, 8)]
    assert np.all(np.diff(values) >= -1e-4)
    assert values[-1] == pytest.approx(SATURATION, rel=0.02)
    assert max(values) <= QUANTUM_BOUND + 1e-6


@pytest.mark.parametrize("rho, tau", [(1.0, 2.0), (10.0, 1.0), (0.5, 3.0)])
def test_beats_random_search(rho, tau):
    sigma = carl(rho, tau)
    res = optimize_svetlichny(sigma)
    assert abs(res.s_value) >= svetlichny_random_search(sigma, 10**5, np.random.default_rng(1)) - 1e-3


def test_reproducible():
    sigma = carl(1.0, 2.0)
    cfg = OptimizerConfig(restarts=8, seed=4)
    a, b = optimize_svetlichny(sigma, cfg), optimize_svetlichny(sigma, cfg)
    assert a.s_value == b.s_value
    assert np.array_equal(a.settings.to_array(), b.settings.to_array())


def test_settings_stay_in_box():
    res = optimize_svetlichny(carl(10.0, 3.0))
    assert np.all(np.abs(res.settings.to_array()) <= 10)


def test_local_symplectic_invariance():
    sigma = carl(1.0, 2.0)
    s = local_symplectic(np.random.default_rng(5), max_squeeze=0.3)
    a = abs(optimize_svetlichny(sigma).s_value)
    b = abs(optimize_svetlichny(s @ sigma @ s.T).s_value)
    assert a == pytest.approx(b, abs=1e-4)
