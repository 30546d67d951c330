import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from gausscorr import (
    CarlParams,
    RecoilInputs,
    carl_state_report,
    drift_matrix,
    evolve_cm,
    evolve_cm_rk4,
    hamiltonian_matrix,
    mode_populations,
    recoil_parameter,
    reduce,
    symplectic_form,
)
from gausscorr.carl import ConditioningWarning, number_difference_form, propagator

RHOS = (0.1, 0.5, 1.0, 2.0, 10.0)
TAUS = (0.5, 1.0, 2.0, 3.0)


# parameters

def test_default_detuning():
    p = CarlParams(4.0)
    assert p.delta == 0.25
    assert p.delta_minus == 0.0
    assert p.delta_plus == 0.5
    assert p.coupling == pytest.approx(np.sqrt(2.0))


@pytest.mark.parametrize("rho", [0.0, -1.0, np.nan, np.inf])
def test_rho_must_be_positive(rho):
    with pytest.raises(ValueError):
        CarlParams(rho)


# recoil parameter

def _unit_inputs(**kw):
    base = dict(rabi_frequency=2.0, detuning=1.0, light_frequency=1.0, dipole=1.0, atom_number=1.0,
                mode_volume=1.0, recoil_frequency=1.0, epsilon0=1.0, hbar=1.0)
    base.update(kw)
    return RecoilInputs(**base)


def test_recoil_unit_factors():
    assert recoil_parameter(_unit_inputs()) == pytest.approx(1.0)


def test_recoil_scalings():
    base = recoil_parameter(_unit_inputs())
    assert recoil_parameter(_unit_inputs(atom_number=2.0)) == pytest.approx(base * 2 ** (1 / 3))
    assert recoil_parameter(_unit_inputs(detuning=2.0)) == pytest.approx(base * 2 ** (-2 / 3))
    assert recoil_parameter(_unit_inputs(detuning=-1.0)) == pytest.approx(base)


def test_recoil_errors():
    with pytest.raises(ZeroDivisionError):
        recoil_parameter(_unit_inputs(detuning=0.0))
    with pytest.raises(ValueError):
        recoil_parameter(_unit_inputs(atom_number=-5))


def test_recoil_si_defaults_plausible():
    # rubidium-like numbers land in the usual CARL range
    inp = RecoilInputs(rabi_frequency=2 * np.pi * 1e8, detuning=2 * np.pi * 1e11,
                       light_frequency=2 * np.pi * 3.84e14, dipole=2.5e-29, atom_number=1e6,
                       mode_volume=1e-9, recoil_frequency=2 * np.pi * 3.8e3)
    assert 0.1 < recoil_parameter(inp) < 1e3


# generator

def test_hamiltonian_structure_at_default_detuning():
    rho = 0.7
    g = hamiltonian_matrix(CarlParams(rho))
    assert np.array_equal(g, g.T)
    assert not g[:2, :2].any()
    assert np.allclose(g[2:4, 2:4], 2 / rho * np.eye(2))


def test_hamiltonian_weak_coupling_limit():
    g = hamiltonian_matrix(CarlParams(1e-12, delta=1e12 + 0.3))
    # couplings scale like sqrt(rho)
    assert np.max(np.abs(g[:4, 4:])) < 1e-5


@pytest.mark.parametrize("rho", RHOS)
def test_hamiltonian_symmetric_and_drift_traceless(rho):
    g = hamiltonian_matrix(CarlParams(rho, delta=0.3))
    assert np.array_equal(g, g.T)
    assert np.trace(drift_matrix(g)) == pytest.approx(0, abs=1e-14)


def test_drift_of_identity_is_omega():
    assert np.array_equal(drift_matrix(np.eye(6)), symplectic_form(3))


@pytest.mark.parametrize("rho", RHOS)
def test_number_difference_conserved_by_drift(rho):
    a = drift_matrix(hamiltonian_matrix(CarlParams(rho)))
    k = number_difference_form()
    assert np.allclose(a.T @ k + k @ a, 0, atol=1e-14)


def test_coupling_types():
    g = hamiltonian_matrix(CarlParams(2.0))
    om = symplectic_form(3)
    a = om @ g
    # two-mode squeezing couples a_0 to a_2^dagger, a beamsplitter couples a_1 to a_2
    t = np.kron(np.eye(3), np.array([[1, 1j], [1, -1j]]) / np.sqrt(2))
    ac = t @ a @ np.linalg.inv(t)
    assert abs(ac[0, 5]) > 0.5 and abs(ac[0, 4]) < 1e-12
    assert abs(ac[2, 4]) > 0.5 and abs(ac[2, 5]) < 1e-12


# propagation

def test_vacuum_at_zero_time():
    for rho in RHOS:
        assert np.array_equal(evolve_cm(CarlParams(rho), 0.0), np.eye(6))


@pytest.mark.parametrize("tau", [-1.0, np.nan, 9.0])
def test_tau_rejected(tau):
    with pytest.raises(ValueError):
        evolve_cm(CarlParams(1.0), tau)


def test_cap_configurable():
    evolve_cm(CarlParams(0.1), 9.0, max_tau=10.0)


def test_conditioning_warning():
    with pytest.warns(ConditioningWarning):
        evolve_cm(CarlParams(10.0), 20.0, max_tau=30.0)


@pytest.mark.parametrize("rho", RHOS)
def test_propagator_symplectic(rho):
    om = symplectic_form(3)
    for tau in (1.0, 3.0, 5.0):
        e = propagator(CarlParams(rho), tau)
        assert np.linalg.norm(e @ om @ e.T - om) <= 1e-8


@pytest.mark.parametrize("rho", RHOS)
@pytest.mark.parametrize("tau", TAUS)
def test_invariants_on_grid(rho, tau):
    rep = carl_state_report(CarlParams(rho), tau)
    assert abs(rep.purity_residual) <= 1e-6
    assert abs(rep.conservation_residual) <= 1e-6
    assert abs(rep.constraint_residual) <= 1e-6
    assert np.all(np.abs(rep.thermal_residuals) <= 1e-5)


def test_report_at_zero():
    rep = carl_state_report(CarlParams(1.0), 0.0)
    assert rep.constraint_residual == 0.0
    assert np.array_equal(rep.populations, [0, 0, 0])


@pytest.mark.parametrize("rho", [0.2, 10.0])
def test_report_residual_small(rho):
    assert abs(carl_state_report(CarlParams(rho), 3.0).constraint_residual) <= 1e-6


@pytest.mark.parametrize("rho", RHOS)
def test_population_nondecreasing(rho):
    taus = np.linspace(0, 5, 51)
    total = [mode_populations(evolve_cm(CarlParams(rho), t)).sum() for t in taus]
    assert np.all(np.diff(total) >= -1e-12)


@pytest.mark.parametrize("rho", [0.5, 10.0])
def test_semigroup(rho):
    p = CarlParams(rho)
    e2 = propagator(p, 1.3)
    s1 = evolve_cm(p, 1.7)
    lhs = evolve_cm(p, 3.0)
    assert np.allclose(lhs, e2 @ s1 @ e2.T, rtol=1e-8, atol=1e-8)


@pytest.mark.parametrize("rho", RHOS)
def test_rk4_oracle(rho):
    p = CarlParams(rho)
    exact = evolve_cm(p, 3.0)
    rk = evolve_cm_rk4(p, 3.0)
    assert np.max(np.abs(rk - exact)) / np.max(np.abs(exact)) <= 1e-5


def test_nonzero_initial_detuning_still_pure():
    s = evolve_cm(CarlParams(1.0, delta=0.2, n0=3), 2.0)
    assert np.linalg.det(s) == pytest.approx(1.0, abs=1e-8)


def test_gain_regimes():
    # growth rate: sqrt(rho/2) in the quantum limit, sqrt(3)/2 in the semiclassical one
    def rate(rho):
        return np.linalg.eigvals(drift_matrix(hamiltonian_matrix(CarlParams(rho)))).real.max()

    assert rate(0.01) == pytest.approx(np.sqrt(0.01 / 2), rel=0.02)
    assert rate(200.0) == pytest.approx(np.sqrt(3) / 2, rel=0.02)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        n6 = mode_populations(evolve_cm(CarlParams(10.0), 12.0, max_tau=20))[0]
        n5 = mode_populations(evolve_cm(CarlParams(10.0), 10.0, max_tau=20))[0]
    assert 0.25 * np.log(n6 / n5) == pytest.approx(rate(10.0), rel=1e-3)


def test_marginal_thermal_relation():
    s = evolve_cm(CarlParams(0.5), 4.0)
    n = mode_populations(s)
    for j in range(3):
        assert np.linalg.det(reduce(s, [j])) == pytest.approx((2 * n[j] + 1) ** 2, rel=1e-9)


def test_expm_reference():
    p = CarlParams(2.0)
    a = drift_matrix(hamiltonian_matrix(p))
    e = expm(a * 1.5)
    assert np.allclose(evolve_cm(p, 1.5), e @ e.T)
