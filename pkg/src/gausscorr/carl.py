"""Linearized collective atomic recoil lasing (CARL) in a ring cavity.

Three bosonic modes: the atomic side modes with one recoil momentum lost
(mode 0) and gained (mode 1), and the backscattered cavity field (mode 2).
Time is the dimensionless ``tau = rho * omega_r * t`` and hbar = 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import constants
from scipy.linalg import expm

from .symplectic import mode_populations, reduce, symplectic_form

MAX_TAU = 8.0
ILL_CONDITIONED_ENTRY = 1e12


class ConditioningWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class CarlParams:
    """Dimensionless CARL parameters.

    ``delta`` defaults to ``1/rho``, the detuning at which the dynamics depend
    on ``rho`` and ``tau`` alone. ``n0`` is informational: it only enters the
    model through ``delta``.
    """

    rho: float
    delta: float | None = None
    n0: int = 0

    def __post_init__(self):
        if not np.isfinite(self.rho) or self.rho <= 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.delta is None:
            object.__setattr__(self, "delta", 1.0 / self.rho)
        if not np.isfinite(self.delta_plus) or not np.isfinite(self.delta_minus):
            raise ValueError("detunings must be finite")

    @property
    def delta_plus(self) -> float:
        return self.delta + 1.0 / self.rho

    @property
    def delta_minus(self) -> float:
        return self.delta - 1.0 / self.rho

    @property
    def coupling(self) -> float:
        return float(np.sqrt(self.rho / 2.0))


@dataclass(frozen=True)
class RecoilInputs:
    """Physical inputs of the recoil parameter, SI units (angular frequencies in rad/s)."""

    rabi_frequency: float
    detuning: float
    light_frequency: float
    dipole: float
    atom_number: float
    mode_volume: float
    recoil_frequency: float
    epsilon0: float = constants.epsilon_0
    hbar: float = constants.hbar


def recoil_parameter(inputs: RecoilInputs) -> float:
    """Collective recoil parameter ``rho``.

    ``(Omega0 / 2 Delta0)^(2/3) * (omega mu^2 N / (V hbar eps0 omega_r^2))^(1/3)``.
    The first factor is an even power, so the sign of the detuning drops out.
    """
    if inputs.detuning == 0:
        raise ZeroDivisionError("pump-atom detuning must be nonzero")
    for name in ("rabi_frequency", "light_frequency", "dipole", "atom_number",
                 "mode_volume", "recoil_frequency", "epsilon0", "hbar"):
        if getattr(inputs, name) <= 0:
            raise ValueError(f"{name} must be positive")
    pump = abs(inputs.rabi_frequency / (2.0 * inputs.detuning)) ** (2.0 / 3.0)
    collective = (
        inputs.light_frequency * inputs.dipole**2 * inputs.atom_number
        / (inputs.mode_volume * inputs.hbar * inputs.epsilon0 * inputs.recoil_frequency**2)
    ) ** (1.0 / 3.0)
    return float(pump * collective)


def hamiltonian_matrix(params: CarlParams) -> np.ndarray:
    """Real symmetric ``G`` with ``H = R^T G R / 2`` up to a constant.

    With ``b = (q + ip)/sqrt(2)`` and ``g = sqrt(rho/2)`` the linearized
    Hamiltonian reads

        H = delta_+ (q1^2 + p1^2)/2 - delta_- (q0^2 + p0^2)/2
            + g (q0 p2 + p0 q2) + g (q1 p2 - p1 q2)

    The 0-2 coupling is of two-mode squeezing type and the 1-2 coupling of
    beamsplitter type.
    """
    g = params.coupling
    mat = np.zeros((6, 6))
    mat[0, 0] = mat[1, 1] = -params.delta_minus
    mat[2, 2] = mat[3, 3] = params.delta_plus
    for i, j, v in ((0, 5, g), (1, 4, g), (2, 5, g), (3, 4, -g)):
        mat[i, j] = mat[j, i] = v
    return mat


def drift_matrix(hamiltonian: np.ndarray) -> np.ndarray:
    """``A = Omega G``; then ``dR/dtau = A R`` and ``dsigma/dtau = A sigma + sigma A^T``."""
    hamiltonian = np.asarray(hamiltonian, dtype=float)
    return symplectic_form(hamiltonian.shape[0] // 2) @ hamiltonian


def propagator(params: CarlParams, tau: float) -> np.ndarray:
    return expm(drift_matrix(hamiltonian_matrix(params)) * tau)


def _check_tau(tau: float, max_tau: float) -> float:
    tau = float(tau)
    if not np.isfinite(tau) or tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    if tau > max_tau:
        raise ValueError(f"tau = {tau} exceeds the propagation cap {max_tau}")
    return tau


def evolve_cm(params: CarlParams, tau: float, max_tau: float = MAX_TAU) -> np.ndarray:
    """CM at time ``tau`` starting from the three-mode vacuum."""
    tau = _check_tau(tau, max_tau)
    if tau == 0:
        return np.eye(6)
    e = propagator(params, tau)
    sigma = e @ e.T
    sigma = 0.5 * (sigma + sigma.T)
    if np.max(np.abs(sigma)) > ILL_CONDITIONED_ENTRY:
        warnings.warn(
            f"CM entries exceed {ILL_CONDITIONED_ENTRY:g} at rho={params.rho}, tau={tau}; "
            "derived quantities lose precision",
            ConditioningWarning,
            stacklevel=2,
        )
    return sigma


def evolve_cm_rk4(params: CarlParams, tau: float, step: float = 1e-3) -> np.ndarray:
    """Integrate ``dsigma/dtau = A sigma + sigma A^T`` with classical RK4.

    Independent of the matrix exponential; kept as a cross-check.
    """
    a = drift_matrix(hamiltonian_matrix(params))
    sigma = np.eye(6)
    n_steps = int(np.ceil(tau / step)) if tau > 0 else 0
    h = tau / n_steps if n_steps else 0.0

    def rhs(s):
        return a @ s + s @ a.T

    for _ in range(n_steps):
        k1 = rhs(sigma)
        k2 = rhs(sigma + 0.5 * h * k1)
        k3 = rhs(sigma + 0.5 * h * k2)
        k4 = rhs(sigma + h * k3)
        sigma = sigma + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return sigma


def number_difference_form() -> np.ndarray:
    """Quadratic form of ``n_0 - n_1 - n_2`` (up to a constant), a constant of motion."""
    return 0.5 * np.diag([1.0, 1.0, -1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class CarlReport:
    params: CarlParams
    tau: float
    cm: np.ndarray = field(repr=False)
    populations: np.ndarray
    marginal_determinants: np.ndarray
    purity_residual: float
    conservation_residual: float
    constraint_residual: float
    thermal_residuals: np.ndarray


def carl_state_report(params: CarlParams, tau: float, max_tau: float = MAX_TAU) -> CarlReport:
    """Evolved CM together with the residuals of the known invariants.

    * ``purity_residual``: ``det sigma - 1``;
    * ``conservation_residual``: ``<n_0> - <n_1> - <n_2>``;
    * ``constraint_residual``: ``sqrt(det s0) - sqrt(det s1) - sqrt(det s2) + 1``;
    * ``thermal_residuals``: ``det s_j - (2<n_j> + 1)^2`` for each mode.
    """
    sigma = evolve_cm(params, tau, max_tau)
    pops = mode_populations(sigma)
    dets = np.array([np.linalg.det(reduce(sigma, [j])) for j in range(3)])
    roots = np.sqrt(dets)
    return CarlReport(
        params=params,
        tau=float(tau),
        cm=sigma,
        populations=pops,
        marginal_determinants=dets,
        purity_residual=float(np.linalg.det(sigma) - 1.0),
        conservation_residual=float(pops[0] - pops[1] - pops[2]),
        constraint_residual=float(roots[0] - roots[1] - roots[2] + 1.0),
        thermal_residuals=dets - (2 * pops + 1) ** 2,
    )
