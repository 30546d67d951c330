"""Rényi-2 entanglement, discord and residual tripartite entanglement."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .symplectic import (
    DEFAULT_TOL,
    ModePartition,
    UnphysicalCMError,
    as_cm,
    effective_tol,
    n_modes,
    partial_transpose,
    reduce,
    require_physical,
    symplectic_eigenvalues,
    symplectic_form,
    validate_cm,
    williamson,
)

LOG_SQUEEZE_BOUND = 8.0
TIE_TOL = 1e-6


class PurityError(ValueError):
    """A routine defined for pure states received a mixed CM."""


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings shared by the multistart optimizers.

    ``restarts=None`` selects the routine's own default (32 for the convex
    roof, 16 for discord, 64 for the Svetlichny parameter). ``penalty`` is
    validated and recorded in sweep manifests; the roof parametrizes the pure
    manifold directly so no routine currently weighs a constraint with it.
    """

    restarts: int | None = None
    max_iterations: int = 4000
    tol: float = 1e-12
    penalty: float = 1e2
    seed: int = 0

    def __post_init__(self):
        if self.restarts is not None and self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.tol <= 0 or self.penalty <= 0:
            raise ValueError("tol and penalty must be positive")

    def n_restarts(self, default: int) -> int:
        return default if self.restarts is None else self.restarts

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


DEFAULT_CONFIG = OptimizerConfig()


def _two_party(sigma: np.ndarray, partition: ModePartition | None) -> tuple[np.ndarray, int]:
    """Reorder ``sigma`` as (A, B) and return it with the number of A modes."""
    if partition is None:
        if n_modes(sigma) != 2:
            raise ValueError("a partition is required for states of more than two modes")
        partition = ModePartition([0], [1])
    if partition.party_c is not None:
        raise ValueError("expected a bipartition")
    partition.check(n_modes(sigma))
    return reduce(sigma, partition.modes), len(partition.party_a)


# ---------------------------------------------------------------- separability


@dataclass(frozen=True)
class PPTResult:
    ppt: bool
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.ppt


def is_ppt(sigma, partition: ModePartition | None = None, tol: float = DEFAULT_TOL) -> PPTResult:
    """Positivity of the partial transpose across ``A|B``.

    Returns the verdict with the smallest symplectic eigenvalue of the
    partially transposed CM. For 1-vs-M mode bipartitions PPT is equivalent
    to separability.
    """
    sigma = as_cm(sigma)
    sub, n_a = _two_party(sigma, partition)
    nu = symplectic_eigenvalues(partial_transpose(sub, range(n_a)))
    nu_min = float(nu[0])
    return PPTResult(nu_min >= 1.0 - effective_tol(sub, tol), nu_min)


# ---------------------------------------------------------------- entanglement


def pure_entanglement(sigma, partition: ModePartition | None = None, tol: float = DEFAULT_TOL) -> float:
    """``1/2 ln det sigma_A`` for a pure state of the modes in ``partition``."""
    sigma = as_cm(sigma)
    sub, n_a = _two_party(sigma, partition)
    if not validate_cm(sub, tol).is_pure:
        raise PurityError("state is mixed; use gaussian_entanglement for the convex roof")
    det_a = np.linalg.det(sub[: 2 * n_a, : 2 * n_a])
    return 0.5 * float(np.log(max(det_a, 1.0)))


@dataclass(frozen=True)
class EntanglementResult:
    """Convex-roof value with the optimal pure CM ``gamma <= sigma``."""

    value: float
    gamma: np.ndarray = field(repr=False)
    converged: bool
    route: str
    n_evaluations: int = 0


def _active_basis(n: int) -> np.ndarray:
    """Orthonormal basis of symmetric ``K`` with ``K Omega + Omega K = 0``.

    ``expm(K)`` then ranges over all pure ``n``-mode CMs.
    """
    om = symplectic_form(n)
    dim = 2 * n
    rows = []
    for i in range(dim):
        for j in range(i, dim):
            e = np.zeros((dim, dim))
            e[i, j] = e[j, i] = 1.0
            rows.append((0.5 * (e + om @ e @ om)).ravel())
    _, _, vt = np.linalg.svd(np.array(rows))
    rank = n * (n + 1)
    basis = vt[:rank].reshape(rank, dim, dim)
    return 0.5 * (basis + np.transpose(basis, (0, 2, 1)))


_BASIS = {1: _active_basis(1), 2: _active_basis(2)}
SEED_LOG_SQUEEZE = 20.0


def pure_seed(y) -> np.ndarray:
    """Pure CM ``expm(K(y))`` with the log-eigenvalues saturated at +-20.

    The saturation ``20 tanh(w / 20)`` is odd, so the result stays a pure
    CM while keeping every seed finite.
    """
    y = np.asarray(y, dtype=float)
    n = {2: 1, 6: 2}[y.size]
    k = np.tensordot(y, _BASIS[n], axes=1)
    w, v = np.linalg.eigh(k)
    w = SEED_LOG_SQUEEZE * np.tanh(w / SEED_LOG_SQUEEZE)
    return (v * np.exp(w)) @ v.T


def _rotated_squeeze(log_squeeze: float, angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return rot @ np.diag([np.exp(log_squeeze), np.exp(-log_squeeze)]) @ rot.T


def gaussian_entanglement(
    sigma,
    partition: ModePartition | None = None,
    config: OptimizerConfig = DEFAULT_CONFIG,
    tol: float = DEFAULT_TOL,
) -> EntanglementResult:
    """Gaussian convex roof ``inf { 1/2 ln det gamma_A : gamma pure, gamma <= sigma }``.

    Both parties must be single modes. With the Williamson decomposition
    ``sigma = S D S^T``, each normal mode with ``nu_k > 1`` is purified by a
    two-mode squeezed partner. The pure CMs below ``sigma`` are exactly the
    conditional states

        gamma = sigma - X (D_m + Gamma)^-1 X^T,   X = S_m sqrt(nu_m^2 - 1) Z

    left by a pure Gaussian measurement ``Gamma`` on the partners, so the
    constrained search becomes an unconstrained one over ``Gamma``. Normal
    modes with ``nu_k = 1`` carry no partner; a pure ``sigma`` therefore
    returns ``gamma = sigma`` directly.
    """
    sigma = require_physical(sigma, tol)
    sub, n_a = _two_party(sigma, partition)
    if sub.shape != (4, 4) or n_a != 1:
        raise ValueError("gaussian_entanglement supports one mode per party")
    s_mat, nu = williamson(sub)
    mixed = nu - 1.0 > effective_tol(sub, tol)
    if not mixed.any():
        det_a = np.linalg.det(sub[:2, :2])
        return EntanglementResult(0.5 * float(np.log(max(det_a, 1.0))), sub.copy(), True, "pure", 0)

    cols = [i for k in np.flatnonzero(mixed) for i in (2 * k, 2 * k + 1)]
    nu_m = np.repeat(nu[mixed], 2)
    flip = np.tile([1.0, -1.0], int(mixed.sum()))
    cross = s_mat[:, cols] * (np.sqrt(nu_m**2 - 1.0) * flip)[None, :]
    diag = np.diag(nu_m)

    def conditional(y):
        return sub - cross @ np.linalg.solve(diag + pure_seed(y), cross.T)

    def fun(y):
        det_a = np.linalg.det(conditional(y)[:2, :2])
        return 0.5 * np.log(det_a) if det_a > 0 else np.inf

    dim = 2 if mixed.sum() == 1 else 6
    rng = config.rng()
    n_restarts = config.n_restarts(32)
    best, nfev = None, 0
    for i in range(n_restarts):
        y0 = np.zeros(dim) if i == 0 else rng.normal(size=dim)
        if dim == 2:
            res = _nm(fun, y0, config)
        else:
            res = minimize(fun, y0, method="BFGS",
                           options=dict(maxiter=config.max_iterations, gtol=1e-10))
        nfev += res.nfev
        if best is None or res.fun < best.fun:
            best = res
    polish = _nm(fun, best.x, config, adaptive=True)
    nfev += polish.nfev
    y = polish.x if polish.fun <= best.fun else best.x
    # rounding in the conditional update leaves det gamma ~1e-8 off one; snap
    # back onto the pure manifold through its own Williamson frame
    s_gamma, _ = williamson(conditional(y))
    gamma = s_gamma @ s_gamma.T
    value = 0.5 * float(np.log(max(np.linalg.det(gamma[:2, :2]), 1.0)))
    route = "one-mixed-mode" if dim == 2 else "two-mixed-modes"
    return EntanglementResult(value, gamma, bool(polish.success), route, nfev)


def _nm(fun, x0, config: OptimizerConfig, **extra):
    opts = dict(
        xatol=1e-10,
        fatol=config.tol,
        maxiter=config.max_iterations,
        maxfev=2 * config.max_iterations,
        adaptive=len(x0) > 2,
    )
    opts.update(extra)
    return minimize(fun, x0, method="Nelder-Mead", options=opts)


# --------------------------------------------------------------------- discord


@dataclass(frozen=True)
class MeasurementSeed:
    """Pure single-mode Gaussian measurement seed ``R(theta) diag(lam, 1/lam) R(theta)^T``."""

    squeeze: float
    angle: float

    def __post_init__(self):
        if not self.squeeze > 0:
            raise ValueError("squeeze must be positive")

    @property
    def cm(self) -> np.ndarray:
        return _rotated_squeeze(np.log(self.squeeze), self.angle)


def conditional_cm(sigma, measured: int, seed: MeasurementSeed | np.ndarray) -> np.ndarray:
    """CM of the remaining modes after a Gaussian measurement on mode ``measured``.

    ``sigma_A - C (sigma_B + Gamma)^-1 C^T`` where ``B`` is the measured mode.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = n_modes(sigma)
    if not 0 <= measured < n:
        raise IndexError(f"mode {measured} out of range for {n} modes")
    gamma = seed.cm if isinstance(seed, MeasurementSeed) else np.asarray(seed, dtype=float)
    keep = [i for m in range(n) if m != measured for i in (2 * m, 2 * m + 1)]
    meas = [2 * measured, 2 * measured + 1]
    s_a = sigma[np.ix_(keep, keep)]
    s_b = sigma[np.ix_(meas, meas)]
    c = sigma[np.ix_(keep, meas)]
    try:
        return s_a - c @ np.linalg.solve(s_b + gamma, c.T)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("sigma_B + Gamma is singular") from exc


@dataclass(frozen=True)
class DiscordResult:
    value: float
    seed: MeasurementSeed
    converged: bool
    direction: str


def _discord_terms(sub: np.ndarray, probe: int):
    keep = 1 - probe
    s_k = sub[2 * keep : 2 * keep + 2, 2 * keep : 2 * keep + 2]
    s_p = sub[2 * probe : 2 * probe + 2, 2 * probe : 2 * probe + 2]
    c = sub[2 * keep : 2 * keep + 2, 2 * probe : 2 * probe + 2]
    log_ratio = np.log(np.linalg.det(s_p)) - np.log(np.linalg.det(sub))
    return s_k, s_p, c, log_ratio


def discord_objective(sigma, direction: str, log_squeeze: float, angle: float) -> float:
    """``1/2 ln(det sigma_probe det sigma~_other / det sigma)`` for one seed."""
    probe = _probe_index(direction)
    s_k, s_p, c, log_ratio = _discord_terms(np.asarray(sigma, dtype=float), probe)
    cond = s_k - c @ np.linalg.solve(s_p + _rotated_squeeze(log_squeeze, angle), c.T)
    return 0.5 * (log_ratio + np.log(np.linalg.det(cond)))


def _probe_index(direction: str) -> int:
    if direction in ("left", "<-"):
        return 1
    if direction in ("right", "->"):
        return 0
    raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")


def discord(
    sigma,
    direction: str = "left",
    config: OptimizerConfig = DEFAULT_CONFIG,
    tol: float = DEFAULT_TOL,
) -> DiscordResult:
    """Rényi-2 Gaussian discord of a two-mode CM.

    ``direction='left'`` probes mode B (the second mode), ``'right'`` probes
    mode A. The infimum runs over pure seeds with ``ln lam`` in ``[-8, 8]``
    (the homodyne limits are reached to within ``e^-8``).
    """
    sigma = require_physical(sigma, tol)
    if sigma.shape != (4, 4):
        raise ValueError("discord expects a two-mode CM")
    probe = _probe_index(direction)
    s_k, s_p, c, log_ratio = _discord_terms(sigma, probe)

    def fun(x):
        seed_cm = _rotated_squeeze(x[0], x[1])
        cond = s_k - c @ np.linalg.solve(s_p + seed_cm, c.T)
        return 0.5 * (log_ratio + np.log(np.linalg.det(cond)))

    bounds = [(-LOG_SQUEEZE_BOUND, LOG_SQUEEZE_BOUND), (-np.pi, 2 * np.pi)]
    rng = config.rng()
    n_restarts = config.n_restarts(16)
    starts = [np.array([0.0, 0.0]), np.array([LOG_SQUEEZE_BOUND, 0.0]),
              np.array([LOG_SQUEEZE_BOUND, np.pi / 2]), np.array([-LOG_SQUEEZE_BOUND, 0.0])]
    while len(starts) < n_restarts:
        starts.append(np.array([rng.uniform(*bounds[0]), rng.uniform(0, np.pi)]))
    starts = starts[:n_restarts]

    best, converged = None, True
    for x0 in starts:
        res = minimize(fun, x0, method="L-BFGS-B", bounds=bounds,
                       options=dict(maxiter=config.max_iterations, ftol=config.tol, gtol=1e-10))
        if best is None or res.fun < best.fun - 1e-15:
            best, converged = res, bool(res.success)
    polish = minimize(fun, best.x, method="Nelder-Mead", bounds=bounds,
                      options=dict(xatol=1e-10, fatol=config.tol, maxiter=config.max_iterations))
    x = polish.x if polish.fun <= best.fun else best.x
    value = float(min(polish.fun, best.fun))
    seed = MeasurementSeed(float(np.exp(x[0])), float(np.mod(x[1], np.pi)))
    return DiscordResult(max(value, 0.0), seed, converged, "left" if probe == 1 else "right")


# ------------------------------------------------------- tripartite residual


@dataclass(frozen=True)
class ResidualResult:
    value: float
    probe: int
    decompositions: tuple[float, float, float]
    pairwise: dict = field(repr=False)
    one_vs_rest: tuple[float, float, float] = ()
    converged: bool = True


def residual_tripartite(
    sigma,
    config: OptimizerConfig = DEFAULT_CONFIG,
    tol: float = DEFAULT_TOL,
) -> ResidualResult:
    """Residual (genuine) tripartite entanglement of a pure three-mode CM.

    The minimum over probe modes ``i`` of
    ``E_{i|(jk)} - E_{i|j} - E_{i|k}``, with the one-vs-two terms from the
    pure-state formula and the two-mode terms from the convex roof. Ties
    within 1e-6 go to the lowest probe index.
    """
    sigma = as_cm(sigma)
    if sigma.shape != (6, 6):
        raise ValueError("residual_tripartite expects a three-mode CM")
    report = validate_cm(sigma, tol)
    if not report.is_physical:
        raise UnphysicalCMError("CM is not physical")
    if not report.is_pure:
        raise PurityError("residual tripartite entanglement is only supported for pure states")
    pairwise = {}
    converged = True
    for i, j in ((0, 1), (0, 2), (1, 2)):
        res = gaussian_entanglement(reduce(sigma, [i, j]), config=config, tol=tol)
        pairwise[(i, j)] = pairwise[(j, i)] = res.value
        converged &= res.converged
    one_vs_rest = []
    for i in range(3):
        rest = [m for m in range(3) if m != i]
        one_vs_rest.append(pure_entanglement(sigma, ModePartition([i], rest), tol=tol))
    decomp = tuple(
        one_vs_rest[i] - sum(pairwise[(i, j)] for j in range(3) if j != i) for i in range(3)
    )
    lowest = min(decomp)
    probe = next(i for i in range(3) if decomp[i] <= lowest + TIE_TOL)
    return ResidualResult(float(lowest), probe, decomp, pairwise, tuple(one_vs_rest), converged)


def with_seed(config: OptimizerConfig, seed: int) -> OptimizerConfig:
    return replace(config, seed=int(seed))
