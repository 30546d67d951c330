"""Covariance-matrix primitives for zero-mean N-mode Gaussian states.

Conventions used throughout the package:

* quadratures are ordered ``(q_1, p_1, ..., q_N, p_N)``;
* the covariance matrix (CM) is ``sigma_jk = <{R_j, R_k}>`` so that the
  vacuum CM is the identity;
* modes are indexed from zero in the Python API.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import schur

DEFAULT_TOL = 1e-9
SYMMETRY_TOL = 1e-10

_OMEGA1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


class CovarianceError(ValueError):
    """Base class for rejected covariance matrices."""


class MalformedCMError(CovarianceError):
    """Input is not a square, even-dimensioned, (nearly) symmetric real matrix."""


class UnphysicalCMError(CovarianceError):
    """The CM violates the uncertainty principle ``sigma + i Omega >= 0``."""


class NumericalDomainError(ArithmeticError):
    """A quantity is undefined for the given matrix (e.g. not positive definite)."""


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return the ``2N x 2N`` symplectic form, a direct sum of ``[[0, 1], [-1, 0]]``."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise ValueError(f"n_modes must be a positive integer, got {n_modes!r}")
    return np.kron(np.eye(int(n_modes)), _OMEGA1)


def as_cm(sigma, *, symmetry_tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Ingest ``sigma`` as a float CM.

    Small asymmetries (``max |sigma - sigma^T| <= symmetry_tol``, scaled by
    the largest entry when that exceeds one) are removed by symmetrizing.
    The returned array is a read-only copy.
    """
    arr = np.array(sigma, dtype=float, copy=True)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MalformedCMError(f"CM must be a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[0] % 2:
        raise MalformedCMError(f"CM dimension must be even and positive, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise MalformedCMError("CM contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(arr))))
    if np.max(np.abs(arr - arr.T)) > symmetry_tol * scale:
        raise MalformedCMError("CM is not symmetric")
    arr = 0.5 * (arr + arr.T)
    arr.setflags(write=False)
    return arr


def n_modes(sigma: np.ndarray) -> int:
    return np.shape(sigma)[0] // 2


def effective_tol(sigma: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """Tolerance floor that tracks the floating-point conditioning of ``sigma``.

    Strongly squeezed states have condition numbers far above 1e6, at which
    point determinants and symplectic eigenvalues cannot be resolved to an
    absolute 1e-9. The floor is ``64 eps cond(sigma)``.
    """
    cond = float(np.linalg.cond(sigma))
    if not np.isfinite(cond):
        return tol
    return max(tol, 64.0 * np.finfo(float).eps * cond)


def _mode_indices(modes: Iterable[int], n: int) -> list[int]:
    modes = [int(m) for m in modes]
    if len(set(modes)) != len(modes):
        raise ValueError(f"duplicate mode index in {modes}")
    for m in modes:
        if not 0 <= m < n:
            raise IndexError(f"mode index {m} out of range for {n} modes")
    return [i for m in modes for i in (2 * m, 2 * m + 1)]


def reduce(sigma, modes: Sequence[int]) -> np.ndarray:
    """Reduced CM on ``modes``, kept in the order given."""
    sigma = np.asarray(sigma, dtype=float)
    idx = _mode_indices(modes, n_modes(sigma))
    if not idx:
        raise ValueError("at least one mode must be kept")
    return sigma[np.ix_(idx, idx)]


def partial_transpose(sigma, modes: Iterable[int]) -> np.ndarray:
    """Flip the sign of ``p_k`` for every ``k`` in ``modes``."""
    sigma = np.asarray(sigma, dtype=float)
    n = n_modes(sigma)
    idx = _mode_indices(modes, n)
    flip = np.ones(2 * n)
    flip[idx[1::2]] = -1.0
    return flip[:, None] * sigma * flip[None, :]


def _cholesky(sigma: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise NumericalDomainError("matrix is not positive definite") from exc


def symplectic_eigenvalues(sigma) -> np.ndarray:
    """Williamson spectrum of ``sigma`` in ascending order.

    Computed as the positive eigenvalues of the Hermitian matrix
    ``i L^T Omega L`` with ``sigma = L L^T``; these coincide with the moduli of
    the eigenvalues of ``i Omega sigma``.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = n_modes(sigma)
    low = _cholesky(sigma)
    herm = 1j * (low.T @ symplectic_form(n) @ low)
    ev = np.linalg.eigvalsh(herm)
    return np.sort(ev[n:])


def williamson(sigma) -> tuple[np.ndarray, np.ndarray]:
    """Williamson decomposition ``sigma = S diag(nu_1, nu_1, ..., nu_N, nu_N) S^T``.

    Returns ``(S, nu)`` with ``S`` symplectic and ``nu`` in ascending order.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = n_modes(sigma)
    w, v = np.linalg.eigh(sigma)
    if w[0] <= 0:
        raise NumericalDomainError("matrix is not positive definite")
    root = (v * np.sqrt(w)) @ v.T
    m = root @ symplectic_form(n) @ root
    t, q = schur(0.5 * (m - m.T), output="real")
    nu = np.empty(n)
    cols = []
    for k in range(n):
        a = t[2 * k, 2 * k + 1]
        pair = [2 * k, 2 * k + 1] if a > 0 else [2 * k + 1, 2 * k]
        cols.extend(pair)
        nu[k] = abs(a)
    q = q[:, cols]
    order = np.argsort(nu, kind="stable")
    nu = nu[order]
    q = q[:, [i for k in order for i in (2 * k, 2 * k + 1)]]
    s = root @ q / np.sqrt(np.repeat(nu, 2))[None, :]
    return s, nu


@dataclass(frozen=True)
class Validity:
    is_symmetric: bool
    is_physical: bool
    is_pure: bool
    min_symplectic_eigenvalue: float


def validate_cm(sigma, tol: float = DEFAULT_TOL) -> Validity:
    """Report symmetry, physicality and purity of a candidate CM."""
    arr = np.asarray(sigma, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
        raise MalformedCMError(f"CM must be square with even dimension, got shape {arr.shape}")
    symmetric = bool(np.max(np.abs(arr - arr.T)) <= SYMMETRY_TOL * max(1.0, np.max(np.abs(arr))))
    sym = 0.5 * (arr + arr.T)
    try:
        nu_min = float(symplectic_eigenvalues(sym)[0])
    except NumericalDomainError:
        return Validity(symmetric, False, False, float("nan"))
    tol_eff = effective_tol(sym, tol)
    physical = nu_min >= 1.0 - tol_eff
    pure = physical and abs(np.linalg.det(sym) - 1.0) <= tol_eff
    return Validity(symmetric, bool(physical), bool(pure), nu_min)


def is_pure(sigma, tol: float = DEFAULT_TOL) -> bool:
    return validate_cm(sigma, tol).is_pure


def require_physical(sigma, tol: float = DEFAULT_TOL) -> np.ndarray:
    sigma = as_cm(sigma)
    report = validate_cm(sigma, tol)
    if not report.is_physical:
        raise UnphysicalCMError(
            f"CM violates the uncertainty principle (min symplectic eigenvalue "
            f"{report.min_symplectic_eigenvalue:.6g} < 1)"
        )
    return sigma


def wigner(sigma, xi) -> float:
    """Gaussian Wigner function ``pi^-N det(sigma/2)^-1/2 exp(-xi^T (sigma/2)^-1 xi)``.

    ``xi`` may carry leading batch dimensions; the last axis has length ``2N``.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = n_modes(sigma)
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != 2 * n:
        raise ValueError(f"phase-space vector must have length {2 * n}")
    half = 0.5 * sigma
    low = _cholesky(half)
    z = np.linalg.solve(low, np.moveaxis(xi, -1, 0).reshape(2 * n, -1))
    quad = np.sum(z * z, axis=0).reshape(xi.shape[:-1])
    norm = np.pi ** (-n) / np.prod(np.diag(low))
    out = norm * np.exp(-quad)
    return float(out) if out.ndim == 0 else out


def renyi2_entropy(sigma, tol: float = DEFAULT_TOL) -> float:
    """Rényi-2 entropy ``1/2 ln det sigma`` of a Gaussian state."""
    sigma = np.asarray(sigma, dtype=float)
    det = np.linalg.det(sigma)
    if det < 1.0 - effective_tol(sigma, tol):
        raise UnphysicalCMError(f"det sigma = {det:.6g} < 1 is not a physical state")
    return 0.5 * float(np.log(max(det, 1.0)))


def mode_populations(sigma) -> np.ndarray:
    """Mean excitation number of each mode, ``tr(sigma_j)/4 - 1/2``."""
    sigma = np.asarray(sigma, dtype=float)
    diag = np.diag(sigma).reshape(-1, 2).sum(axis=1)
    return diag / 4.0 - 0.5


@dataclass(frozen=True)
class ModePartition:
    """Disjoint groups of (zero-based) mode indices."""

    party_a: frozenset[int]
    party_b: frozenset[int]
    party_c: frozenset[int] | None = None

    def __init__(self, party_a, party_b, party_c=None):
        object.__setattr__(self, "party_a", frozenset(int(i) for i in party_a))
        object.__setattr__(self, "party_b", frozenset(int(i) for i in party_b))
        if party_c is not None:
            party_c = frozenset(int(i) for i in party_c)
        object.__setattr__(self, "party_c", party_c)
        parties = self.parties
        if any(not p for p in parties):
            raise ValueError("every party needs at least one mode")
        seen: set[int] = set()
        for p in parties:
            if seen & p:
                raise ValueError(f"mode(s) {sorted(seen & p)} assigned to two parties")
            if min(p) < 0:
                raise IndexError("mode indices must be nonnegative")
            seen |= p

    @property
    def parties(self) -> tuple[frozenset[int], ...]:
        if self.party_c is None:
            return (self.party_a, self.party_b)
        return (self.party_a, self.party_b, self.party_c)

    @property
    def modes(self) -> list[int]:
        return [m for p in self.parties for m in sorted(p)]

    def check(self, n: int) -> None:
        for m in self.modes:
            if m >= n:
                raise IndexError(f"mode index {m} out of range for {n} modes")

    @classmethod
    def parse(cls, text: str) -> "ModePartition":
        """Parse ``"1|2"`` or ``"1|23"``/``"1|2,3"`` with one-based mode labels."""
        parties = []
        for chunk in text.split("|"):
            chunk = chunk.strip()
            labels = chunk.split(",") if "," in chunk else list(chunk)
            try:
                parties.append([int(x) - 1 for x in labels if x.strip()])
            except ValueError as exc:
                raise ValueError(f"cannot parse partition {text!r}") from exc
        if len(parties) not in (2, 3):
            raise ValueError(f"partition {text!r} must have two or three parties")
        return cls(*parties)

    def label(self) -> str:
        return "|".join("".join(str(m + 1) for m in sorted(p)) for p in self.parties)


def two_mode_squeezed_vacuum(r: float) -> np.ndarray:
    """CM of the two-mode squeezed vacuum with squeezing ``r``."""
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    z = np.diag([1.0, -1.0])
    return np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])


def thermal(*occupations: float) -> np.ndarray:
    """Product of thermal states with the given mean occupations."""
    occ = np.asarray(occupations, dtype=float)
    if occ.size == 0 or np.any(occ < 0):
        raise ValueError("occupations must be nonnegative and at least one is needed")
    return np.diag(np.repeat(2 * occ + 1, 2))
