"""Dense complex matrix helpers: predicates, spectra and support projections.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  All equality
tests are absolute and measured in operator norm; inputs are expected to be
O(1)-normalised (effects lie below the identity).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InputError, NotHermitian, NotPSD


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds shared by every check in the library.

    Attributes
    ----------
    eps_herm : float
        Largest admissible entry of ``A - A^dagger``.
    eps_psd : float
        Eigenvalue floor; eigenvalues above ``eps_psd`` count as support.
    eps_eq : float
        Matrix equality bound in operator norm.
    eps_kernel : float
        Bound on kernel entries and row sums, and the slack of kernel LPs.
    """

    eps_herm: float = 1e-9
    eps_psd: float = 1e-9
    eps_eq: float = 1e-9
    eps_kernel: float = 1e-7

    def __post_init__(self):
        for name in ("eps_herm", "eps_psd", "eps_eq", "eps_kernel"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InputError(f"tolerance {name} must be positive, got {value!r}")


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a square, finite ``complex128`` array (a copy)."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InputError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def op_norm(a: np.ndarray) -> float | np.ndarray:
    """Largest singular value, via the spectrum of ``A^dagger A``.

    Works on a single matrix or a stack of matrices (leading axes).
    """
    a = np.asarray(a, dtype=np.complex128)
    gram = dagger(a) @ a
    gram = 0.5 * (gram + dagger(gram))
    top = np.linalg.eigvalsh(gram)[..., -1]
    out = np.sqrt(np.maximum(top, 0.0))
    return float(out) if out.ndim == 0 else out


def hermitian_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - dagger(a)), initial=0.0))


def is_hermitian(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    return hermitian_defect(as_matrix(a)) <= tol.eps_herm


def effect_defect(a: np.ndarray) -> float:
    """How far the spectrum of a Hermitian matrix sticks out of [0, 1]."""
    ev = np.linalg.eigvalsh(0.5 * (a + dagger(a)))
    return float(max(0.0, -ev[0], ev[-1] - 1.0))


def is_effect(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    if hermitian_defect(a) > tol.eps_herm:
        return False
    return effect_defect(a) <= tol.eps_psd


def projection_defect(a: np.ndarray) -> float:
    return op_norm(a @ a - a)


def is_projection(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    if hermitian_defect(a) > tol.eps_herm:
        return False
    return projection_defect(a) <= tol.eps_eq


def hermitian_eig(a, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition ``A = U diag(w) U^dagger`` of a Hermitian matrix.

    Eigenvalues come back ascending; the columns of ``U`` are orthonormal.

    Raises
    ------
    NotHermitian
        If ``A`` fails :func:`is_hermitian`.
    """
    a = as_matrix(a)
    defect = hermitian_defect(a)
    if defect > tol.eps_herm:
        raise NotHermitian(f"matrix is not Hermitian (defect {defect:.3e})")
    w, u = np.linalg.eigh(0.5 * (a + dagger(a)))
    return w, u


def support_projection(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Projection onto the eigenvectors of ``A`` with eigenvalue above ``eps_psd``."""
    w, u = hermitian_eig(a, tol)
    if w[0] < -tol.eps_psd:
        raise NotPSD(f"matrix has negative eigenvalue {w[0]:.3e}")
    v = u[:, w > tol.eps_psd]
    return v @ dagger(v)


def support_basis(a: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns spanning the support of a PSD matrix."""
    w, u = hermitian_eig(a, tol)
    return u[:, w > tol.eps_psd]


def commutator_norm(a, b) -> float:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return op_norm(a @ b - b @ a)
