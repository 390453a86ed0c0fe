"""Kernel search by linear feasibility, the smearing preorder and cleanness."""
from __future__ import annotations

import numpy as np

from ..errors import AlreadyClean, DimensionMismatch, NumericalBreakdown
from ..kernels import MarkovKernel, smear_weights
from ..lp import LinearFeasibilityProblem, solve_feasibility
from ..observables import Observable, SharpObservable, as_sharp
from ..operators import DEFAULT_TOL, Tolerance, dagger, op_norm


def _realify(mats: np.ndarray) -> np.ndarray:
    """Real coordinates of Hermitian matrices: diagonal, then Re/Im of the upper triangle.

    ``mats`` has shape ``(..., d, d)``; the result has shape ``(..., d*d)``.
    """
    d = mats.shape[-1]
    iu = np.triu_indices(d, 1)
    diag = np.einsum("...ii->...i", mats).real
    upper = mats[..., iu[0], iu[1]]
    return np.concatenate([diag, upper.real, upper.imag], axis=-1)


def kernel_lp(M: Observable, N: Observable, tol: Tolerance = DEFAULT_TOL) -> LinearFeasibilityProblem:
    """Feasibility problem for ``lambda`` with ``sum_x lambda(x, y) M(x) = N(y)``.

    Variable ``lambda(x, y)`` sits at index ``x * |Y| + y``.  Rows: ``d^2``
    real equations per target outcome, then one row sum per source outcome.
    """
    if M.dim != N.dim:
        raise DimensionMismatch(f"dimensions {M.dim} and {N.dim} differ")
    nx, ny = len(M), len(N)
    m_coords = _realify(M.effects)  # (nx, d^2)
    n_coords = _realify(N.effects)  # (ny, d^2)
    d2 = m_coords.shape[1]
    A = np.zeros((ny * d2 + nx, nx * ny))
    b = np.zeros(ny * d2 + nx)
    for y in range(ny):
        A[y * d2 : (y + 1) * d2, y::ny] = m_coords.T
        b[y * d2 : (y + 1) * d2] = n_coords[y]
    for x in range(nx):
        A[ny * d2 + x, x * ny : (x + 1) * ny] = 1.0
        b[ny * d2 + x] = 1.0
    return LinearFeasibilityProblem(
        A,
        b,
        0.0,
        1.0,
        tol.eps_kernel,
        description=f"kernel {list(M.outcomes)} -> {list(N.outcomes)}, dim {M.dim}",
    )


def atomwise_defect(M: Observable, weights: np.ndarray, N: Observable) -> float:
    return float(np.max(op_norm(smear_weights(M, weights, N.outcomes).effects - N.effects)))


def find_kernel(M: Observable, N: Observable, tol: Tolerance = DEFAULT_TOL):
    """A Markov kernel ``lambda`` with ``N = lambda o M``, or ``None`` if infeasible."""
    problem = kernel_lp(M, N, tol)
    x = solve_feasibility(problem)
    if x is None:
        return None
    weights = x.reshape(len(M), len(N))
    defect = atomwise_defect(M, weights, N)
    if defect > 10 * tol.eps_kernel:
        raise NumericalBreakdown(f"LP kernel reproduces the target only to {defect:.2e}")
    return MarkovKernel(M.outcomes, N.outcomes, weights)


def preceq(M: Observable, N: Observable, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``M <= N``: ``N`` is a smearing of ``M``."""
    return find_kernel(M, N, tol) is not None


def equivalent(M: Observable, N: Observable, tol: Tolerance = DEFAULT_TOL) -> bool:
    return preceq(M, N, tol) and preceq(N, M, tol)


def _ranks(P: Observable) -> list[int]:
    # trace of a projection is its rank
    return [int(round(t)) for t in np.trace(P.effects, axis1=1, axis2=2).real]


def is_clean_sharp(P: Observable, tol: Tolerance = DEFAULT_TOL) -> bool:
    """A PVM is clean iff it consists of ``d`` rank-1 projections plus zero atoms."""
    P = as_sharp(P, tol)
    ranks = _ranks(P)
    return all(r in (0, 1) for r in ranks) and sum(r == 1 for r in ranks) == P.dim


def finer_sharp(P: Observable, tol: Tolerance = DEFAULT_TOL) -> SharpObservable:
    """Rank-1 PVM refining ``P``: each block split along an eigenbasis.

    Outcome ``"<y>.<k>"`` is the ``k``-th rank-1 piece of block ``y``.

    Raises
    ------
    AlreadyClean
        If ``P`` is already clean, so no strict refinement exists.
    """
    P = as_sharp(P, tol)
    if is_clean_sharp(P, tol):
        raise AlreadyClean("observable is already a rank-1 PVM")
    labels, atoms = [], []
    for y, proj, r in zip(P.outcomes, P.effects, _ranks(P)):
        if r == 0:
            continue
        w, u = np.linalg.eigh(0.5 * (proj + dagger(proj)))
        vecs = u[:, np.argsort(-w, kind="stable")[:r]]
        for k in range(r):
            v = vecs[:, k : k + 1]
            labels.append(f"{y}.{k}")
            atoms.append(v @ dagger(v))
    return SharpObservable(labels, atoms)
