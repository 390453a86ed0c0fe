"""Sharp parents of observables with commutative range.

An observable whose atoms commute is a smearing of the PV measure formed by
the joint eigenspaces of its atoms; the kernel reads off each atom's
eigenvalue on each joint eigenspace.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonCommutativeRange, NumericalFailure
from ..kernels import WeakMarkovKernel, smear_weights
from ..observables import Observable, SharpObservable, noncommuting_pair, require_valid
from ..operators import DEFAULT_TOL, Tolerance, dagger, op_norm

GROUPING_THRESHOLD = 1e-6
MAX_REDRAWS = 8


@dataclass(frozen=True, eq=False)
class SharpParent:
    parent: SharpObservable
    kernel: WeakMarkovKernel
    joint_eigenvalues: np.ndarray
    defect: float

    def to_dict(self) -> dict:
        from ..serialization import kernel_to_dict, observable_to_dict

        return {
            "parent": observable_to_dict(self.parent),
            "kernel": kernel_to_dict(self.kernel),
            "joint_eigenvalues": self.joint_eigenvalues.tolist(),
            "defect": self.defect,
        }


def _offdiag(M: Observable, u: np.ndarray) -> float:
    rotated = dagger(u) @ M.effects @ u
    off = rotated - np.einsum("xii->xi", rotated)[..., None] * np.eye(u.shape[0])
    return float(np.max(np.abs(off), initial=0.0))


def _refine_basis(effects, vecs: np.ndarray, level: int, tol: float) -> np.ndarray:
    """Split ``span(vecs)`` along the eigenspaces of the next atom, recursively."""
    if level == len(effects) or vecs.shape[1] <= 1:
        return vecs
    sub = dagger(vecs) @ effects[level] @ vecs
    w, u = np.linalg.eigh(0.5 * (sub + dagger(sub)))
    vecs = vecs @ u
    out = []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > tol:
            out.append(_refine_basis(effects, vecs[:, start:k], level + 1, tol))
            start = k
    return np.concatenate(out, axis=1)


def joint_eigenbasis(M: Observable, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> np.ndarray:
    """Unitary whose columns diagonalise every atom of a commuting family.

    Diagonalises a random positive combination of the atoms; re-draws the
    coefficients if a near-degeneracy leaves some atom non-diagonal, then
    falls back to splitting eigenspaces atom by atom.
    """
    rng = np.random.default_rng(seed)
    for _ in range(1 + MAX_REDRAWS):
        c = rng.uniform(1.0, 2.0, size=len(M))
        T = np.einsum("x,xij->ij", c, M.effects)
        _, u = np.linalg.eigh(0.5 * (T + dagger(T)))
        if _offdiag(M, u) <= tol.eps_eq:
            return u
    u = _refine_basis(M.effects, np.eye(M.dim, dtype=complex), 0, GROUPING_THRESHOLD)
    if _offdiag(M, u) <= tol.eps_eq:
        return u
    raise NumericalFailure("could not jointly diagonalise the atoms")


def sharp_parent(M: Observable, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> SharpParent:
    """Construct ``(P, nu)`` with ``P`` sharp and ``M = nu o P``.

    Raises
    ------
    NonCommutativeRange
        If two atoms of ``M`` fail to commute; carries the pair and norm.
    """
    require_valid(M, tol)
    bad = noncommuting_pair(M, tol)
    if bad is not None:
        raise NonCommutativeRange(bad[:2], bad[2])
    u = joint_eigenbasis(M, tol, seed)
    # joint eigenvalue vector of every basis column: <u_j|M(x)|u_j>
    values = np.einsum("ij,xik,kj->jx", u.conj(), M.effects, u).real

    groups: list[list[int]] = []
    for j in range(M.dim):
        for g in groups:
            if np.max(np.abs(values[g[0]] - values[j])) < GROUPING_THRESHOLD:
                g.append(j)
                break
        else:
            groups.append([j])

    def order_key(g):
        col = u[:, g[0]]
        return (int(np.argmax(np.abs(col) > np.abs(col).max() - 1e-9)), tuple(-values[g[0]]))

    groups.sort(key=order_key)
    projections = [u[:, g] @ dagger(u[:, g]) for g in groups]
    joint = np.array([values[g].mean(axis=0) for g in groups])
    labels = [f"p{i}" for i in range(len(groups))]
    P = SharpObservable(labels, projections)
    kernel = WeakMarkovKernel(labels, M.outcomes, joint, reference=P)
    rebuilt = smear_weights(P, joint, M.outcomes)
    defect = float(np.max(op_norm(rebuilt.effects - M.effects)))
    return SharpParent(P, kernel, joint, defect)
