"""Extremality: the symmetric kernel perturbation and a rank test for extreme POVMs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidKernel, UnknownOutcomeLabel
from ..kernels import validate_weak_kernel
from ..observables import Observable
from ..operators import DEFAULT_TOL, Tolerance, op_norm, support_basis

RANK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Perturbation:
    plus: np.ndarray
    minus: np.ndarray
    defect: float

    def to_dict(self) -> dict:
        return {"nu_plus": self.plus.tolist(), "nu_minus": self.minus.tolist(), "defect": self.defect}


def perturbation_bracket(weights: np.ndarray, in_b1: np.ndarray) -> np.ndarray:
    """Per-atom bracket ``nu(x,B1) nu(x,b) [b not in B1] - nu(x,B1^c) nu(x,b) [b in B1]``."""
    mass_in = weights[:, in_b1].sum(axis=1, keepdims=True)
    mass_out = weights[:, ~in_b1].sum(axis=1, keepdims=True)
    return np.where(in_b1[None, :], -mass_out * weights, mass_in * weights)


def extremal_perturbation_check(
    parent: Observable, kernel, b1, tol: Tolerance = DEFAULT_TOL, *, target=None
) -> Perturbation:
    """Split ``nu`` into ``(nu_plus + nu_minus) / 2`` along the subset ``b1`` of the target.

    ``kernel`` is a kernel object or a raw weight matrix (then ``target``
    names its columns).  ``defect`` is the largest operator norm of ``(nu_plus o parent)(b) -
    (nu_minus o parent)(b)`` over target atoms ``b``.  It vanishes whenever
    the smeared observable is extremal.

    Raises
    ------
    InvalidKernel
        If the weights are not a weak Markov kernel w.r.t. ``parent``.
    UnknownOutcomeLabel
        If ``b1`` names an outcome not in ``target``.
    """
    if hasattr(kernel, "weights"):
        w, target = np.asarray(kernel.weights, dtype=float), tuple(kernel.target)
    else:
        w = np.asarray(kernel, dtype=float)
        target = tuple(target) if target is not None else tuple(str(i) for i in range(w.shape[-1]))
    if w.shape != (len(parent), len(target)):
        raise InvalidKernel(f"weights have shape {w.shape}, expected {(len(parent), len(target))}")
    report = validate_weak_kernel(w, parent, tol)
    if not report.ok:
        raise InvalidKernel(f"not a weak Markov kernel w.r.t. the parent: {report.kinds()}")
    unknown = set(b1).difference(target)
    if unknown:
        raise UnknownOutcomeLabel(f"unknown target outcomes {sorted(unknown)}")
    in_b1 = np.array([t in set(b1) for t in target])
    bracket = perturbation_bracket(w, in_b1)
    diff = np.einsum("xy,xij->yij", 2.0 * bracket, parent.effects)
    return Perturbation(w + bracket, w - bracket, float(np.max(op_norm(diff))))


def _hermitian_basis(r: int) -> list[np.ndarray]:
    basis = []
    for i in range(r):
        e = np.zeros((r, r), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(r):
        for j in range(i + 1, r):
            s = np.zeros((r, r), dtype=complex)
            s[i, j] = s[j, i] = 1.0
            a = np.zeros((r, r), dtype=complex)
            a[i, j], a[j, i] = 1j, -1j
            basis += [s, a]
    return basis


def is_extremal(M: Observable, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff no nonzero Hermitian family ``D_x`` supported in ``supp M(x)`` sums to zero.

    Each ``D_x = V_x H_x V_x^dagger`` with ``V_x`` a support basis; the
    family is unique iff the linear map ``(H_x) -> sum_x D_x`` is injective.
    """
    columns = []
    for e in M.effects:
        v = support_basis(e, tol)
        for h in _hermitian_basis(v.shape[1]):
            d = v @ h @ v.conj().T
            columns.append(np.concatenate([d.real.ravel(), d.imag.ravel()]))
    if not columns:
        return True
    A = np.array(columns).T
    if A.shape[1] > A.shape[0]:
        return False
    return int(np.linalg.matrix_rank(A, tol=RANK_TOL)) == A.shape[1]
