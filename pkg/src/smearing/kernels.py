"""Markov and weak Markov kernels on finite sets, and smearing by them.

A kernel is a dense ``|X| x |Y|`` real matrix whose row ``x`` is the
probability vector ``lambda(x, .)``.  A weak kernel only has to be
stochastic on rows where the reference observable is non-zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    IncompletePartitionMap,
    InputError,
    InvalidDefaultMeasure,
    InvalidKernel,
    OutcomeMismatch,
)
from .observables import Observable, ValidationReport, zero_set
from .operators import DEFAULT_TOL, Tolerance


def _labels(seq: Iterable[str], what: str) -> tuple[str, ...]:
    out = tuple(str(s) for s in seq)
    if not out:
        raise InputError(f"{what} outcome list is empty")
    if len(set(out)) != len(out):
        raise InputError(f"{what} outcome labels must be distinct")
    return out


@dataclass(frozen=True, eq=False)
class MarkovKernel:
    source: tuple[str, ...]
    target: tuple[str, ...]
    weights: np.ndarray

    def __init__(self, source: Sequence[str], target: Sequence[str], weights):
        src = _labels(source, "source")
        tgt = _labels(target, "target")
        w = np.array(weights, dtype=float)
        if w.shape != (len(src), len(tgt)):
            raise InputError(f"weights have shape {w.shape}, expected {(len(src), len(tgt))}")
        if not np.all(np.isfinite(w)):
            raise InputError("kernel weights must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "weights", w)

    def __repr__(self):
        return f"{type(self).__name__}({list(self.source)} -> {list(self.target)})"


@dataclass(frozen=True, eq=False, repr=False)
class WeakMarkovKernel(MarkovKernel):
    """Kernel that needs to be stochastic only off the null atoms of ``reference``."""

    reference: Observable = None

    def __init__(self, source, target, weights, reference: Observable):
        super().__init__(source, target, weights)
        if tuple(reference.outcomes) != self.source:
            raise OutcomeMismatch("reference outcomes differ from the kernel source")
        object.__setattr__(self, "reference", reference)


def _check_rows(weights: np.ndarray, rows, labels, tol: Tolerance) -> ValidationReport:
    report = ValidationReport()
    for i in rows:
        row = weights[i]
        low = -row.min()
        high = row.max() - 1.0
        if low > tol.eps_kernel:
            report.add("negative_entry", labels[i], low)
        if high > tol.eps_kernel:
            report.add("entry_above_one", labels[i], high)
        s = abs(row.sum() - 1.0)
        if s > tol.eps_kernel:
            report.add("row_sum", labels[i], s)
    return report


def validate_kernel(kernel: MarkovKernel, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Validate a kernel; weak kernels are checked only off their reference's null atoms."""
    if isinstance(kernel, WeakMarkovKernel):
        return validate_weak_kernel(kernel.weights, kernel.reference, tol)
    return _check_rows(kernel.weights, range(len(kernel.source)), kernel.source, tol)


def validate_weak_kernel(weights, M: Observable, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != len(M):
        raise InputError(f"weights have shape {w.shape}, observable has {len(M)} outcomes")
    null = set(zero_set(M, tol))
    rows = [i for i, label in enumerate(M.outcomes) if label not in null]
    return _check_rows(w, rows, M.outcomes, tol)


def smear(M: Observable, kernel: MarkovKernel, tol: Tolerance = DEFAULT_TOL) -> Observable:
    """The smeared observable ``N(y) = sum_x lambda(x, y) M(x)`` on the kernel's target."""
    if tuple(kernel.source) != tuple(M.outcomes):
        raise OutcomeMismatch("kernel source does not match the observable's outcomes")
    if isinstance(kernel, WeakMarkovKernel) and kernel.reference is not M:
        ref = kernel.reference
        if ref.effects.shape != M.effects.shape or not np.array_equal(ref.effects, M.effects):
            raise OutcomeMismatch("weak kernel refers to a different observable")
    report = validate_kernel(kernel, tol)
    if not report.ok:
        worst = max(report.violations, key=lambda v: v.defect)
        raise InvalidKernel(f"invalid kernel: {worst.kind} at row {worst.where} ({worst.defect:.3e})")
    return smear_weights(M, kernel.weights, kernel.target)


def smear_weights(M: Observable, weights: np.ndarray, target: Sequence[str]) -> Observable:
    """Unchecked smearing by a raw weight matrix."""
    effects = np.einsum("xy,xij->yij", np.asarray(weights, dtype=float), M.effects)
    return Observable(target, effects)


def compose(first: MarkovKernel, second: MarkovKernel) -> MarkovKernel:
    """Kernel of "apply ``first`` then ``second``": the matrix product."""
    if tuple(first.target) != tuple(second.source):
        raise OutcomeMismatch("kernels do not chain")
    return MarkovKernel(first.source, second.target, first.weights @ second.weights)


def _default_measure(mu, n: int, tol: Tolerance) -> np.ndarray:
    if mu is None:
        return np.full(n, 1.0 / n)
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (n,) or not np.all(np.isfinite(mu)):
        raise InvalidDefaultMeasure(f"default measure must have {n} finite entries")
    if mu.min() < -tol.eps_kernel or abs(mu.sum() - 1.0) > tol.eps_kernel:
        raise InvalidDefaultMeasure("default measure is not a probability vector")
    return mu


def regularize(kernel: WeakMarkovKernel, mu=None, tol: Tolerance = DEFAULT_TOL) -> MarkovKernel:
    """Turn a weak kernel into a Markov kernel with the same smearing.

    Rows off the reference's null class are clamped to [0, 1] and
    renormalised; rows on it are replaced by ``mu`` (uniform by default).
    """
    M = kernel.reference
    report = validate_weak_kernel(kernel.weights, M, tol)
    if not report.ok:
        raise InvalidKernel(f"weak kernel is invalid w.r.t. its reference: {report.kinds()}")
    mu = _default_measure(mu, len(kernel.target), tol)
    null = set(zero_set(M, tol))
    w = np.clip(kernel.weights, 0.0, 1.0)
    for i, label in enumerate(M.outcomes):
        if label in null:
            w[i] = mu
        else:
            w[i] = w[i] / w[i].sum()
    return MarkovKernel(kernel.source, kernel.target, w)


def is_zero_one(weights, M: Observable, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff every entry off the null class of ``M`` is within ``eps_kernel`` of 0 or 1."""
    w = np.asarray(weights, dtype=float)
    null = set(zero_set(M, tol))
    rows = [i for i, label in enumerate(M.outcomes) if label not in null]
    if not rows:
        return True
    sub = w[rows]
    return bool(np.all(np.minimum(np.abs(sub), np.abs(sub - 1.0)) <= tol.eps_kernel))


def indicator_kernel(
    assignment: Mapping[str, str],
    null_class: Iterable[str],
    source: Sequence[str],
    target: Sequence[str],
    mu=None,
    tol: Tolerance = DEFAULT_TOL,
) -> MarkovKernel:
    """Kernel with row ``x`` the point mass at ``assignment[x]``, or ``mu`` on the null class."""
    source = _labels(source, "source")
    target = _labels(target, "target")
    null = set(null_class)
    mu = _default_measure(mu, len(target), tol)
    w = np.zeros((len(source), len(target)))
    for i, x in enumerate(source):
        if x in null:
            w[i] = mu
            continue
        if x not in assignment:
            raise IncompletePartitionMap(f"no target assigned to outcome {x!r}")
        y = assignment[x]
        if y not in target:
            raise IncompletePartitionMap(f"outcome {x!r} assigned to unknown target {y!r}")
        w[i, target.index(y)] = 1.0
    return MarkovKernel(source, target, w)
