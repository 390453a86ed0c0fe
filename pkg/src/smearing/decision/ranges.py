"""Range containment for sharp targets, functions of observables, indicator kernels."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, TooLarge
from ..kernels import MarkovKernel, indicator_kernel
from ..observables import Observable, SharpObservable, as_sharp, is_sharp, zero_set
from ..operators import DEFAULT_TOL, Tolerance, op_norm

BRUTE_FORCE_LIMIT = 20
ENUMERATION_LIMIT = 10**6
_CHUNK = 4096


@dataclass(frozen=True)
class BlockPartition:
    """Assignment of the non-null atoms of ``M`` to outcomes of ``P``.

    Certifies ``P(y) = M(preimage(y))`` for every ``y``; ``defect`` is the
    largest operator-norm error of those identities.
    """

    assignment: dict = field(hash=False)
    null_class: tuple
    defect: float = 0.0

    def preimage(self, y: str) -> list[str]:
        return [x for x, t in self.assignment.items() if t == y]

    def to_dict(self) -> dict:
        return {
            "assignment": dict(self.assignment),
            "null_class": list(self.null_class),
            "defect": self.defect,
        }


def _same_dim(P: Observable, M: Observable) -> None:
    if P.dim != M.dim:
        raise DimensionMismatch(f"dimensions {P.dim} and {M.dim} differ")


def _preimage_sums(M: Observable, target: tuple, f: dict) -> np.ndarray:
    sums = np.zeros((len(target), M.dim, M.dim), dtype=np.complex128)
    pos = {y: i for i, y in enumerate(target)}
    for x, e in zip(M.outcomes, M.effects):
        if x in f:
            sums[pos[f[x]]] = sums[pos[f[x]]] + e
    return sums


def block_partition(P: SharpObservable, M: Observable, tol: Tolerance = DEFAULT_TOL):
    """Partition of ``M``'s non-null atoms into blocks summing to ``P``'s atoms.

    Atom ``x`` can only sit in block ``y`` if ``P(y) M(x) = M(x)``, i.e. the
    support of ``M(x)`` lies under ``P(y)``.  Returns ``None`` when some atom
    fits no block (or several), or when the blocks do not add up to ``P``.
    """
    _same_dim(P, M)
    null = zero_set(M, tol)
    assignment = {}
    for x, e in zip(M.outcomes, M.effects):
        if x in null:
            continue
        fits = [y for y, p in zip(P.outcomes, P.effects) if op_norm(p @ e - e) <= tol.eps_eq]
        if len(fits) != 1:
            return None
        assignment[x] = fits[0]
    sums = _preimage_sums(M, P.outcomes, assignment)
    defect = float(np.max(op_norm(sums - P.effects)))
    if defect > len(M) * tol.eps_eq:
        return None
    return BlockPartition(assignment, null, defect)


def contains_range(P: SharpObservable, M: Observable, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Is every effect ``P(B)`` also an effect ``M(A)``?"""
    return block_partition(P, M, tol) is not None


def _subset_sums(M: Observable):
    """Yield ``(masks, M(S))`` chunks over all subsets, ``S`` encoded as bitmasks."""
    n = len(M)
    for start in range(0, 2**n, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, 2**n))
        bits = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
        yield masks, np.einsum("sx,xij->sij", bits, M.effects)


def brute_force_contains_range(P: SharpObservable, M: Observable, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Oracle: search all ``2^|X|`` subsets for each atom of ``P``."""
    _same_dim(P, M)
    if len(M) > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{len(M)} outcomes exceed the enumeration limit {BRUTE_FORCE_LIMIT}")
    bound = len(M) * tol.eps_eq
    found = np.zeros(len(P), dtype=bool)
    for _, sums in _subset_sums(M):
        for k, p in enumerate(P.effects):
            if not found[k]:
                found[k] = bool(np.any(op_norm(sums - p) <= bound))
        if found.all():
            return True
    return bool(found.all())


def _extend_to_null(f: dict, null, N: Observable) -> dict:
    """Send null atoms to the target outcome of largest trace (first in order)."""
    if not null:
        return f
    traces = np.trace(N.effects, axis1=1, axis2=2).real
    default = N.outcomes[int(np.argmax(traces))]
    return {**f, **{x: default for x in null}}


def function_of(P: SharpObservable, M: Observable, tol: Tolerance = DEFAULT_TOL):
    """Map ``f: X -> Y`` with ``P(y) = M(f^-1(y))``, or ``None``."""
    part = block_partition(P, M, tol)
    if part is None:
        return None
    f = _extend_to_null(part.assignment, part.null_class, P)
    return {x: f[x] for x in M.outcomes}


def find_indicator_kernel(
    M: Observable, N: Observable, tol: Tolerance = DEFAULT_TOL, *, exhaustive: bool = False
):
    """Map ``f: X -> Y`` whose indicator kernel smears ``M`` into ``N``, or ``None``.

    When ``N`` is sharp the block partition answers directly; pass
    ``exhaustive=True`` to enumerate assignments anyway (an independent
    check).  Enumeration is capped at ``10**6`` assignments.
    """
    _same_dim(M, N)
    if not exhaustive and is_sharp(N, tol):
        return function_of(as_sharp(N, tol), M, tol)
    null = zero_set(M, tol)
    live = [x for x in M.outcomes if x not in null]
    count = len(N) ** len(live)
    if count > ENUMERATION_LIMIT:
        if is_sharp(N, tol):
            return function_of(as_sharp(N, tol), M, tol)
        raise TooLarge(f"{count} candidate maps exceed the enumeration limit")
    live_effects = np.stack([M[x] for x in live]) if live else np.zeros((0, M.dim, M.dim))
    bound = len(M) * tol.eps_eq
    for choice in itertools.product(range(len(N)), repeat=len(live)):
        sums = np.zeros_like(N.effects)
        for e, y in zip(live_effects, choice):
            sums[y] = sums[y] + e
        if np.max(op_norm(sums - N.effects)) <= bound:
            f = {x: N.outcomes[y] for x, y in zip(live, choice)}
            f = _extend_to_null(f, null, N)
            return {x: f[x] for x in M.outcomes}
    return None


def kernel_from_map(f: dict, M: Observable, N: Observable) -> MarkovKernel:
    return indicator_kernel(f, (), M.outcomes, N.outcomes)


def projection_commutes_check(M: Observable, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Every projection in the range of ``M`` commutes with the whole range.

    Scans all subsets, so ``|X|`` is capped at 20.
    """
    if len(M) > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{len(M)} outcomes exceed the enumeration limit {BRUTE_FORCE_LIMIT}")
    projections = []
    for _, sums in _subset_sums(M):
        defects = op_norm(sums @ sums - sums)
        projections.extend(sums[np.atleast_1d(defects) <= tol.eps_eq])
    for p in projections:
        for _, sums in _subset_sums(M):
            comm = p @ sums - sums @ p
            if np.any(np.atleast_1d(op_norm(comm)) > tol.eps_eq):
                return False
    return True
