"""Finite-outcome POV and PV measures, states and their statistics."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InputError,
    InvalidObservable,
    NotSharp,
    UnknownOutcomeLabel,
)
from .operators import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    commutator_norm,
    effect_defect,
    hermitian_defect,
    op_norm,
    projection_defect,
)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Observable:
    """A POV measure on a finite, ordered set of string-labelled outcomes.

    ``effects[i]`` is the atom ``M(outcomes[i])``; the effect of a subset is
    the sum of its atoms.  Construction only checks the shape of the data;
    use :func:`validate` for the measure-theoretic invariants.
    """

    outcomes: tuple[str, ...]
    effects: np.ndarray

    def __init__(self, outcomes: Iterable[str], effects):
        labels = tuple(str(o) for o in outcomes)
        if len(labels) == 0:
            raise InputError("an observable needs at least one outcome")
        if len(set(labels)) != len(labels):
            raise InputError("outcome labels must be distinct")
        mats = [as_matrix(e) for e in effects]
        if len(mats) != len(labels):
            raise InputError(f"{len(labels)} outcomes but {len(mats)} effects")
        dims = {m.shape[0] for m in mats}
        if len(dims) != 1:
            raise DimensionMismatch(f"effects have differing dimensions {sorted(dims)}")
        object.__setattr__(self, "outcomes", labels)
        object.__setattr__(self, "effects", _freeze(np.stack(mats)))

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def __len__(self) -> int:
        return len(self.outcomes)

    def index(self, label: str) -> int:
        try:
            return self.outcomes.index(label)
        except ValueError:
            raise UnknownOutcomeLabel(f"unknown outcome label {label!r}") from None

    def __getitem__(self, label: str) -> np.ndarray:
        return self.effects[self.index(label)]

    def relabel(self, outcomes: Sequence[str]) -> "Observable":
        return type(self)(outcomes, self.effects)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, outcomes={list(self.outcomes)})"


class SharpObservable(Observable):
    """A PV measure: atoms are mutually orthogonal projections."""


@dataclass(frozen=True, eq=False)
class State:
    matrix: np.ndarray

    def __init__(self, matrix):
        object.__setattr__(self, "matrix", _freeze(as_matrix(matrix)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def maximally_mixed(dim: int) -> State:
    return State(np.eye(dim) / dim)


@dataclass(frozen=True)
class Violation:
    """One failed invariant, with the numeric size of the failure."""

    kind: str
    where: str
    defect: float

    def to_dict(self) -> dict:
        return {"kind": self.kind, "where": self.where, "defect": self.defect}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, kind: str, where: str, defect: float) -> None:
        self.violations.append(Violation(kind, where, float(defect)))

    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]

    def to_dict(self) -> dict:
        return {"valid": self.ok, "violations": [v.to_dict() for v in self.violations]}


def normalization_defect(M: Observable) -> float:
    total = np.zeros((M.dim, M.dim), dtype=np.complex128)
    # label order, so the defect is reproducible bit for bit
    for e in M.effects:
        total = total + e
    return op_norm(total - np.eye(M.dim))


def validate(M: Observable, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Check every Observable invariant and report the failures.

    A ``SharpObservable`` is additionally checked for projection atoms and
    pairwise orthogonality.
    """
    report = ValidationReport()
    for label, e in zip(M.outcomes, M.effects):
        h = hermitian_defect(e)
        if h > tol.eps_herm:
            report.add("not_hermitian", label, h)
            continue
        d = effect_defect(e)
        if d > tol.eps_psd:
            report.add("effect_bounds", label, d)
    n = normalization_defect(M)
    if n > tol.eps_eq:
        report.add("normalization", "sum", n)
    if isinstance(M, SharpObservable):
        for label, e in zip(M.outcomes, M.effects):
            p = projection_defect(e)
            if p > tol.eps_eq:
                report.add("not_projection", label, p)
        for i in range(len(M)):
            for j in range(i + 1, len(M)):
                o = op_norm(M.effects[i] @ M.effects[j])
                if o > tol.eps_eq:
                    report.add("not_orthogonal", f"{M.outcomes[i]},{M.outcomes[j]}", o)
    return report


def validate_state(S: State, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    report = ValidationReport()
    h = hermitian_defect(S.matrix)
    if h > tol.eps_herm:
        report.add("not_hermitian", "state", h)
        return report
    low = np.linalg.eigvalsh(0.5 * (S.matrix + S.matrix.conj().T))[0]
    if low < -tol.eps_psd:
        report.add("not_psd", "state", -low)
    t = abs(np.trace(S.matrix) - 1.0)
    if t > tol.eps_eq:
        report.add("trace", "state", t)
    return report


def probability_distribution(S: State, M: Observable) -> np.ndarray:
    """Outcome probabilities ``Tr[S M(x)]`` in outcome order."""
    if S.dim != M.dim:
        raise DimensionMismatch(f"state has dim {S.dim}, observable has dim {M.dim}")
    return np.einsum("ij,xji->x", S.matrix, M.effects).real


def range_effect(M: Observable, subset: Iterable[str]) -> np.ndarray:
    """``M(A)``, the sum of the atoms labelled by ``subset``."""
    wanted = set(subset)
    unknown = wanted.difference(M.outcomes)
    if unknown:
        raise UnknownOutcomeLabel(f"unknown outcome labels {sorted(unknown)}")
    total = np.zeros((M.dim, M.dim), dtype=np.complex128)
    for label, e in zip(M.outcomes, M.effects):
        if label in wanted:
            total = total + e
    return total


def is_commutative_range(M: Observable, tol: Tolerance = DEFAULT_TOL) -> bool:
    return noncommuting_pair(M, tol) is None


def noncommuting_pair(M: Observable, tol: Tolerance = DEFAULT_TOL):
    """First pair of atoms whose commutator exceeds ``eps_eq``, as ``(a, b, norm)``."""
    for i in range(len(M)):
        for j in range(i + 1, len(M)):
            c = commutator_norm(M.effects[i], M.effects[j])
            if c > tol.eps_eq:
                return M.outcomes[i], M.outcomes[j], c
    return None


def zero_set(M: Observable, tol: Tolerance = DEFAULT_TOL) -> tuple[str, ...]:
    """Labels of the atoms with operator norm at most ``eps_eq`` (the null class)."""
    norms = op_norm(M.effects)
    return tuple(label for label, n in zip(M.outcomes, np.atleast_1d(norms)) if n <= tol.eps_eq)


def is_sharp(M: Observable, tol: Tolerance = DEFAULT_TOL) -> bool:
    return all(
        hermitian_defect(e) <= tol.eps_herm and projection_defect(e) <= tol.eps_eq
        for e in M.effects
    )


def as_sharp(M: Observable, tol: Tolerance = DEFAULT_TOL) -> SharpObservable:
    """View a valid observable with projection atoms as a ``SharpObservable``."""
    if isinstance(M, SharpObservable):
        return M
    if not is_sharp(M, tol):
        raise NotSharp("observable has non-projection atoms")
    return SharpObservable(M.outcomes, M.effects)


def require_valid(M: Observable, tol: Tolerance = DEFAULT_TOL, what: str = "observable") -> None:
    report = validate(M, tol)
    if not report.ok:
        worst = max(report.violations, key=lambda v: v.defect)
        raise InvalidObservable(
            f"{what} is invalid: {len(report.violations)} violation(s), "
            f"worst {worst.kind} at {worst.where} ({worst.defect:.3e})"
        )
