"""Run every characterisation of "P is a smearing of M" side by side."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..observables import Observable, SharpObservable, as_sharp, zero_set
from ..operators import DEFAULT_TOL, Tolerance
from .order import atomwise_defect, find_kernel
from .ranges import ENUMERATION_LIMIT, brute_force_contains_range, find_indicator_kernel, function_of

CONDITIONS = ("range_oracle", "indicator_kernel", "function_of", "lp_kernel")


@dataclass
class EquivalenceReport:
    verdicts: dict
    certificates: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts.values())) == 1

    @property
    def verdict(self) -> bool:
        """The common answer; only meaningful when :attr:`agree` holds."""
        return all(self.verdicts.values())

    def to_dict(self) -> dict:
        return {
            "verdicts": dict(self.verdicts),
            "agree": self.agree,
            "verdict": self.verdict if self.agree else None,
            "defect_flag": None if self.agree else "conditions disagree: library defect",
            "certificates": self.certificates,
        }


def equivalence_suite(P: SharpObservable, M: Observable, tol: Tolerance = DEFAULT_TOL) -> EquivalenceReport:
    """Evaluate range containment (subset oracle), an indicator kernel found by
    enumeration, a function ``f`` with ``P = M o f^-1``, and an LP kernel.

    They must all agree; a split verdict signals a bug, not a mathematical fact.
    """
    P = as_sharp(P, tol)
    live = len(M) - len(zero_set(M, tol))
    exhaustive = len(P) ** live <= ENUMERATION_LIMIT

    oracle = brute_force_contains_range(P, M, tol)
    indicator = find_indicator_kernel(M, P, tol, exhaustive=exhaustive)
    f = function_of(P, M, tol)
    kernel = find_kernel(M, P, tol)

    certificates = {}
    if indicator is not None:
        certificates["indicator_map"] = indicator
    if f is not None:
        certificates["function"] = f
    if kernel is not None:
        certificates["lp_kernel"] = {
            "weights": kernel.weights.tolist(),
            "defect": atomwise_defect(M, kernel.weights, P),
        }
    verdicts = {
        "range_oracle": oracle,
        "indicator_kernel": indicator is not None,
        "function_of": f is not None,
        "lp_kernel": kernel is not None,
    }
    return EquivalenceReport(verdicts, certificates)
