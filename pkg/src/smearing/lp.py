"""Dense linear feasibility by phase-1 simplex with Bland's rule.

Problems have box bounds on every variable and equality rows with an
individual slack: a point is feasible when ``lo <= x <= hi`` and
``|a_i . x - b_i| <= slack_i`` for every row.

The solver first runs phase 1 on the exact equalities.  Its optimal vertex
is accepted when every residual is within its slack; this keeps solutions
on vertices of the exact polytope whenever one exists (clean 0/1 kernels,
for example).  Otherwise it re-solves with every equality relaxed to the
two-sided inequality and reports infeasibility if phase 1 still leaves a
positive artificial objective.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalBreakdown

PIVOT_TOL = 1e-12
COST_TOL = 1e-11
MAX_PIVOTS = 50_000
# fraction of the slack the relaxed solve may use, so the returned point
# still satisfies the full slack after rounding
SLACK_SHRINK = 1.0 - 1e-6


@dataclass
class LinearFeasibilityProblem:
    """``lo <= x <= hi`` and ``|A x - b| <= slack`` row-wise."""

    A: np.ndarray
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    slack: np.ndarray
    description: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = self.A.shape[1] if self.A.size else len(np.atleast_1d(self.lo))
        if self.A.size == 0:
            self.A = np.zeros((0, n))
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.lo = np.broadcast_to(np.asarray(self.lo, dtype=float), (n,)).copy()
        self.hi = np.broadcast_to(np.asarray(self.hi, dtype=float), (n,)).copy()
        self.slack = np.broadcast_to(np.asarray(self.slack, dtype=float), self.b.shape).copy()
        if self.b.shape[0] != self.A.shape[0]:
            raise InputError("rhs length does not match the number of equalities")
        for name in ("A", "b", "lo", "hi", "slack"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InputError(f"{name} has non-finite values")
        if np.any(self.lo > self.hi):
            raise InputError("some lower bound exceeds its upper bound")
        if np.any(self.slack < 0):
            raise InputError("slacks must be non-negative")

    @property
    def num_vars(self) -> int:
        return self.A.shape[1]

    @property
    def num_equalities(self) -> int:
        return self.A.shape[0]

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "num_vars": self.num_vars,
            "bounds": [[float(l), float(h)] for l, h in zip(self.lo, self.hi)],
            "equalities": [
                {"coeffs": row.tolist(), "rhs": float(r), "slack": float(s)}
                for row, r, s in zip(self.A, self.b, self.slack)
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LinearFeasibilityProblem":
        n = int(doc["num_vars"])
        bounds = np.asarray(doc["bounds"], dtype=float).reshape(n, 2)
        eqs = doc["equalities"]
        A = np.array([e["coeffs"] for e in eqs], dtype=float).reshape(len(eqs), n)
        return cls(
            A,
            [e["rhs"] for e in eqs],
            bounds[:, 0],
            bounds[:, 1],
            [e["slack"] for e in eqs],
            description=doc.get("description", ""),
        )


def residual(problem: LinearFeasibilityProblem, x) -> float:
    """Worst violation over equalities (|A x - b|) and bounds; 0 when exact."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.num_vars,):
        raise InputError(f"assignment has shape {x.shape}, expected ({problem.num_vars},)")
    worst = 0.0
    if problem.num_equalities:
        worst = float(np.max(np.abs(problem.A @ x - problem.b)))
    if problem.num_vars:
        worst = max(worst, float(np.max(problem.lo - x, initial=0.0)))
        worst = max(worst, float(np.max(x - problem.hi, initial=0.0)))
    return worst


def _within_slack(problem, x) -> bool:
    if not problem.num_equalities:
        return True
    return bool(np.all(np.abs(problem.A @ x - problem.b) <= problem.slack))


def _phase_one(A: np.ndarray, b: np.ndarray, basis: list[int | None]):
    """Minimise the sum of artificials for ``A z = b, z >= 0`` (``b >= 0``).

    ``basis[i]`` names a column that is already a unit vector for row ``i``
    or ``None`` when row ``i`` needs an artificial variable.  Returns the
    final basis (column indices, artificials numbered from ``A.shape[1]``),
    the basic values and the phase-1 objective.
    """
    m, n = A.shape
    art_rows = [i for i in range(m) if basis[i] is None]
    k = len(art_rows)
    T = np.zeros((m + 1, n + k + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    basic = list(basis)
    for j, i in enumerate(art_rows):
        T[i, n + j] = 1.0
        basic[i] = n + j
    # reduced costs of minimising sum(artificials), priced out on the start basis
    for i in art_rows:
        T[m] -= T[i]
    for j in range(n, n + k):
        T[m, j] = 0.0

    for _ in range(MAX_PIVOTS):
        cost = T[m, :-1]
        candidates = np.flatnonzero(cost < -COST_TOL)
        if candidates.size == 0:
            break
        col = int(candidates[0])
        column = T[:m, col]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            raise NumericalBreakdown("phase-1 objective unbounded; pivot column has no usable entry")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basic[r]))
        piv = T[row, col]
        if abs(piv) < PIVOT_TOL:
            raise NumericalBreakdown(f"pivot magnitude {abs(piv):.2e} too small")
        T[row] /= piv
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        basic[row] = col
    else:
        raise NumericalBreakdown("phase 1 did not terminate within the pivot limit")
    return basic, T[:m, -1].copy(), float(-T[m, -1])


def _refine(A: np.ndarray, b: np.ndarray, basic: list[int], fallback: np.ndarray, ncols: int):
    """Recompute the basic solution from the original columns for accuracy."""
    z = np.zeros(ncols)
    cols = [c for c in basic if c < ncols]
    rows_real = [i for i, c in enumerate(basic) if c < ncols]
    for i, c in zip(rows_real, cols):
        z[c] = fallback[i]
    if not cols:
        return z
    # artificials still basic sit at (near) zero; solve the square system
    # restricted to the basic structural columns in least squares
    sol, *_ = np.linalg.lstsq(A[:, cols], b, rcond=None)
    if np.all(np.isfinite(sol)) and sol.min() >= -1e-12:
        trial = np.zeros(ncols)
        trial[cols] = sol
        if np.linalg.norm(A @ trial - b, np.inf) <= np.linalg.norm(A @ z - b, np.inf):
            z = trial
    return np.maximum(z, 0.0)


def _solve_exact(problem: LinearFeasibilityProblem):
    n, m = problem.num_vars, problem.num_equalities
    width = problem.hi - problem.lo
    rhs = problem.b - problem.A @ problem.lo
    # columns: x' (n), u (n); rows: equalities (m), bounds x' + u = width (n)
    A = np.zeros((m + n, 2 * n))
    b = np.zeros(m + n)
    A[:m, :n] = problem.A
    b[:m] = rhs
    A[m:, :n] = np.eye(n)
    A[m:, n:] = np.eye(n)
    b[m:] = width
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    basis: list[int | None] = [None] * m + [n + j for j in range(n)]
    basic, vals, obj = _phase_one(A, b, basis)
    z = _refine(A, b, basic, vals, 2 * n)
    return problem.lo + np.minimum(z[:n], width), obj


def _solve_relaxed(problem: LinearFeasibilityProblem):
    n, m = problem.num_vars, problem.num_equalities
    width = problem.hi - problem.lo
    s = problem.slack * SLACK_SHRINK
    relaxed = np.flatnonzero(s > 0)
    r = len(relaxed)
    # columns: x' (n), r' (r), u (n), v (r)
    # rows: A x' - r' = b - A lo - s ; x' + u = width ; r' + v = 2 s
    ncols = 2 * n + 2 * r
    A = np.zeros((m + n + r, ncols))
    b = np.zeros(m + n + r)
    A[:m, :n] = problem.A
    b[:m] = problem.b - problem.A @ problem.lo - s
    for k, i in enumerate(relaxed):
        A[i, n + k] = -1.0
    A[m : m + n, :n] = np.eye(n)
    A[m : m + n, n + r : 2 * n + r] = np.eye(n)
    b[m : m + n] = width
    for k in range(r):
        A[m + n + k, n + k] = 1.0
        A[m + n + k, 2 * n + r + k] = 1.0
        b[m + n + k] = 2 * s[relaxed[k]]
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    basis: list[int | None] = [None] * m
    basis += [n + r + j for j in range(n)]
    basis += [2 * n + r + k for k in range(r)]
    basic, vals, obj = _phase_one(A, b, basis)
    z = _refine(A, b, basic, vals, ncols)
    return problem.lo + np.minimum(z[:n], width), obj


def solve_feasibility(problem: LinearFeasibilityProblem, tol: float = 1e-9):
    """Find a feasible point, or return ``None`` if phase 1 proves there is none.

    Parameters
    ----------
    problem : LinearFeasibilityProblem
    tol : float
        Phase-1 objective above which the relaxed problem is declared
        infeasible.

    Returns
    -------
    numpy.ndarray or None
        A point within the bounds and within every equality's slack.

    Raises
    ------
    NumericalBreakdown
        If the simplex stalls on tiny pivots, or phase 1 claims
        feasibility but the extracted point misses the slack.
    """
    n = problem.num_vars
    if n == 0:
        return np.zeros(0) if np.all(np.abs(problem.b) <= problem.slack) else None
    x, _ = _solve_exact(problem)
    x = np.clip(x, problem.lo, problem.hi)
    if _within_slack(problem, x):
        return x
    if not np.any(problem.slack > 0):
        return None
    x, obj = _solve_relaxed(problem)
    if obj > tol:
        return None
    x = np.clip(x, problem.lo, problem.hi)
    if not _within_slack(problem, x):
        raise NumericalBreakdown(
            f"phase 1 reached objective {obj:.2e} but the point violates the slack "
            f"(residual {residual(problem, x):.2e})"
        )
    return x
