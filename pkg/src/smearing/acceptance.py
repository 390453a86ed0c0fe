"""Seeded acceptance suites.

Each suite builds its instances from ``(seed, suite id, index)`` alone, runs
its checks and returns a JSON-ready report.  Reports carry no timings, so a
repeated run with the same seed serialises to identical bytes.
"""
from __future__ import annotations

import json

import numpy as np

from . import generators as gen
from .decision import (
    contains_range,
    equivalence_suite,
    extremal_perturbation_check,
    find_kernel,
    finer_sharp,
    is_clean_sharp,
    preceq,
    projection_commutes_check,
    sharp_parent,
)
from .errors import UnknownSuite
from .kernels import indicator_kernel, smear, validate_weak_kernel
from .observables import Observable, SharpObservable, zero_set
from .operators import DEFAULT_TOL, Tolerance, op_norm

EQUIVALENCE_INSTANCES = 200
ROUNDTRIP_INSTANCES = 100
ZERO_ONE_INSTANCES = 50
CLEAN_INSTANCES = 50

ROUNDTRIP_TOL = 1e-7
ZERO_ONE_TOL = 1e-7
PERTURBATION_TOL = 2e-9
HAND_DEFECT = 0.375
HAND_TOL = 1e-9
NOISY_RESIDUAL_TOL = 1e-7

EQUIVALENCE_KINDS = ("coarse_pvm", "block_povm", "depolarized", "generic")


def _rng(seed: int, suite: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, suite, index])


def _coarse_pvm_pair(rng, *, allow_trivial=True):
    """Fine PVM ``M`` and a coarse-graining ``P`` of it."""
    d = int(rng.integers(2, 5))
    nx = int(rng.integers(2, 5))
    ny = int(rng.integers(1 if allow_trivial else 2, 5))
    M = gen.random_pvm(d, nx, rng, prefix="x")
    live = [x for x, e in zip(M.outcomes, M.effects) if np.trace(e).real > 0.5]
    targets = gen.labels("y", ny)
    f = {x: targets[int(rng.integers(ny))] for x in M.outcomes}
    if not allow_trivial:
        # two live atoms in different blocks, so P has two nonzero atoms
        f[live[0]], f[live[1]] = targets[0], targets[1]
    kernel = indicator_kernel(f, (), M.outcomes, targets)
    P = smear(M, kernel)
    return SharpObservable(P.outcomes, P.effects), M


def _block_povm_pair(rng, *, allow_trivial=True):
    """PVM ``P`` and a POVM refining it block by block."""
    d = int(rng.integers(2, 5))
    ny = int(rng.integers(1 if allow_trivial else 2, 5))
    P = gen.random_pvm(d, ny, rng, sizes=_sizes(d, ny, rng, allow_trivial))
    budget = 4
    counts = []
    for k in range(ny):
        left = budget - sum(counts) - (ny - k - 1)
        counts.append(int(rng.integers(1, max(1, left) + 1)))
    M, _ = gen.random_block_povm(P, counts, rng)
    return P, M


def _sizes(d, ny, rng, allow_trivial):
    sizes = gen.random_block_sizes(d, ny, rng)
    if not allow_trivial and sum(s > 0 for s in sizes) < 2:
        sizes = [d - 1, 1] + [0] * (ny - 2)
    return sizes


def equivalence_instance(seed: int, index: int):
    """``(kind, P, M)`` for instance ``index`` of the equivalence suite."""
    rng = _rng(seed, 1, index)
    kind = EQUIVALENCE_KINDS[index % len(EQUIVALENCE_KINDS)]
    if kind == "coarse_pvm":
        P, M = _coarse_pvm_pair(rng)
    elif kind == "block_povm":
        P, M = _block_povm_pair(rng)
    elif kind == "depolarized":
        if rng.random() < 0.5:
            P, M = _coarse_pvm_pair(rng, allow_trivial=False)
        else:
            P, M = _block_povm_pair(rng, allow_trivial=False)
        M = gen.depolarize(M, float(rng.uniform(0.05, 0.5)))
    else:
        d = int(rng.integers(2, 5))
        ny = int(rng.integers(2, 5))
        P = gen.random_pvm(d, ny, rng, sizes=_sizes(d, ny, rng, False))
        M = gen.random_povm(d, int(rng.integers(2, 5)), rng)
    return kind, P, M


def roundtrip_instance(seed: int, index: int) -> Observable:
    rng = _rng(seed, 2, index)
    d = int(rng.integers(1, 5))
    k = int(rng.integers(1, 5))
    return gen.random_commutative_povm(d, k, rng, n_sharp=int(rng.integers(1, d + 1)))


def zero_one_instance(seed: int, index: int):
    """Sharp ``P`` and a parent ``M`` with ``P`` a smearing of ``M``; odd indices pad ``M`` with a null atom."""
    rng = _rng(seed, 4, index)
    P, M = _coarse_pvm_pair(rng) if index % 2 == 0 else _block_povm_pair(rng)
    if index % 4 in (1, 2):
        atoms = list(M.effects) + [np.zeros((M.dim, M.dim))]
        M = Observable(list(M.outcomes) + ["null"], atoms)
    return P, M


def rank_one_pvm(seed: int, index: int) -> SharpObservable:
    rng = _rng(seed, 6, index)
    d = int(rng.integers(1, 5))
    return gen.random_pvm(d, d, rng)


def degenerate_pvm(seed: int, index: int) -> SharpObservable:
    rng = _rng(seed, 7, index)
    d = int(rng.integers(2, 5))
    k = int(rng.integers(1, d))
    P = gen.random_pvm(d, k, rng)
    if index % 3 == 0:
        P = SharpObservable(list(P.outcomes) + ["z"], list(P.effects) + [np.zeros((d, d))])
    return P


def noisy_qubit_pair():
    sharp = SharpObservable(["+", "-"], [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    noisy = Observable(["+", "-"], [np.diag([0.75, 0.25]), np.diag([0.25, 0.75])])
    return sharp, noisy


# --- suites -----------------------------------------------------------------


def suite_equivalence(seed: int, tol: Tolerance = DEFAULT_TOL) -> dict:
    checks = []
    for i in range(EQUIVALENCE_INSTANCES):
        kind, P, M = equivalence_instance(seed, i)
        report = equivalence_suite(P, M, tol)
        checks.append(
            {
                "index": i,
                "kind": kind,
                "dim": P.dim,
                "n_source": len(M),
                "n_target": len(P),
                "verdicts": report.verdicts,
                "passed": report.agree,
            }
        )
    feasible = sum(c["verdicts"]["lp_kernel"] for c in checks)
    depolarized = sum(c["kind"] == "depolarized" and not c["verdicts"]["lp_kernel"] for c in checks)
    constructed_feasible = sum(
        c["kind"] in ("coarse_pvm", "block_povm") and c["verdicts"]["lp_kernel"] for c in checks
    )
    summary = {
        "instances": len(checks),
        "feasible": feasible,
        "constructed_feasible": constructed_feasible,
        "depolarized_infeasible": depolarized,
        "disagreements": sum(not c["passed"] for c in checks),
    }
    passed = (
        summary["disagreements"] == 0 and constructed_feasible >= 50 and depolarized >= 50
    )
    return _report("thm36-equivalence", seed, passed, checks, summary)


def suite_roundtrip(seed: int, tol: Tolerance = DEFAULT_TOL) -> dict:
    checks = []
    for i in range(ROUNDTRIP_INSTANCES):
        M = roundtrip_instance(seed, i)
        sp = sharp_parent(M, tol)
        rebuilt = smear(sp.parent, sp.kernel, tol)
        defect = float(np.max(op_norm(rebuilt.effects - M.effects)))
        kernel_ok = validate_weak_kernel(sp.kernel.weights, sp.parent, tol).ok
        checks.append(
            {
                "index": i,
                "dim": M.dim,
                "n_outcomes": len(M),
                "parent_outcomes": len(sp.parent),
                "defect": defect,
                "passed": defect <= ROUNDTRIP_TOL and kernel_ok,
            }
        )
    summary = {"instances": len(checks), "max_defect": max(c["defect"] for c in checks)}
    return _report("roundtrip-sharp-parent", seed, all(c["passed"] for c in checks), checks, summary)


def suite_kernel_range(seed: int, tol: Tolerance = DEFAULT_TOL) -> dict:
    checks = []
    for i in range(EQUIVALENCE_INSTANCES):
        kind, P, M = equivalence_instance(seed, i)
        if find_kernel(M, P, tol) is None:
            continue
        inside = contains_range(P, M, tol)
        checks.append({"index": i, "kind": kind, "contains_range": inside, "passed": inside})
    summary = {"feasible_instances": len(checks), "exceptions": sum(not c["passed"] for c in checks)}
    return _report("kernel-implies-range", seed, summary["exceptions"] == 0, checks, summary)


def suite_zero_one(seed: int, tol: Tolerance = DEFAULT_TOL) -> dict:
    checks = []
    for i in range(ZERO_ONE_INSTANCES):
        P, M = zero_one_instance(seed, i)
        kernel = find_kernel(M, P, tol)
        if kernel is None:
            checks.append({"index": i, "feasible": False, "passed": False})
            continue
        null = set(zero_set(M, tol))
        live = [k for k, x in enumerate(M.outcomes) if x not in null]
        w = kernel.weights[live]
        zero_one = float(np.max(np.minimum(np.abs(w), np.abs(w - 1.0)), initial=0.0))
        defects = [
            extremal_perturbation_check(M, kernel, [y], tol).defect for y in P.outcomes
        ]
        checks.append(
            {
                "index": i,
                "feasible": True,
                "zero_one_distance": zero_one,
                "max_perturbation_defect": max(defects),
                "passed": zero_one <= ZERO_ONE_TOL and max(defects) <= PERTURBATION_TOL,
            }
        )
    sharp, _ = noisy_qubit_pair()
    hand = extremal_perturbation_check(
        sharp, np.array([[0.75, 0.25], [0.25, 0.75]]), ["+"], tol, target=["+", "-"]
    )
    hand_check = {
        "index": "hand",
        "defect": hand.defect,
        "passed": abs(hand.defect - HAND_DEFECT) <= HAND_TOL,
    }
    checks.append(hand_check)
    summary = {
        "instances": ZERO_ONE_INSTANCES,
        "max_zero_one_distance": max(c.get("zero_one_distance", 0.0) for c in checks),
        "max_perturbation_defect": max(c.get("max_perturbation_defect", 0.0) for c in checks),
        "hand_defect": hand.defect,
    }
    return _report("zero-one-kernels", seed, all(c["passed"] for c in checks), checks, summary)


def suite_noisy(seed: int, tol: Tolerance = DEFAULT_TOL) -> dict:
    from .decision.order import kernel_lp
    from .lp import residual

    sharp, noisy = noisy_qubit_pair()
    forward = find_kernel(noisy, sharp, tol)
    backward = find_kernel(sharp, noisy, tol)
    res = None
    if backward is not None:
        res = residual(kernel_lp(sharp, noisy, tol), backward.weights.ravel())
    checks = [
        {"direction": "noisy->sharp", "feasible": forward is not None, "passed": forward is None},
        {
            "direction": "sharp->noisy",
            "feasible": backward is not None,
            "residual": res,
            "passed": backward is not None and res <= NOISY_RESIDUAL_TOL,
        },
    ]
    return _report("noisy-qubit", seed, all(c["passed"] for c in checks), checks, {})


def suite_clean(seed: int, tol: Tolerance = DEFAULT_TOL) -> dict:
    checks = []
    for i in range(CLEAN_INSTANCES):
        P = rank_one_pvm(seed, i)
        clean = is_clean_sharp(P, tol)
        checks.append({"index": i, "kind": "rank_one", "clean": clean, "passed": clean})
    for i in range(CLEAN_INSTANCES):
        P = degenerate_pvm(seed, i)
        clean = is_clean_sharp(P, tol)
        entry = {"index": i, "kind": "degenerate", "clean": clean}
        if clean:
            entry["passed"] = False
        else:
            F = finer_sharp(P, tol)
            up = preceq(F, P, tol)
            down = preceq(P, F, tol)
            entry.update(
                {
                    "witness_refines": contains_range(P, F, tol),
                    "F_preceq_P": up,
                    "P_preceq_F": down,
                    "passed": up and not down,
                }
            )
        checks.append(entry)
    summary = {"rank_one": CLEAN_INSTANCES, "degenerate": CLEAN_INSTANCES}
    return _report("clean-refinement", seed, all(c["passed"] for c in checks), checks, summary)


def generated_observables(seed: int):
    """Every observable generated by the other suites, tagged by origin."""
    for i in range(EQUIVALENCE_INSTANCES):
        _, P, M = equivalence_instance(seed, i)
        yield f"equivalence/{i}/P", P
        yield f"equivalence/{i}/M", M
    for i in range(ROUNDTRIP_INSTANCES):
        yield f"roundtrip/{i}/M", roundtrip_instance(seed, i)
    for i in range(ZERO_ONE_INSTANCES):
        P, M = zero_one_instance(seed, i)
        yield f"zero_one/{i}/P", P
        yield f"zero_one/{i}/M", M
    sharp, noisy = noisy_qubit_pair()
    yield "noisy/P", sharp
    yield "noisy/M", noisy
    for i in range(CLEAN_INSTANCES):
        yield f"clean/{i}/rank_one", rank_one_pvm(seed, i)
        P = degenerate_pvm(seed, i)
        yield f"clean/{i}/degenerate", P
        yield f"clean/{i}/finer", finer_sharp(P, DEFAULT_TOL)


def suite_projections(seed: int, tol: Tolerance = DEFAULT_TOL) -> dict:
    checks = []
    for name, M in generated_observables(seed):
        ok = projection_commutes_check(M, tol)
        checks.append({"instance": name, "passed": ok})
    summary = {"observables": len(checks), "failures": sum(not c["passed"] for c in checks)}
    return _report("projection-commutation", seed, summary["failures"] == 0, checks, summary)


SUITES = {
    "thm36-equivalence": suite_equivalence,
    "roundtrip-sharp-parent": suite_roundtrip,
    "kernel-implies-range": suite_kernel_range,
    "zero-one-kernels": suite_zero_one,
    "noisy-qubit": suite_noisy,
    "clean-refinement": suite_clean,
    "projection-commutation": suite_projections,
}


def _report(name, seed, passed, checks, summary) -> dict:
    return {"suite": name, "seed": seed, "passed": bool(passed), "summary": summary, "checks": checks}


def run_acceptance(name: str, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Run one suite (or ``"all"``) and return its report."""
    if name == "all":
        reports = [fn(seed, tol) for fn in SUITES.values()]
        return {
            "suite": "all",
            "seed": seed,
            "passed": all(r["passed"] for r in reports),
            "reports": reports,
        }
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name](seed, tol)


def report_bytes(report: dict) -> bytes:
    return json.dumps(report, sort_keys=True, allow_nan=False).encode()
