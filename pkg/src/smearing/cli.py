"""Command-line front end.

Exit codes: 0 yes / feasible / valid, 1 no / infeasible / invalid,
2 input error, 3 internal numerical failure.  Results go to standard output
(or ``--out``) as JSON; diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import decision
from .acceptance import SUITES, run_acceptance
from .errors import AlreadyClean, InputError, NonCommutativeRange, NumericalFailure
from .generators import generate
from .kernels import indicator_kernel, smear, validate_kernel
from .lp import residual
from .observables import Observable, as_sharp, require_valid, validate
from .operators import Tolerance
from .serialization import dumps, kernel_to_dict, load_kernel, load_observable, observable_to_dict

YES, NO, INPUT_ERROR, NUMERICAL_ERROR = 0, 1, 2, 3


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-eq", type=float, default=1e-9, help="matrix equality bound (operator norm)")
    common.add_argument("--tol-psd", type=float, default=1e-9, help="eigenvalue floor")
    common.add_argument("--tol-herm", type=float, default=1e-9, help="Hermiticity defect bound")
    common.add_argument("--tol-kernel", type=float, default=1e-7, help="kernel entry / row-sum bound")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", type=Path, default=None, help="write JSON here instead of stdout")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="smearing", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = add("validate", "validate an observable or a kernel")
    p.add_argument("--observable", type=Path)
    p.add_argument("--kernel", type=Path)
    p.add_argument("--reference", type=Path, help="observable a weak kernel refers to")

    p = add("smear", "smear an observable by a kernel")
    p.add_argument("--observable", type=Path, required=True)
    p.add_argument("--kernel", type=Path, required=True)
    p.add_argument("--weak", action="store_true", help="treat the kernel as weak w.r.t. the observable")

    p = add("sharp-parent", "PVM and kernel reproducing a commutative observable")
    p.add_argument("--observable", type=Path, required=True)

    for name, help_ in (
        ("contains-range", "is the range of a PVM inside the range of an observable"),
        ("function-of", "is a PVM a function of an observable"),
        ("equivalence-suite", "run all four equivalent conditions"),
        ("oracle-contains", "subset-enumeration oracle for range containment"),
    ):
        p = add(name, help_)
        p.add_argument("--sharp", type=Path, required=True)
        p.add_argument("--observable", type=Path, required=True)

    for name, help_ in (
        ("find-kernel", "LP search for a Markov kernel with to = kernel o from"),
        ("indicator-kernel", "search for a 0/1 kernel with to = kernel o from"),
        ("preceq", "is `to` a smearing of `from`"),
    ):
        p = add(name, help_)
        p.add_argument("--from", dest="source", type=Path, required=True)
        p.add_argument("--to", dest="target", type=Path, required=True)
        if name == "find-kernel":
            p.add_argument("--dump-lp", type=Path, default=None, help="write the LP and certificate here")

    p = add("clean", "is a PVM clean")
    p.add_argument("--sharp", type=Path, required=True)
    p = add("finer", "rank-1 refinement witnessing that a PVM is not clean")
    p.add_argument("--sharp", type=Path, required=True)
    p = add("extremal", "is an observable extremal")
    p.add_argument("--observable", type=Path, required=True)

    p = add("perturb", "symmetric kernel perturbation along a target subset")
    p.add_argument("--observable", type=Path, required=True, help="parent observable")
    p.add_argument("--kernel", type=Path, required=True)
    p.add_argument("--b1", default="", help="comma-separated target labels")

    p = add("random", "generate a seeded random instance")
    p.add_argument("--kind", choices=("pvm", "povm", "commutative", "kernel"), required=True)
    p.add_argument("--dim", type=int, required=True, help="Hilbert space dimension (kernel: source size)")
    p.add_argument("--outcomes", type=int, required=True)
    p.add_argument("--sources", type=int, default=None, help="kernel source size (default: --dim)")

    p = add("acceptance", "run an acceptance suite")
    p.add_argument("--suite", required=True, help=f"one of {sorted(SUITES)} or 'all'")
    return parser


def _tol(args) -> Tolerance:
    return Tolerance(
        eps_herm=args.tol_herm, eps_psd=args.tol_psd, eps_eq=args.tol_eq, eps_kernel=args.tol_kernel
    )


def _observable(path, tol, what="observable") -> Observable:
    M = load_observable(path)
    require_valid(M, tol, what)
    return M


def _sharp(path, tol):
    return as_sharp(_observable(path, tol, "sharp observable"), tol)


def _verdict(flag: bool, yes: str = "yes", no: str = "no") -> str:
    return yes if flag else no


def cmd_validate(args, tol):
    if args.observable is not None:
        report = validate(load_observable(args.observable), tol)
        return {"object": "observable", **report.to_dict()}, YES if report.ok else NO
    if args.kernel is None:
        raise InputError("validate needs --observable or --kernel")
    reference = load_observable(args.reference) if args.reference else None
    kernel = load_kernel(args.kernel, reference)
    report = validate_kernel(kernel, tol)
    return {"object": "kernel", **report.to_dict()}, YES if report.ok else NO


def cmd_smear(args, tol):
    M = _observable(args.observable, tol)
    kernel = load_kernel(args.kernel, M if args.weak else None)
    return observable_to_dict(smear(M, kernel, tol)), YES


def cmd_sharp_parent(args, tol):
    M = _observable(args.observable, tol)
    try:
        sp = decision.sharp_parent(M, tol, seed=args.seed or 0)
    except NonCommutativeRange as exc:
        return {"verdict": "non-commutative", "pair": list(exc.pair), "commutator_norm": exc.norm}, NO
    return {"verdict": "commutative", "certificate": sp.to_dict()}, YES


def cmd_contains_range(args, tol):
    P, M = _sharp(args.sharp, tol), _observable(args.observable, tol)
    part = decision.block_partition(P, M, tol)
    doc = {"verdict": _verdict(part is not None)}
    if part is not None:
        doc["certificate"] = part.to_dict()
    return doc, YES if part is not None else NO


def cmd_oracle_contains(args, tol):
    P, M = _sharp(args.sharp, tol), _observable(args.observable, tol)
    found = decision.brute_force_contains_range(P, M, tol)
    return {"verdict": _verdict(found)}, YES if found else NO


def cmd_function_of(args, tol):
    P, M = _sharp(args.sharp, tol), _observable(args.observable, tol)
    f = decision.function_of(P, M, tol)
    doc = {"verdict": _verdict(f is not None)}
    if f is not None:
        doc["certificate"] = {"function": f}
    return doc, YES if f is not None else NO


def cmd_find_kernel(args, tol):
    M, N = _observable(args.source, tol), _observable(args.target, tol)
    problem = decision.kernel_lp(M, N, tol)
    kernel = decision.find_kernel(M, N, tol)
    doc = {"verdict": _verdict(kernel is not None, "feasible", "infeasible"), "slack": tol.eps_kernel}
    if kernel is not None:
        doc["certificate"] = {
            "kernel": kernel_to_dict(kernel),
            "residual": residual(problem, kernel.weights.ravel()),
            "atomwise_defect": decision.order.atomwise_defect(M, kernel.weights, N),
        }
    if args.dump_lp is not None:
        args.dump_lp.write_text(
            dumps({"problem": problem.to_dict(), "result": doc}) + "\n", encoding="utf-8"
        )
    return doc, YES if kernel is not None else NO


def cmd_indicator_kernel(args, tol):
    M, N = _observable(args.source, tol), _observable(args.target, tol)
    f = decision.find_indicator_kernel(M, N, tol)
    doc = {"verdict": _verdict(f is not None)}
    if f is not None:
        doc["certificate"] = {
            "map": f,
            "kernel": kernel_to_dict(indicator_kernel(f, (), M.outcomes, N.outcomes)),
        }
    return doc, YES if f is not None else NO


def cmd_preceq(args, tol):
    M, N = _observable(args.source, tol), _observable(args.target, tol)
    forward = decision.find_kernel(M, N, tol)
    backward = decision.find_kernel(N, M, tol)
    doc = {
        "verdict": _verdict(forward is not None),
        "preceq": forward is not None,
        "reverse_preceq": backward is not None,
        "equivalent": forward is not None and backward is not None,
    }
    if forward is not None:
        doc["certificate"] = {"kernel": kernel_to_dict(forward)}
    return doc, YES if forward is not None else NO


def cmd_clean(args, tol):
    clean = decision.is_clean_sharp(_sharp(args.sharp, tol), tol)
    return {"verdict": _verdict(clean), "clean": clean}, YES if clean else NO


def cmd_finer(args, tol):
    P = _sharp(args.sharp, tol)
    try:
        F = decision.finer_sharp(P, tol)
    except AlreadyClean:
        return {"verdict": "already-clean"}, NO
    doc = {
        "verdict": "refined",
        "finer": observable_to_dict(F),
        "witness": {
            "contains_range": decision.contains_range(P, F, tol),
            "finer_preceq_original": decision.preceq(F, P, tol),
            "original_preceq_finer": decision.preceq(P, F, tol),
        },
    }
    return doc, YES


def cmd_extremal(args, tol):
    flag = decision.is_extremal(_observable(args.observable, tol), tol)
    return {"verdict": _verdict(flag), "extremal": flag}, YES if flag else NO


def cmd_perturb(args, tol):
    parent = _observable(args.observable, tol)
    kernel = load_kernel(args.kernel)
    b1 = [s for s in args.b1.split(",") if s]
    result = decision.extremal_perturbation_check(parent, kernel, b1, tol)
    return {"b1": b1, **result.to_dict()}, YES


def cmd_equivalence_suite(args, tol):
    P, M = _sharp(args.sharp, tol), _observable(args.observable, tol)
    report = decision.equivalence_suite(P, M, tol)
    if not report.agree:
        return report.to_dict(), NUMERICAL_ERROR
    return report.to_dict(), YES if report.verdict else NO


def cmd_random(args, tol):
    if args.seed is None:
        raise InputError("random needs --seed")
    obj = generate(args.kind, args.dim, args.outcomes, args.seed, n_sources=args.sources)
    if args.kind == "kernel":
        return kernel_to_dict(obj), YES
    return observable_to_dict(obj), YES


def cmd_acceptance(args, tol):
    report = run_acceptance(args.suite, args.seed or 0, tol)
    return report, YES if report["passed"] else NO


COMMANDS = {
    "validate": cmd_validate,
    "smear": cmd_smear,
    "sharp-parent": cmd_sharp_parent,
    "contains-range": cmd_contains_range,
    "oracle-contains": cmd_oracle_contains,
    "function-of": cmd_function_of,
    "find-kernel": cmd_find_kernel,
    "indicator-kernel": cmd_indicator_kernel,
    "preceq": cmd_preceq,
    "clean": cmd_clean,
    "finer": cmd_finer,
    "extremal": cmd_extremal,
    "perturb": cmd_perturb,
    "equivalence-suite": cmd_equivalence_suite,
    "random": cmd_random,
    "acceptance": cmd_acceptance,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else YES
    try:
        tol = _tol(args)
        doc, code = COMMANDS[args.command](args, tol)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    text = dumps(doc) + "\n"
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())

