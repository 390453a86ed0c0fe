"""Seeded random instances: PVMs, POVMs, commutative POVMs and kernels.

Every generator takes a ``numpy.random.Generator`` (or an integer seed) and
is deterministic given it.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidParameters
from .kernels import MarkovKernel, smear
from .observables import Observable, SharpObservable, validate
from .operators import DEFAULT_TOL, dagger


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def labels(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{i}" for i in range(n)]


def random_hermitian(d: int, rng) -> np.ndarray:
    rng = _rng(rng)
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + dagger(g))


def random_unitary(d: int, rng) -> np.ndarray:
    """Eigenbasis of a random Hermitian matrix (GUE)."""
    _, u = np.linalg.eigh(random_hermitian(d, rng))
    return u


def random_block_sizes(d: int, k: int, rng) -> list[int]:
    """Split ``d`` into ``min(k, d)`` positive parts, padded with zeros up to ``k``."""
    rng = _rng(rng)
    nonzero = min(k, d)
    cuts = np.sort(rng.choice(np.arange(1, d), size=nonzero - 1, replace=False)) if nonzero > 1 else []
    sizes = np.diff(np.concatenate([[0], cuts, [d]])).astype(int).tolist()
    sizes += [0] * (k - nonzero)
    return sizes


def pvm_from_blocks(u: np.ndarray, sizes, outcomes) -> SharpObservable:
    d = u.shape[0]
    effects = []
    start = 0
    for s in sizes:
        v = u[:, start : start + s]
        effects.append(v @ dagger(v) if s else np.zeros((d, d), dtype=complex))
        start += s
    return SharpObservable(outcomes, effects)


def random_pvm(d: int, k: int, rng, *, sizes=None, prefix: str = "y") -> SharpObservable:
    """Eigenprojections of a random Hermitian matrix with ``k`` outcomes.

    With ``k < d`` some eigenvalues are forced to coincide (rank > 1 atoms);
    with ``k > d`` the surplus outcomes get zero atoms.  ``sizes`` fixes the
    block ranks explicitly.
    """
    if d < 1 or k < 1:
        raise InvalidParameters("dim and n_outcomes must be positive")
    rng = _rng(rng)
    if sizes is None:
        sizes = random_block_sizes(d, k, rng)
    elif len(sizes) != k or sum(sizes) != d or min(sizes) < 0:
        raise InvalidParameters(f"block sizes {sizes} do not partition dim {d} into {k} parts")
    return pvm_from_blocks(random_unitary(d, rng), sizes, labels(prefix, k))


def random_kernel(source, target, rng, *, concentration: float = 1.0) -> MarkovKernel:
    rng = _rng(rng)
    w = rng.dirichlet(np.full(len(target), concentration), size=len(source))
    return MarkovKernel(source, target, w)


def random_povm(d: int, k: int, rng, *, prefix: str = "x", max_tries: int = 100) -> Observable:
    """Positive multiples of random rank-1 effects completed by ``I - sum``."""
    if d < 1 or k < 1:
        raise InvalidParameters("dim and n_outcomes must be positive")
    rng = _rng(rng)
    if k == 1:
        return Observable(labels(prefix, 1), [np.eye(d)])
    for _ in range(max_tries):
        vecs = rng.normal(size=(k - 1, d)) + 1j * rng.normal(size=(k - 1, d))
        weights = rng.uniform(0.2, 1.0, size=k - 1)
        rank1 = np.einsum("k,ki,kj->kij", weights, vecs, vecs.conj())
        total = rank1.sum(axis=0)
        top = np.linalg.eigvalsh(total)[-1]
        scale = 1.0 / (top * rng.uniform(1.05, 2.0))
        atoms = list(scale * rank1)
        atoms.append(np.eye(d) - scale * total)
        M = Observable(labels(prefix, k), atoms)
        if validate(M, DEFAULT_TOL).ok:
            return M
    raise InvalidParameters("could not draw a valid POVM")


def random_commutative_povm(d: int, k: int, rng, *, prefix: str = "x", n_sharp=None) -> Observable:
    """Smearing of a random PVM by a random stochastic kernel."""
    rng = _rng(rng)
    n_sharp = d if n_sharp is None else n_sharp
    P = random_pvm(d, n_sharp, rng, prefix="e")
    kernel = random_kernel(P.outcomes, labels(prefix, k), rng)
    return smear(P, kernel)


def random_block_povm(P: SharpObservable, counts, rng, *, prefix: str = "x") -> tuple[Observable, dict]:
    """A POVM refining ``P``: inside block ``P(y)`` a random POVM with ``counts[y]`` atoms.

    Returns the observable and the outcome-to-block assignment.  Zero blocks
    receive zero atoms.
    """
    rng = _rng(rng)
    d = P.dim
    atoms, assignment = [], {}
    idx = 0
    for y, proj, c in zip(P.outcomes, P.effects, counts):
        w, u = np.linalg.eigh(proj)
        v = u[:, w > 0.5]
        r = v.shape[1]
        if r == 0:
            sub = [np.zeros((0, 0))] * c
        else:
            sub = random_povm(r, c, rng).effects
        for s in sub:
            atoms.append(v @ s @ dagger(v) if r else np.zeros((d, d), dtype=complex))
            assignment[f"{prefix}{idx}"] = y
            idx += 1
    return Observable(labels(prefix, idx), atoms), assignment


def depolarize(M: Observable, eta: float) -> Observable:
    """``(1 - eta) M(x) + eta Tr[M(x)] I / d``: full-rank atoms for ``eta > 0``."""
    d = M.dim
    traces = np.trace(M.effects, axis1=1, axis2=2).real
    eye = np.eye(d)
    atoms = [(1 - eta) * e + eta * t / d * eye for e, t in zip(M.effects, traces)]
    return Observable(M.outcomes, atoms)


def generate(kind: str, dim: int, n_outcomes: int, seed, *, n_sources=None):
    """Front door used by the CLI ``random`` subcommand."""
    if dim < 1 or n_outcomes < 1:
        raise InvalidParameters("dim and n_outcomes must be at least 1")
    rng = _rng(seed)
    if kind == "pvm":
        return random_pvm(dim, n_outcomes, rng)
    if kind == "povm":
        return random_povm(dim, n_outcomes, rng)
    if kind == "commutative":
        return random_commutative_povm(dim, n_outcomes, rng)
    if kind == "kernel":
        n_src = dim if n_sources is None else n_sources
        if n_src < 1:
            raise InvalidParameters("kernel needs at least one source outcome")
        return random_kernel(labels("x", n_src), labels("y", n_outcomes), rng)
    raise InvalidParameters(f"unknown instance kind {kind!r}")
