"""JSON documents for matrices, observables and kernels.

Complex scalars are ``[re, im]`` pairs and matrices row-major lists of
them.  Python's float repr is the shortest string that round-trips, so
documents re-parse to bit-identical arrays.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .kernels import MarkovKernel, WeakMarkovKernel
from .observables import Observable, SharpObservable


def matrix_to_json(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(doc) -> np.ndarray:
    try:
        arr = np.array(doc, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"matrix is not an array of [re, im] pairs: {exc}") from None
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise InputError(f"matrix must be rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def observable_to_dict(M: Observable) -> dict:
    doc = {
        "dim": M.dim,
        "outcomes": list(M.outcomes),
        "effects": [matrix_to_json(e) for e in M.effects],
    }
    if isinstance(M, SharpObservable):
        doc["sharp"] = True
    return doc


def observable_from_dict(doc: dict) -> Observable:
    try:
        outcomes = doc["outcomes"]
        effects = [matrix_from_json(e) for e in doc["effects"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"observable document lacks {exc}") from None
    cls = SharpObservable if doc.get("sharp") else Observable
    M = cls(outcomes, effects)
    if "dim" in doc and int(doc["dim"]) != M.dim:
        raise InputError(f"declared dim {doc['dim']} but effects are {M.dim}x{M.dim}")
    return M


def kernel_to_dict(kernel: MarkovKernel) -> dict:
    return {
        "source": list(kernel.source),
        "target": list(kernel.target),
        "weights": np.asarray(kernel.weights, dtype=float).tolist(),
    }


def kernel_from_dict(doc: dict, reference: Observable | None = None) -> MarkovKernel:
    try:
        args = (doc["source"], doc["target"], doc["weights"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"kernel document lacks {exc}") from None
    if reference is not None:
        return WeakMarkovKernel(*args, reference=reference)
    return MarkovKernel(*args)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False)


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def load_observable(path) -> Observable:
    return observable_from_dict(load_json(path))


def load_kernel(path, reference: Observable | None = None) -> MarkovKernel:
    return kernel_from_dict(load_json(path), reference)
