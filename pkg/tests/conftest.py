import numpy as np
import pytest

from smearing import Observable, SharpObservable, Tolerance

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


def trine_povm():
    vecs = [np.array([np.cos(2 * np.pi * k / 3), np.sin(2 * np.pi * k / 3)]) for k in range(3)]
    return Observable(["t0", "t1", "t2"], [2 / 3 * np.outer(v, v) for v in vecs])


@pytest.fixture
def tol():
    return Tolerance()


@pytest.fixture
def sigma_z():
    return SharpObservable(["+", "-"], [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


@pytest.fixture
def noisy():
    return Observable(["+", "-"], [np.diag([0.75, 0.25]), np.diag([0.25, 0.75])])


@pytest.fixture
def block_pair():
    P = SharpObservable(["1", "2"], [np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])])
    M = Observable(
        ["a", "b", "c"],
        [np.diag([0.5, 0.2, 0.0]), np.diag([0.5, 0.8, 0.0]), np.diag([0.0, 0.0, 1.0])],
    )
    return P, M


@pytest.fixture
def trine():
    return trine_povm()
