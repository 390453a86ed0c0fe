import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SZ, trine_povm
from smearing import (
    MarkovKernel,
    Observable,
    SharpObservable,
    indicator_kernel,
    is_zero_one,
    range_effect,
    smear,
    validate,
)
from smearing.decision import (
    block_partition,
    brute_force_contains_range,
    contains_range,
    equivalence_suite,
    equivalent,
    extremal_perturbation_check,
    find_indicator_kernel,
    find_kernel,
    finer_sharp,
    function_of,
    is_clean_sharp,
    is_extremal,
    joint_eigenbasis,
    kernel_lp,
    preceq,
    projection_commutes_check,
    sharp_parent,
)
from smearing.decision.order import atomwise_defect
from smearing.errors import AlreadyClean, NonCommutativeRange, UnknownOutcomeLabel
from smearing.generators import (
    labels,
    random_block_povm,
    random_commutative_povm,
    random_kernel,
    random_povm,
    random_pvm,
    random_unitary,
)
from smearing.operators import op_norm


def max_atom_error(A, B):
    return float(np.max(op_norm(A.effects - B.effects)))


# sharp_parent --------------------------------------------------------------


def test_sharp_parent_diagonal():
    M = Observable("ab", [np.diag([0.5, 0.2]), np.diag([0.5, 0.8])])
    result = sharp_parent(M)
    np.testing.assert_allclose(result.parent.effects, [np.diag([1, 0]), np.diag([0, 1])], atol=1e-12)
    np.testing.assert_allclose(result.kernel.weights, [[0.5, 0.5], [0.2, 0.8]], atol=1e-12)
    assert result.kernel.target == ("a", "b")
    assert result.defect <= 1e-12


def test_sharp_parent_of_sharp_is_itself(block_pair):
    P, _ = block_pair
    result = sharp_parent(P)
    assert is_zero_one(result.kernel.weights, result.parent)
    assert max_atom_error(smear(result.parent, result.kernel), P) <= 1e-12
    # same blocks, possibly relabelled
    assert sorted(np.trace(result.parent.effects, axis1=1, axis2=2).real.round(9)) == [1.0, 2.0]


def test_sharp_parent_merges_identical_columns():
    # both atoms are functions of the same projection, so one block of rank 2
    M = Observable("ab", [0.3 * np.eye(2), 0.7 * np.eye(2)])
    result = sharp_parent(M)
    assert len(result.parent) == 1
    np.testing.assert_allclose(result.kernel.weights, [[0.3, 0.7]], atol=1e-12)


def test_sharp_parent_trine():
    with pytest.raises(NonCommutativeRange) as info:
        sharp_parent(trine_povm())
    assert info.value.norm == pytest.approx(np.sqrt(3) / 9)


@pytest.mark.parametrize("seed", range(40))
def test_sharp_parent_round_trip(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 6))
    P = random_pvm(d, int(rng.integers(1, d + 1)), rng)
    M = smear(P, random_kernel(P.outcomes, labels("x", int(rng.integers(1, 5))), rng))
    result = sharp_parent(M, seed=seed)
    assert validate(result.parent).ok
    assert max_atom_error(smear(result.parent, result.kernel), M) <= 1e-7


def test_joint_eigenbasis_diagonalizes():
    rng = np.random.default_rng(11)
    M = random_commutative_povm(5, 4, rng)
    u = joint_eigenbasis(M)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(5), atol=1e-12)
    for e in M.effects:
        rotated = u.conj().T @ e @ u
        assert np.max(np.abs(rotated - np.diag(np.diag(rotated)))) <= 1e-9


# block partitions ----------------------------------------------------------


def test_block_partition_identity(sigma_z):
    part = block_partition(sigma_z, sigma_z)
    assert part.assignment == {"+": "+", "-": "-"}
    assert part.null_class == ()


def test_block_partition_zero_atoms_go_to_null(sigma_z):
    M = Observable(["+", "z", "-"], [sigma_z["+"], np.zeros((2, 2)), sigma_z["-"]])
    part = block_partition(sigma_z, M)
    assert part.null_class == ("z",)
    assert "z" not in part.assignment


def test_block_partition_example(block_pair):
    P, M = block_pair
    assert block_partition(P, M).assignment == {"a": "1", "b": "1", "c": "2"}
    assert function_of(P, M) == {"a": "1", "b": "1", "c": "2"}


def test_block_partition_noisy(sigma_z, noisy):
    assert block_partition(sigma_z, noisy) is None
    assert function_of(sigma_z, noisy) is None
    assert not contains_range(sigma_z, noisy)
    assert not brute_force_contains_range(sigma_z, noisy)


def test_brute_force_examples(sigma_z, block_pair):
    P, M = block_pair
    assert brute_force_contains_range(P, M) and contains_range(P, M)
    assert brute_force_contains_range(sigma_z, sigma_z)
    trivial = SharpObservable(["all"], [np.eye(2)])
    assert brute_force_contains_range(trivial, trine_povm())


def test_function_of_null_atoms_use_largest_trace(block_pair):
    P, M = block_pair
    padded = Observable(list(M.outcomes) + ["z"], list(M.effects) + [np.zeros((3, 3))])
    # block "1" has rank 2, so it wins
    assert function_of(P, padded)["z"] == "1"


@pytest.mark.parametrize("seed", range(40))
def test_block_partition_round_trip(seed):
    rng = np.random.default_rng(seed)
    P = random_pvm(int(rng.integers(1, 5)), int(rng.integers(1, 4)), rng, prefix="p")
    M, expected = random_block_povm(P, [int(rng.integers(1, 3)) for _ in P.outcomes], rng)
    part = block_partition(P, M)
    assert part is not None
    assert brute_force_contains_range(P, M)
    k = indicator_kernel(part.assignment, part.null_class, M.outcomes, P.outcomes)
    assert max_atom_error(smear(M, k), P) <= 1e-7
    for y in P.outcomes:
        np.testing.assert_allclose(range_effect(M, part.preimage(y)), P[y], atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_contains_range_matches_subset_oracle(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    P = random_pvm(d, int(rng.integers(1, d + 1)), rng, prefix="p")
    if rng.random() < 0.5:
        M, _ = random_block_povm(P, [int(rng.integers(1, 3)) for _ in P.outcomes], rng)
    else:
        M = random_povm(d, int(rng.integers(1, 5)), rng)
    assert contains_range(P, M) == brute_force_contains_range(P, M)


# indicator kernels and commuting projections -------------------------------


def test_find_indicator_kernel_examples(sigma_z, noisy, block_pair):
    P, M = block_pair
    assert find_indicator_kernel(M, P) == {"a": "1", "b": "1", "c": "2"}
    assert find_indicator_kernel(M, P, exhaustive=True) == {"a": "1", "b": "1", "c": "2"}
    assert find_indicator_kernel(noisy, noisy) == {"+": "+", "-": "-"}
    assert find_indicator_kernel(sigma_z, noisy) is None


def test_find_indicator_kernel_unsharp_target():
    M = Observable("abc", [np.diag([0.2, 0.1]), np.diag([0.3, 0.4]), np.diag([0.5, 0.5])])
    N = Observable("uv", [np.diag([0.5, 0.5]), np.diag([0.5, 0.5])])
    assert find_indicator_kernel(M, N) == {"a": "u", "b": "u", "c": "v"}


def test_projection_commutes_examples(sigma_z, block_pair):
    P, M = block_pair
    assert projection_commutes_check(sigma_z)
    assert projection_commutes_check(M)
    assert projection_commutes_check(trine_povm())
    u = random_unitary(2, np.random.default_rng(0))
    rotated = Observable("ab", [u @ e @ u.conj().T for e in sigma_z.effects])
    assert projection_commutes_check(rotated)


@pytest.mark.parametrize("seed", range(20))
def test_projection_commutes_random(seed):
    rng = np.random.default_rng(seed)
    assert projection_commutes_check(random_povm(int(rng.integers(1, 4)), int(rng.integers(1, 6)), rng))


# kernels by linear programming ---------------------------------------------


def test_find_kernel_identity(noisy):
    k = find_kernel(noisy, noisy)
    assert k is not None
    assert atomwise_defect(noisy, k.weights, noisy) <= 1e-6


def test_find_kernel_sharp_to_noisy(sigma_z, noisy):
    k = find_kernel(sigma_z, noisy)
    assert k is not None
    np.testing.assert_allclose(k.weights, [[0.75, 0.25], [0.25, 0.75]], atol=1e-6)


def test_find_kernel_noisy_to_sharp(sigma_z, noisy):
    # diagonal system: .75 l(+,+) + .25 l(-,+) = 1, .25 l(+,+) + .75 l(-,+) = 0
    sol = np.linalg.solve([[0.75, 0.25], [0.25, 0.75]], [1.0, 0.0])
    assert sol[0] == pytest.approx(1.5)
    assert find_kernel(noisy, sigma_z) is None


def test_kernel_lp_shape(noisy):
    lp = kernel_lp(noisy, noisy)
    assert lp.num_vars == 4
    # d^2 real equations per target plus one row sum per source
    assert lp.num_equalities == 2 * 4 + 2


def test_kernel_lp_captures_off_diagonal():
    M = Observable("ab", [np.array([[0.5, 0.5j], [-0.5j, 0.5]]), np.array([[0.5, -0.5j], [0.5j, 0.5]])])
    N = Observable("ab", [np.array([[0.5, -0.5j], [0.5j, 0.5]]), np.array([[0.5, 0.5j], [-0.5j, 0.5]])])
    k = find_kernel(M, N)
    np.testing.assert_allclose(k.weights, [[0, 1], [1, 0]], atol=1e-7)


@pytest.mark.parametrize("seed", range(25))
def test_find_kernel_recovers_smearing(seed):
    rng = np.random.default_rng(seed)
    M = random_povm(int(rng.integers(1, 4)), int(rng.integers(1, 4)), rng)
    N = smear(M, random_kernel(M.outcomes, labels("y", int(rng.integers(1, 4))), rng))
    k = find_kernel(M, N)
    assert k is not None
    assert atomwise_defect(M, k.weights, N) <= 1e-6


def test_preceq_examples(sigma_z, noisy):
    assert preceq(noisy, noisy)
    assert preceq(sigma_z, noisy)
    assert not preceq(noisy, sigma_z)
    assert not equivalent(sigma_z, noisy)
    relabelled = Observable("ab", sigma_z.effects[::-1])
    assert equivalent(sigma_z, relabelled)


@pytest.mark.parametrize("seed", range(10))
def test_preorder_laws(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    M = random_povm(d, 3, rng)
    N = smear(M, random_kernel(M.outcomes, labels("y", 3), rng))
    L = smear(N, random_kernel(N.outcomes, labels("z", 2), rng))
    assert preceq(M, M)
    assert preceq(M, N) and preceq(N, L) and preceq(M, L)
    assert equivalent(N, N)
    assert equivalent(M, N) == equivalent(N, M)


# cleanness -----------------------------------------------------------------


def test_is_clean_examples():
    assert is_clean_sharp(SharpObservable("ab", [np.diag([1.0, 0]), np.diag([0, 1.0])]))
    assert not is_clean_sharp(SharpObservable(["I"], [np.eye(2)]))
    assert not is_clean_sharp(SharpObservable("12", [np.diag([1.0, 1, 0]), np.diag([0, 0, 1.0])]))
    with_zero = SharpObservable("abz", [np.diag([1.0, 0]), np.diag([0, 1.0]), np.zeros((2, 2))])
    assert is_clean_sharp(with_zero)


def test_finer_examples(sigma_z, block_pair):
    F = finer_sharp(SharpObservable(["I"], [np.eye(2)]))
    assert len(F) == 2 and is_clean_sharp(F)
    np.testing.assert_allclose(F.effects.sum(axis=0), np.eye(2), atol=1e-12)

    P, _ = block_pair
    F = finer_sharp(P)
    assert F.outcomes == ("1.0", "1.1", "2.0")
    np.testing.assert_allclose(F["1.0"] + F["1.1"], P["1"], atol=1e-12)
    np.testing.assert_allclose(F["2.0"], P["2"], atol=1e-12)
    assert preceq(F, P) and not preceq(P, F)

    with pytest.raises(AlreadyClean):
        finer_sharp(sigma_z)


@pytest.mark.parametrize("seed", range(15))
def test_unclean_has_strict_refinement(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    P = random_pvm(d, int(rng.integers(1, d)), rng)
    assert not is_clean_sharp(P)
    F = finer_sharp(P)
    assert preceq(F, P) and not preceq(P, F)


@pytest.mark.parametrize("seed", range(15))
def test_clean_is_maximal_among_commuting_parents(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    P = random_pvm(d, d, rng)
    assert is_clean_sharp(P)
    # split every atom of P into scaled copies; these commute with P
    names, atoms = [], []
    for y, proj in zip(P.outcomes, P.effects):
        c = rng.uniform(0.1, 0.9)
        names += [f"{y}a", f"{y}b"]
        atoms += [c * proj, (1 - c) * proj]
    M = Observable(names, atoms)
    assert preceq(M, P)
    assert preceq(P, M)


# extremality ---------------------------------------------------------------


def test_perturbation_empty_subset(noisy):
    w = np.array([[0.75, 0.25], [0.25, 0.75]])
    pert = extremal_perturbation_check(noisy, w, [], target=["+", "-"])
    np.testing.assert_array_equal(pert.plus, w)
    np.testing.assert_array_equal(pert.minus, w)
    assert pert.defect == 0.0


def test_perturbation_hand_example(sigma_z):
    k = MarkovKernel(sigma_z.outcomes, ["+", "-"], [[0.75, 0.25], [0.25, 0.75]])
    pert = extremal_perturbation_check(sigma_z, k, ["+"])
    assert pert.plus[0, 0] == pytest.approx(0.5625, abs=1e-15)
    assert pert.minus[0, 0] == pytest.approx(0.9375, abs=1e-15)
    assert pert.plus[1, 0] == pytest.approx(0.0625, abs=1e-15)
    assert pert.minus[1, 0] == pytest.approx(0.4375, abs=1e-15)
    assert pert.defect == pytest.approx(0.375, abs=1e-9)
    # both halves stay row-stochastic and average back to the kernel
    np.testing.assert_allclose(pert.plus.sum(axis=1), 1, atol=1e-15)
    np.testing.assert_allclose((pert.plus + pert.minus) / 2, k.weights, atol=1e-15)


def test_perturbation_vanishes_on_indicators(block_pair):
    P, M = block_pair
    k = indicator_kernel({"a": "1", "b": "1", "c": "2"}, (), M.outcomes, P.outcomes)
    for b1 in [[], ["1"], ["2"], ["1", "2"]]:
        assert extremal_perturbation_check(M, k, b1).defect == 0.0


def test_perturbation_rejects_unknown_outcome(sigma_z):
    with pytest.raises(UnknownOutcomeLabel):
        extremal_perturbation_check(sigma_z, np.eye(2), ["nope"], target=["+", "-"])


def test_is_extremal_pvms():
    rng = np.random.default_rng(5)
    for _ in range(10):
        d = int(rng.integers(1, 5))
        assert is_extremal(random_pvm(d, int(rng.integers(1, d + 1)), rng))


def test_noisy_is_not_extremal(noisy):
    # explicit perturbation D = (e sz, -e sz) keeps both halves valid
    eps = 0.1
    for sign in (1, -1):
        assert validate(Observable("+-", [noisy["+"] + sign * eps * SZ, noisy["-"] - sign * eps * SZ])).ok
    assert not is_extremal(noisy)


def test_trine_is_extremal():
    M = trine_povm()
    # the three rank-1 atoms are linearly independent Hermitian matrices,
    # so the only scalar perturbation a_x |v_x><v_x| summing to zero is 0
    coeffs = np.array([[e[0, 0].real, e[1, 1].real, e[0, 1].real] for e in M.effects])
    assert abs(np.linalg.det(coeffs)) > 1e-3
    assert is_extremal(M)


def test_four_state_povm_is_not_extremal():
    # four rank-1 qubit atoms in a real plane are linearly dependent
    angles = np.pi * np.arange(4) / 4
    vecs = [np.array([np.cos(a), np.sin(a)]) for a in angles]
    M = Observable("abcd", [0.5 * np.outer(v, v) for v in vecs])
    assert validate(M).ok
    assert not is_extremal(M)


@pytest.mark.parametrize("seed", range(15))
def test_kernels_into_sharp_targets_are_zero_one(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    P = random_pvm(d, int(rng.integers(1, d + 1)), rng, prefix="p")
    M, _ = random_block_povm(P, [int(rng.integers(1, 3)) for _ in P.outcomes], rng)
    k = find_kernel(M, P)
    rounded = np.where(np.abs(k.weights) <= 1e-7, 0.0, np.where(np.abs(k.weights - 1) <= 1e-7, 1.0, k.weights))
    assert is_zero_one(rounded, M)
    for y in P.outcomes:
        assert extremal_perturbation_check(M, rounded, [y], target=P.outcomes).defect <= 2e-9


# equivalence suite ---------------------------------------------------------


def test_suite_examples(sigma_z, noisy, block_pair):
    P, M = block_pair
    report = equivalence_suite(P, M)
    assert report.agree and report.verdict
    report = equivalence_suite(sigma_z, noisy)
    assert report.agree and not report.verdict
    assert set(report.verdicts.values()) == {False}
    report = equivalence_suite(sigma_z, sigma_z)
    assert report.agree and report.verdict
    assert report.to_dict()["defect_flag"] is None


@pytest.mark.parametrize("seed", range(30))
def test_suite_agrees(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    P = random_pvm(d, int(rng.integers(1, d + 1)), rng, prefix="p")
    kind = seed % 3
    if kind == 0:
        M, _ = random_block_povm(P, [int(rng.integers(1, 3)) for _ in P.outcomes], rng)
    elif kind == 1:
        M = random_commutative_povm(d, int(rng.integers(1, 4)), rng)
    else:
        M = random_povm(d, int(rng.integers(1, 4)), rng)
    assert equivalence_suite(P, M).agree


def test_all_maps_enumerated_for_noisy(sigma_z, noisy):
    # none of the four 0/1 kernels smear sigma_z into the noisy observable
    for choice in itertools.product(noisy.outcomes, repeat=2):
        k = indicator_kernel(dict(zip(sigma_z.outcomes, choice)), (), sigma_z.outcomes, noisy.outcomes)
        assert max_atom_error(smear(sigma_z, k), noisy) > 0.1
