import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monomeq.errors import InvariantViolation, NotCommuting, NotHermitian
from monomeq.fixtures import cycle_fixture, quad_fixture, random_monomial_instance, unit
from monomeq.halfnormal import conjugate_family
from monomeq.invariant_masa import (
    MasaBasis,
    build_invariant_masa,
    certificate_report,
    conjugation_orbits,
    joint_eigenspaces,
    offdiag_norm,
    verify_masa,
)
from monomeq.linalg_kernel import random_unitary
from monomeq.weighted_perm import perm_matrix


def _span_equal(B, C):
    return np.linalg.norm(B @ B.conj().T - C @ C.conj().T) < 1e-12


def _check_scalar_action(spaces, generators):
    for B, label in zip(spaces.subspaces, spaces.labels):
        for H, mu in zip(generators, label):
            assert np.linalg.norm(H @ B - mu * B) <= 1e-10 * max(1, np.linalg.norm(H))


def test_single_diagonal_generator():
    spaces = joint_eigenspaces([np.diag([1.0, 1.0, 2.0])])
    assert spaces.dims == [1, 2]
    assert _span_equal(spaces.subspaces[0], np.eye(3)[:, [2]])
    assert _span_equal(spaces.subspaces[1], np.eye(3)[:, :2])


def test_rank_one_projections_refine_fully():
    gens = [unit(5, k, k) for k in range(4)]
    spaces = joint_eigenspaces(gens)
    assert spaces.dims == [1] * 5
    targets = [np.eye(5)[:, [k]] for k in range(5)]
    for B in spaces.subspaces:
        assert sum(_span_equal(B, T) for T in targets) == 1
    _check_scalar_action(spaces, gens)


def test_identity_generator_and_empty_list():
    assert joint_eigenspaces([np.eye(4)]).dims == [4]
    assert joint_eigenspaces([], n=3).dims == [3]


def test_guards():
    with pytest.raises(NotCommuting) as info:
        joint_eigenspaces([np.diag([1.0, 2.0]), np.array([[0, 1], [1, 0]])])
    assert info.value.pair == (0, 1) and info.value.norm > 1
    with pytest.raises(NotHermitian):
        joint_eigenspaces([np.array([[1, 1], [0, 1]])])


def test_labels_are_distinct():
    rng = np.random.default_rng(4)
    W = random_unitary(6, rng)
    gens = [W @ np.diag(d) @ W.conj().T for d in ([1, 1, 1, 2, 2, 3], [5, 5, 4, 4, 4, 4])]
    spaces = joint_eigenspaces(gens)
    assert sorted(spaces.dims) == [1, 1, 2, 2]
    labels = [tuple(np.round(lbl, 8)) for lbl in spaces.labels]
    assert len(set(labels)) == len(labels)
    _check_scalar_action(spaces, gens)


def test_orbits_identity():
    spaces = joint_eigenspaces([np.diag([1.0, 2.0, 3.0])])
    orbits = conjugation_orbits(spaces, np.eye(3))
    assert orbits.sigma == (0, 1, 2) and len(orbits.orbits) == 3


def test_cycle_fixture_family_is_not_invariant_under_twisted_cycle():
    # U^* e_4 = (e_5 - e_1)/sqrt 2 (1-based) leaves the joint eigenspaces of E11..E44
    fx = cycle_fixture(5)
    spaces = joint_eigenspaces([unit(5, k, k) for k in range(4)])
    np.testing.assert_allclose(fx.U.conj().T @ np.eye(5)[:, 3], np.sqrt(0.5) * np.array([-1, 0, 0, 0, 1]),
                               atol=1e-15)
    with pytest.raises(InvariantViolation):
        conjugation_orbits(spaces, fx.U)
    # the untwisted cycle C permutes e_1..e_5 in a single orbit
    orbits = conjugation_orbits(spaces, fx.expected["C"])
    assert len(orbits.orbits) == 1 and len(orbits.orbits[0]) == 5


def test_orbits_follow_inverse_permutation():
    rng = np.random.default_rng(8)
    n = 6
    perm = tuple(int(i) for i in rng.permutation(n))
    U = np.diag(np.exp(2j * np.pi * rng.random(n))) @ perm_matrix(perm)
    spaces = joint_eigenspaces([np.diag(np.arange(1.0, n + 1))])
    coord = [int(np.argmax(np.abs(B[:, 0]))) for B in spaces.subspaces]
    orbits = conjugation_orbits(spaces, U)
    inverse = np.argsort(perm)
    for j, k in enumerate(orbits.sigma):
        assert coord[k] == inverse[coord[j]]


def test_masa_for_diagonal_and_monomial():
    perm = (2, 0, 1)
    U = np.diag([1j, -1, 1]) @ perm_matrix(perm)
    masa = build_invariant_masa([np.diag([1.0, 2.0, 3.0])], U)
    magnitudes = np.abs(masa.V)
    # every column of V is a standard basis vector up to phase
    assert np.allclose(magnitudes.sum(axis=0), 1) and np.allclose(magnitudes.sum(axis=1), 1)
    assert np.allclose(magnitudes, np.round(magnitudes))
    assert max(masa.diag_certificates) < 1e-14 and masa.monomial_residual < 1e-14
    assert verify_masa(masa, [np.diag([1.0, 2.0, 3.0])], U)


def test_masa_empty_generators_is_eigenbasis_of_U():
    U = random_unitary(4, 21)
    masa = build_invariant_masa([], U)
    D = masa.V.conj().T @ U @ masa.V
    assert offdiag_norm(D) < 1e-12
    assert verify_masa(masa, [], U)


def _random_case(seed):
    inst = random_monomial_instance(2 + seed % 7, seed)
    n = inst.A.shape[0]
    fam = conjugate_family(inst.P, inst.U, n - 1)
    return fam.members, inst.U


@settings(max_examples=50, deadline=None, derandomize=True)
@given(seed=st.integers(0, 2**32 - 1))
def test_masa_certificates_property(seed):
    gens, U = _random_case(seed)
    masa = build_invariant_masa(gens, U)
    report = certificate_report(masa, gens, U)
    assert report["ok"], report
    for value, H in zip(report["diag_certificates"], gens):
        assert value <= 1e-8 * max(1, np.linalg.norm(H))
    assert np.all(np.abs(np.array(report["weight_moduli"]) - 1) <= 1e-8)
    # orbit dimension constancy
    dims = [B.shape[1] for B in joint_eigenspaces(gens).subspaces]
    for orbit in masa.orbits.orbits:
        assert len({dims[j] for j in orbit}) == 1


def test_masa_conjugates_diagonals_to_diagonals():
    rng = np.random.default_rng(99)
    gens, U = _random_case(5)
    masa = build_invariant_masa(gens, U)
    M = masa.V.conj().T @ U @ masa.V
    for _ in range(20):
        D = np.diag(rng.standard_normal(M.shape[0]))
        assert offdiag_norm(M.conj().T @ D @ M) <= 1e-8


def test_idempotence_on_masa_diagonals():
    gens, U = _random_case(12)
    masa = build_invariant_masa(gens, U)
    n = masa.V.shape[0]
    separating = masa.V @ np.diag(np.arange(1.0, n + 1)) @ masa.V.conj().T
    assert joint_eigenspaces([separating]).dims == [1] * n


def test_verify_masa_negative_and_phase_invariance():
    gens, U = _random_case(3)
    masa = build_invariant_masa(gens, U)
    assert verify_masa(masa, gens, U)
    flipped = masa.V.copy()
    flipped[:, 0] *= -1j
    assert verify_masa(flipped, gens, U)
    H = np.array([[1.0, 1.0], [1.0, 1.0]])
    assert not verify_masa(np.eye(2), [H], np.eye(2))
    bogus = MasaBasis(V=np.eye(2), diag_certificates=[], monomial_certificate=None, monomial_residual=0.0)
    assert not verify_masa(bogus, [H], np.eye(2))


def test_quad_family_is_not_commuting():
    fx = quad_fixture()
    fam = conjugate_family(fx.P, fx.U, 3)
    with pytest.raises(NotCommuting):
        build_invariant_masa(fam.members, fx.U)
