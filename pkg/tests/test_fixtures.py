import numpy as np
import pytest

from monomeq.fixtures import (
    SQRT_HALF,
    cycle_fixture,
    monomializable_pair,
    quad_fixture,
    random_half_normal_pair,
    random_monomial_conjugate,
    unit,
)
from monomeq.halfnormal import bounded_commutant_check, conjugate_family, is_half_normal
from monomeq.monomial import Verdict, decide_unitary_equiv


def _unitary_defect(U):
    return np.linalg.norm(U.conj().T @ U - np.eye(len(U)))


def test_sqrt_half_constant():
    assert SQRT_HALF == np.sqrt(0.5)


@pytest.mark.parametrize("n", [3, 4, 5, 8])
def test_cycle_fixture_members(n):
    fx = cycle_fixture(n)
    assert _unitary_defect(fx.U) <= 1e-12
    fam = conjugate_family(fx.P, fx.U, n - 1)
    for k in range(1, n - 1):
        np.testing.assert_allclose(fam.members[k], unit(n, k, k), atol=1e-12)
        assert np.array_equal(fx.expected["members"][k], unit(n, k, k))
    last = fam.members[n - 1]
    assert np.linalg.norm(last @ fx.P - fx.P @ last) > 0.1
    assert bounded_commutant_check(fx.P, fx.U).first_failing_k == n - 1 == fx.expected["first_failing_k"]


@pytest.mark.parametrize("n", [3, 4, 7])
def test_cycle_fixture_q_block(n):
    fx = cycle_fixture(n)
    np.testing.assert_allclose(fx.expected["Q"], 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-15)
    # P_{n-1} = C^* (0 (+) Q) C
    block = np.zeros((n, n), dtype=complex)
    block[n - 2:, n - 2:] = fx.expected["Q"]
    C = fx.expected["C"]
    P_last = conjugate_family(fx.P, fx.U, n - 1).members[n - 1]
    np.testing.assert_allclose(P_last, C.conj().T @ block @ C, atol=1e-12)


def test_cycle_fixture_precondition():
    with pytest.raises(ValueError):
        cycle_fixture(2)


def test_cycle_matrix_action():
    C = cycle_fixture(4).expected["C"]
    e = np.eye(4)
    np.testing.assert_array_equal(C @ e[:, 0], e[:, 3])
    for k in range(1, 4):
        np.testing.assert_array_equal(C @ e[:, k], e[:, k - 1])


def test_quad_fixture_matches_printed_matrices():
    fx = quad_fixture()
    assert _unitary_defect(fx.U) <= 1e-12
    assert np.array_equal(fx.U, fx.expected["U_entries"])
    assert set(np.abs(fx.U).ravel().tolist()) == {0.0, SQRT_HALF}
    P, U = fx.P, fx.U
    assert np.linalg.norm(P @ U @ P @ U.conj().T - U @ P @ U.conj().T @ P) <= 1e-12
    U2 = U @ U
    forward = U2 @ P @ U2.conj().T
    np.testing.assert_allclose(forward @ P - P @ forward, fx.expected["commutator_k2"], atol=1e-12)
    assert is_half_normal(fx.A)[0]


def test_expectations_consistent():
    fx = quad_fixture()
    assert np.linalg.norm(fx.expected["commutator_k2"]) > 0
    assert fx.expected["first_failing_k"] == 2 and fx.expected["verdict"] == "NotEquivalent"


def test_random_monomial_conjugate_deterministic():
    A1, t1 = random_monomial_conjugate(5, 123)
    A2, t2 = random_monomial_conjugate(5, 123)
    assert np.array_equal(A1, A2) and np.array_equal(t1.V, t2.V)
    A3, _ = random_monomial_conjugate(5, 124)
    assert not np.array_equal(A1, A3)


def test_random_monomial_conjugate_ground_truth():
    A, truth = random_monomial_conjugate(6, 4)
    M = truth.V.conj().T @ A @ truth.V
    support = np.abs(M) > 1e-12
    assert support.sum(axis=0).max() <= 1 and support.sum(axis=1).max() <= 1
    assert decide_unitary_equiv(A).verdict is Verdict.EQUIVALENT


def test_scalar_instance():
    A, _ = random_monomial_conjugate(1, 0)
    assert A.shape == (1, 1)
    assert decide_unitary_equiv(A).verdict is Verdict.EQUIVALENT


def test_singular_instances_have_zero_weights():
    A, _ = random_monomial_conjugate(4, 2, invertible=False)
    assert np.linalg.svd(A, compute_uv=False).min() < 1e-12


def test_pair_generators():
    for seed in range(10):
        P, U = monomializable_pair(5, seed)
        assert bounded_commutant_check(P, U).passed
        P, U = random_half_normal_pair(5, seed)
        assert is_half_normal(P @ U)[0]
        assert np.linalg.svd(P @ U, compute_uv=False).min() > 0.4
