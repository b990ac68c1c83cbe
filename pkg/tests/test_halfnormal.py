import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monomeq.errors import NotHermitian, NotUnitary
from monomeq.fixtures import (
    cycle_fixture,
    monomializable_pair,
    quad_fixture,
    random_half_normal_pair,
    random_monomial_instance,
)
from monomeq.halfnormal import (
    bounded_commutant_check,
    conjugate_family,
    extended_commutant_check,
    is_half_normal,
    half_normal_forms,
)
from monomeq.linalg_kernel import fro, random_unitary

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 8)


def test_normal_matrices_are_half_normal(rng):
    H = rng.standard_normal((5, 5))
    H = H + H.T
    assert is_half_normal(H)[0]
    ok, norm = is_half_normal(random_unitary(5, 1))
    assert ok and norm < 1e-13


def test_quad_is_half_normal():
    ok, norm = is_half_normal(quad_fixture().A)
    assert ok and norm <= 1e-10


def test_jordan_block_is_not_half_normal():
    ok, norm = is_half_normal([[1, 1], [0, 1]])
    assert not ok
    assert norm == pytest.approx(2 * np.sqrt(2), abs=1e-14)


def test_family_identity_unitary():
    P = np.diag([3.0, 1.0, 2.0])
    fam = conjugate_family(P, np.eye(3), 4)
    assert len(fam) == 5
    for member in fam.members:
        np.testing.assert_array_equal(member, P)


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_family_on_cycle_fixture(n):
    fx = cycle_fixture(n)
    fam = conjugate_family(fx.P, fx.U, n - 2)
    for k in range(1, n - 1):
        np.testing.assert_allclose(fam[k], fx.expected["members"][k], atol=1e-12)


def test_family_guards():
    with pytest.raises(NotUnitary):
        conjugate_family(np.eye(2), np.array([[1, 1], [0, 1]]), 2)
    with pytest.raises(NotHermitian):
        conjugate_family(np.array([[1, 1], [0, 1]]), np.eye(2), 2)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(seed=seeds, n=dims)
def test_family_preserves_spectrum(seed, n):
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    P = Z @ Z.conj().T
    fam = conjugate_family(P, random_unitary(n, rng), 2 * n)
    base = np.linalg.eigvalsh(P)
    for k, member in enumerate(fam.members):
        np.testing.assert_allclose(np.linalg.eigvalsh(member), base, atol=1e-9 * max(1, fro(P)))
        if k:
            np.testing.assert_allclose(
                member, fam.base_U.conj().T @ fam[k - 1] @ fam.base_U, atol=1e-10 * fro(P)
            )


def test_scalar_P_passes():
    res = bounded_commutant_check(2.5 * np.eye(4), random_unitary(4, 3))
    assert res.passed and res.first_failing_k is None
    assert max(res.commutator_norms) < 1e-13


def test_quad_fails_at_two():
    fx = quad_fixture()
    res = bounded_commutant_check(fx.P, fx.U)
    assert not res.passed and res.first_failing_k == 2
    assert res.commutator_norms[1] <= res.threshold < res.commutator_norms[2]


@pytest.mark.parametrize("n", [3, 4, 5, 8])
def test_cycle_fails_exactly_at_n_minus_1(n):
    fx = cycle_fixture(n)
    res = bounded_commutant_check(fx.P, fx.U)
    assert res.first_failing_k == n - 1
    res = extended_commutant_check(fx.P, fx.U, n - 1)
    assert res.first_failing_k == n - 1


def test_extended_identity():
    res = extended_commutant_check(np.diag([1.0, 2.0]), np.eye(2), 100)
    assert res.passed and len(res.commutator_norms) == 101 and max(res.commutator_norms) == 0


def test_bounded_check_extends_on_monomializable_pairs():
    for seed in range(100):
        n = 2 + seed % 7
        P, U = monomializable_pair(n, seed)
        assert bounded_commutant_check(P, U).passed
        res = extended_commutant_check(P, U, 5 * n)
        assert res.passed
        assert max(res.commutator_norms) <= 1e-9 * max(1, fro(P) ** 2)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(seed=seeds, n=dims)
def test_bounded_check_extends_property(seed, n):
    # anything passing k <= n-1 passes up to 5n; half-normal pairs exercise both outcomes
    P, U = random_half_normal_pair(n, seed)
    if bounded_commutant_check(P, U).passed:
        assert extended_commutant_check(P, U, 5 * n).passed


def test_weighted_permutations_are_half_normal():
    for seed in range(100):
        inst = random_monomial_instance(1 + seed % 8, seed, invertible=seed % 3 != 0)
        assert is_half_normal(inst.A)[0]
        assert is_half_normal(inst.form.matrix())[0]


def _pairs(count):
    for seed in range(count):
        n = 2 + seed % 6
        rng = np.random.default_rng(seed)
        kind = seed % 3
        if kind == 0:
            yield monomializable_pair(n, rng)
        elif kind == 1:
            yield random_half_normal_pair(n, rng)
        else:
            Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            yield Z @ Z.conj().T, random_unitary(n, rng)


def test_half_normal_formulations_agree():
    seen = set()
    for P, U in _pairs(100):
        forms = half_normal_forms(P, U)
        verdicts = {name: v for name, (v, _) in forms.items()}
        assert len(set(verdicts.values())) == 1, forms
        seen.add(verdicts["AA"])
    assert seen == {True, False}
