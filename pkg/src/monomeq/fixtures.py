"""Exact worked examples and seeded random instance generators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .invariant_masa import MasaBasis
from .linalg_kernel import dagger, random_unitary
from .weighted_perm import MonomialForm, perm_matrix

SQRT_HALF = 0.7071067811865476


@dataclass(frozen=True)
class FixtureBundle:
    name: str
    P: np.ndarray
    U: np.ndarray
    expected: dict = field(default_factory=dict)

    @property
    def A(self) -> np.ndarray:
        return self.P @ self.U


def unit(n, i, j) -> np.ndarray:
    """Matrix unit with a single 1 at 0-based position ``(i, j)``."""
    E = np.zeros((n, n), dtype=np.complex128)
    E[i, j] = 1.0
    return E


def cycle_matrix(n: int) -> np.ndarray:
    """``C e_1 = e_n`` and ``C e_k = e_{k-1}`` (1-based)."""
    C = np.zeros((n, n), dtype=np.complex128)
    C[n - 1, 0] = 1.0
    for k in range(1, n):
        C[k - 1, k] = 1.0
    return C


def cycle_fixture(n: int) -> FixtureBundle:
    """Rank-one ``P`` and a twisted cycle ``U`` whose commutant test first fails at ``k = n-1``.

    ``expected["members"][k]`` is ``E_{k+1,k+1}`` (1-based) for ``k = 1..n-2``;
    ``expected["Q"]`` is the 2x2 block ``W^* P_{n-2} W`` occupies in the last
    two coordinates, so that ``P_{n-1} = C^* (0 + Q) C``.
    """
    if n < 3:
        raise ValueError("cycle fixture needs n >= 3")
    C = cycle_matrix(n)
    V = SQRT_HALF * np.array([[1, -1], [1, 1]], dtype=np.complex128)
    W = np.eye(n, dtype=np.complex128)
    W[n - 2:, n - 2:] = V
    U = W @ C
    P = unit(n, 0, 0)
    Q = dagger(V) @ np.diag([1.0, 0.0]).astype(np.complex128) @ V
    expected = {
        "commuting_k": list(range(1, n - 1)),
        "first_failing_k": n - 1,
        "members": {k: unit(n, k, k) for k in range(1, n - 1)},
        "Q": Q,
        "half_normal": True,
        "C": C,
        "W": W,
    }
    return FixtureBundle(name=f"cycle-{n}", P=P, U=U, expected=expected)


def quad_fixture() -> FixtureBundle:
    """Invertible 4x4 half-normal ``A = P U`` that is not a weighted permutation up to unitary equivalence."""
    B = SQRT_HALF * np.array([[1, 1], [-1, 1]], dtype=np.complex128)
    C = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    U1 = np.zeros((4, 4), dtype=np.complex128)
    U1[:2, :2] = B
    U1[2:, 2:] = B
    U2 = np.eye(4, dtype=np.complex128)
    U2[1:3, 1:3] = C
    U = U1 @ U2
    P = np.diag([1.0, 1.0, 2.0, 2.0]).astype(np.complex128)
    # (U^2 P U*^2) P - P (U^2 P U*^2), as printed
    commutator = np.zeros((4, 4), dtype=np.complex128)
    commutator[0, 2] = commutator[1, 3] = 0.5
    commutator[2, 0] = commutator[3, 1] = -0.5
    expected = {
        "half_normal": True,
        "first_failing_k": 2,
        "commutator_k2": commutator,
        "verdict": "NotEquivalent",
        "U_entries": SQRT_HALF * np.array(
            [[1, 0, 1, 0], [-1, 0, 1, 0], [0, 1, 0, 1], [0, -1, 0, 1]], dtype=np.complex128
        ),
    }
    return FixtureBundle(name="quad", P=P, U=U, expected=expected)


@dataclass(frozen=True)
class MonomialInstance:
    """``A = W (D Perm) W^*`` together with its exact polar factors."""

    A: np.ndarray
    W: np.ndarray
    form: MonomialForm
    P: np.ndarray
    U: np.ndarray


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_monomial_instance(n: int, seed=None, invertible: bool = True,
                             repeated: bool | None = None) -> MonomialInstance:
    """Seeded weighted permutation conjugated by a Haar unitary.

    With ``repeated`` (default: a seeded coin flip) the weight moduli are drawn
    from ``{0.5, 1, 2}`` so singular values repeat; otherwise uniformly from
    ``[0.5, 2]``. Non-invertible instances get at least one zero weight.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    if repeated is None:
        repeated = bool(rng.integers(2))
    if repeated:
        moduli = rng.choice([0.5, 1.0, 2.0], size=n)
    else:
        moduli = rng.uniform(0.5, 2.0, size=n)
    phases = np.exp(2j * np.pi * rng.random(n))
    perm = tuple(int(i) for i in rng.permutation(n))
    if not invertible:
        zeros = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
        moduli[zeros] = 0.0
    W = random_unitary(n, rng)
    form = MonomialForm(weights=moduli * phases, perm=perm)
    Wh = dagger(W)
    A = W @ form.matrix() @ Wh
    P = W @ np.diag(moduli).astype(np.complex128) @ Wh
    U = W @ (phases[:, None] * perm_matrix(perm)) @ Wh
    return MonomialInstance(A=A, W=W, form=form, P=0.5 * (P + dagger(P)), U=U)


def random_monomial_conjugate(n: int, seed=None, invertible: bool = True):
    """Return ``(A, ground_truth)``; ``ground_truth.V`` is the conjugating unitary."""
    inst = random_monomial_instance(n, seed, invertible)
    phases = np.where(np.abs(inst.form.weights) > 0,
                      inst.form.weights / np.where(np.abs(inst.form.weights) > 0,
                                                   np.abs(inst.form.weights), 1.0),
                      1.0)
    truth = MasaBasis(
        V=inst.W,
        diag_certificates=[0.0],
        monomial_certificate=MonomialForm(weights=phases, perm=inst.form.perm),
        monomial_residual=0.0,
    )
    return inst.A, truth


def monomializable_pair(n: int, seed=None):
    """``(P, U)`` with ``P`` positive and ``U`` unitary, simultaneously diagonal/monomial after a Haar rotation.

    Such pairs pass the commutant test for every ``k``. ``P`` may repeat eigenvalues.
    """
    inst = random_monomial_instance(n, seed, invertible=True)
    return inst.P, inst.U


def _composition(n, parts, rng):
    cuts = np.sort(rng.choice(np.arange(1, n), size=parts - 1, replace=False)) if parts > 1 else []
    bounds = [0, *map(int, cuts), n]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def _block_unitary(sizes, rng):
    n = sum(sizes)
    K = np.zeros((n, n), dtype=np.complex128)
    start = 0
    for s in sizes:
        K[start:start + s, start:start + s] = random_unitary(s, rng)
        start += s
    return K


def random_half_normal_pair(n: int, seed=None):
    """Invertible half-normal ``A = P U`` with repeated singular values.

    ``P = Y D Y^*`` with ``D`` block-scalar and ``U = Y K_2 Pi K_1 Y^*`` where
    ``K_1, K_2`` are unitary and block-diagonal for the blocks of ``D`` and
    ``Pi`` is a permutation. Then ``U^* P U = Y K_1^* (Pi^* D Pi) K_1 Y^*`` is
    block-diagonal too, hence commutes with ``P``. Such ``A`` may or may not be
    unitarily equivalent to a weighted permutation.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = _rng(seed)
    parts = int(rng.integers(1, n))
    sizes = _composition(n, parts, rng)
    values = np.sort(rng.uniform(0.5, 2.5, size=parts))
    D = np.concatenate([np.full(s, v) for s, v in zip(sizes, values)]).astype(np.complex128)
    K1 = _block_unitary(sizes, rng)
    K2 = _block_unitary(sizes, rng)
    Pi = perm_matrix(tuple(int(i) for i in rng.permutation(n)))
    Y = random_unitary(n, rng)
    Yh = dagger(Y)
    P = Y @ np.diag(D) @ Yh
    U = Y @ K2 @ Pi @ K1 @ Yh
    return 0.5 * (P + dagger(P)), U
