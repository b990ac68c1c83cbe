"""Half-normality predicates and the conjugate family ``P_k = (U^*)^k P U^k``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotHermitian, NotUnitary
from .linalg_kernel import (
    DEFAULT_TOL,
    ToleranceConfig,
    commutator_norm,
    dagger,
    fro,
    hermitian_defect,
    scale_of,
    unitary_defect,
)


@dataclass(frozen=True)
class ConjugateFamily:
    base_P: np.ndarray
    base_U: np.ndarray
    members: list = field(default_factory=list)

    def __len__(self):
        return len(self.members)

    def __getitem__(self, k):
        return self.members[k]


@dataclass(frozen=True)
class CommutantCheckResult:
    """Outcome of testing ``[P, P_k] = 0`` for ``k = 1..K``.

    ``commutator_norms[k]`` holds ``||[P, P_k]||_F``; index 0 is the trivial
    ``k = 0`` term and is always zero.
    """

    passed: bool
    first_failing_k: int | None
    commutator_norms: list
    threshold: float


def is_half_normal(A, tol: ToleranceConfig = DEFAULT_TOL):
    """Return ``(verdict, ||[A^*A, AA^*]||_F)``.

    The verdict compares the norm against ``commute_tol * max(1, ||A||_F^4)``.
    """
    A = np.asarray(A, dtype=np.complex128)
    Ah = dagger(A)
    norm = commutator_norm(Ah @ A, A @ Ah)
    return norm <= tol.commute_tol * max(1.0, fro(A) ** 4), norm


def _check_pair(P, U, tol):
    P = np.asarray(P, dtype=np.complex128)
    U = np.asarray(U, dtype=np.complex128)
    if P.shape != U.shape:
        raise ValueError(f"P has shape {P.shape} but U has shape {U.shape}")
    if hermitian_defect(P) > tol.commute_tol * scale_of(P):
        raise NotHermitian("P is not Hermitian to tolerance")
    if unitary_defect(U) > tol.commute_tol * scale_of(U):
        raise NotUnitary("U is not unitary to tolerance")
    return P, U


def conjugate_family(P, U, kmax: int, tol: ToleranceConfig = DEFAULT_TOL) -> ConjugateFamily:
    """Members ``P_0 = P, ..., P_kmax`` built by repeated conjugation ``U^* X U``."""
    P, U = _check_pair(P, U, tol)
    Uh = dagger(U)
    members = [P.copy()]
    X = P
    for _ in range(kmax):
        X = Uh @ X @ U
        X = 0.5 * (X + dagger(X))
        members.append(X)
    return ConjugateFamily(base_P=P, base_U=U, members=members)


def extended_commutant_check(P, U, K: int, tol: ToleranceConfig = DEFAULT_TOL) -> CommutantCheckResult:
    """Test ``[P, P_k] = 0`` for every ``k = 1..K``."""
    family = conjugate_family(P, U, K, tol)
    P = family.base_P
    threshold = tol.commute_tol * max(1.0, fro(P) ** 2)
    norms = [commutator_norm(P, Pk) for Pk in family.members]
    first = next((k for k in range(1, K + 1) if norms[k] > threshold), None)
    return CommutantCheckResult(
        passed=first is None, first_failing_k=first, commutator_norms=norms, threshold=threshold
    )


def bounded_commutant_check(P, U, tol: ToleranceConfig = DEFAULT_TOL) -> CommutantCheckResult:
    """Commutant test for ``k = 1..n-1``; passing it certifies every ``k``."""
    n = np.shape(P)[0]
    return extended_commutant_check(P, U, max(n - 1, 0), tol)


def half_normal_forms(P, U, tol: ToleranceConfig = DEFAULT_TOL):
    """The three equivalent half-normality tests for ``A = P U``.

    Returns a dict of ``(verdict, norm)`` pairs keyed by ``"AA"`` (``[A^*A, AA^*]``),
    ``"UstarPU"`` (``[P, U^*PU]``) and ``"UPUstar"`` (``[P, UPU^*]``).
    """
    P, U = _check_pair(P, U, tol)
    Uh = dagger(U)
    p_threshold = tol.commute_tol * max(1.0, fro(P) ** 2)
    n1 = commutator_norm(P, Uh @ P @ U)
    n2 = commutator_norm(P, U @ P @ Uh)
    return {
        "AA": is_half_normal(P @ U, tol),
        "UstarPU": (n1 <= p_threshold, n1),
        "UPUstar": (n2 <= p_threshold, n2),
    }
