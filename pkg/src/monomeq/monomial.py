"""Deciding unitary equivalence to a weighted permutation.

:func:`decide_unitary_equiv` runs the full pipeline: half-normality, the
polar decomposition ``A = P U``, a fast path when the singular values are
pairwise distinct, and otherwise the commutant test on ``P_k = (U^*)^k P U^k``
for ``k < n`` followed by the invariant-masa construction of a witness.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditioned, MonomeqError, PreconditionViolation
from .halfnormal import CommutantCheckResult, bounded_commutant_check, conjugate_family, is_half_normal
from .invariant_masa import MasaBasis, build_invariant_masa, offdiag_norm
from .linalg_kernel import (
    DEFAULT_TOL,
    PolarDecomposition,
    ToleranceConfig,
    as_matrix,
    cluster_sorted,
    dagger,
    hermitian_eig,
    polar_left,
    random_unitary,
    scale_of,
    svd,
    unitary_defect,
)
from .matrix_io import complex_list, matrix_to_obj
from .weighted_perm import MonomialForm, detect_monomial, nearest_monomial

__all__ = [
    "DecisionReport",
    "MonomialForm",
    "Verdict",
    "Witness",
    "decide_unitary_equiv",
    "detect_monomial",
    "perturb_to_distinct",
    "similar_to_weighted_permutation",
    "witness_from_distinct",
]


class Verdict(str, enum.Enum):
    EQUIVALENT = "Equivalent"
    NOT_EQUIVALENT = "NotEquivalent"
    INCONCLUSIVE = "Inconclusive"

    @property
    def exit_code(self) -> int:
        return {"Equivalent": 0, "NotEquivalent": 1, "Inconclusive": 2}[self.value]


@dataclass(frozen=True)
class Witness:
    """Unitary ``V`` with ``V^* A V`` within ``residual`` of ``form.matrix()``."""

    V: np.ndarray
    form: MonomialForm
    residual: float


@dataclass
class DecisionReport:
    verdict: Verdict
    half_normal: bool
    commutator_norm: float
    singular_values: np.ndarray
    distinct: bool
    invertible: bool
    commutant_check: CommutantCheckResult | None = None
    witness: Witness | None = None
    refutation: dict | None = None
    path: str = ""
    diagnostics: list = field(default_factory=list)

    @property
    def first_failing_k(self):
        return None if self.commutant_check is None else self.commutant_check.first_failing_k

    def to_json(self) -> dict:
        witness = None
        if self.witness is not None:
            witness = {
                "V": matrix_to_obj(self.witness.V),
                "weights": complex_list(self.witness.form.weights),
                "perm": list(self.witness.form.perm),
                "residual": self.witness.residual,
            }
        refutation = None
        if self.refutation is not None:
            refutation = {
                k: (matrix_to_obj(v) if isinstance(v, np.ndarray) else v)
                for k, v in self.refutation.items()
            }
        check = self.commutant_check
        return {
            "verdict": self.verdict.value,
            "half_normal": self.half_normal,
            "commutator_norm": self.commutator_norm,
            "singular_values": [float(s) for s in self.singular_values],
            "singular_values_distinct": self.distinct,
            "invertible": self.invertible,
            "first_failing_k": self.first_failing_k,
            "commutant_norms": None if check is None else [float(x) for x in check.commutator_norms[1:]],
            "path": self.path,
            "witness": witness,
            "refutation": refutation,
            "diagnostics": list(self.diagnostics),
        }


def _witness_from_basis(A, V, tol) -> Witness:
    form, residual = nearest_monomial(dagger(V) @ A @ V)
    return Witness(V=V, form=form, residual=residual)


def _witness_ok(A, w: Witness, tol) -> bool:
    return w.residual <= tol.witness_tol * scale_of(A) and unitary_defect(w.V) <= tol.witness_tol


def witness_from_distinct(A, polar: PolarDecomposition, tol: ToleranceConfig = DEFAULT_TOL):
    """Witness for a half-normal ``A`` whose singular values are pairwise distinct.

    The eigenbasis of ``P`` already works: ``U^* P^2 U`` commutes with the
    distinct-entry diagonal ``P^2``, so ``U`` is monomial there.

    Returns
    -------
    (MasaBasis, MonomialForm)
        The basis with its certificates, and the form of ``V^* A V``.
    """
    A = as_matrix(A, "A")
    if not polar.distinct:
        raise PreconditionViolation("singular values are not pairwise distinct")
    half_normal, norm = is_half_normal(A, tol)
    if not half_normal:
        raise PreconditionViolation(f"A is not half-normal (||[A*A, AA*]|| = {norm:.3e})")
    V = hermitian_eig(polar.P, tol).vectors
    witness = _witness_from_basis(A, V, tol)
    if not _witness_ok(A, witness, tol):
        raise PreconditionViolation(
            f"eigenbasis of P does not monomialize A (residual {witness.residual:.3e}); "
            "singular values too close for this tolerance"
        )
    u_form, u_residual = nearest_monomial(dagger(V) @ polar.U @ V)
    masa = MasaBasis(
        V=V,
        diag_certificates=[offdiag_norm(dagger(V) @ polar.P @ V)],
        monomial_certificate=u_form,
        monomial_residual=u_residual,
    )
    return masa, witness.form


def perturb_to_distinct(form: MonomialForm, V, m: int, delta: float | None = None,
                        tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``A_m = V (D_m Perm) V^*`` with weight moduli nudged apart by at most ``delta/m``.

    Within each group of (numerically) equal moduli the t-th member gets
    ``t * delta / (n m)`` added; phases are kept and zero weights become
    positive. The default ``delta`` is half the smallest gap between distinct
    moduli (capped at ``1e-3 * max(1, max|d|)``), so groups never cross and the
    singular values of ``A_m`` are pairwise distinct. ``||A_m - A||_F <= n delta / m``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    V = V.V if isinstance(V, MasaBasis) else np.asarray(V, dtype=np.complex128)
    w = np.asarray(form.weights, dtype=np.complex128)
    n = len(w)
    moduli = np.abs(w)
    phases = np.where(moduli > 0, w / np.where(moduli > 0, moduli, 1.0), 1.0)
    order = np.argsort(-moduli, kind="stable")
    ref = max(1.0, float(moduli.max(initial=0.0)))
    groups = cluster_sorted(moduli[order], tol.cluster_tol * ref)
    if delta is None:
        gaps = [moduli[order[g[-1]]] - moduli[order[h[0]]] for g, h in zip(groups, groups[1:])]
        delta = min([1e-3 * ref] + [0.5 * gap for gap in gaps])
    new = moduli.copy()
    for g in groups:
        # the smallest member of a group moves most, keeping the group's order
        for t, pos in enumerate(reversed(g)):
            new[order[pos]] += t * delta / (n * m)
    if len(groups) == 1 and n == 1:
        new = moduli.copy()
    D = new * phases
    return V @ (D[:, None] * form.perm_matrix()) @ dagger(V)


def similar_to_weighted_permutation(A, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Is ``A`` similar (not necessarily unitarily) to a weighted permutation?

    True iff every Jordan block for a nonzero eigenvalue has size one, checked
    as geometric == algebraic multiplicity per eigenvalue cluster.

    Raises
    ------
    IllConditioned
        When two eigenvalue clusters sit within ten cluster thresholds of each
        other, so the multiplicity count would be a guess.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    scale = scale_of(A)
    threshold = tol.cluster_tol * scale
    eigenvalues = np.linalg.eigvals(A)
    # single-linkage clustering in the complex plane
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(eigenvalues[:, None] - eigenvalues[None, :])
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= threshold:
                parent[find(i)] = find(j)
    roots = [find(i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if roots[i] != roots[j] and dist[i, j] <= 10 * threshold:
                raise IllConditioned(
                    f"eigenvalues {eigenvalues[i]:.6g} and {eigenvalues[j]:.6g} are "
                    f"{dist[i, j]:.2e} apart, within 10x the cluster threshold {threshold:.1e}"
                )
    identity = np.eye(n)
    for root in sorted(set(roots)):
        members = [i for i in range(n) if roots[i] == root]
        lam = eigenvalues[members].mean()
        if abs(lam) <= tol.zero_tol * scale:
            continue
        _, sigma, _ = svd(A - lam * identity, tol)
        geometric = int(np.sum(sigma <= threshold))
        if geometric != len(members):
            return False
    return True


def _kernel_retry(A, polar, tol, attempts, seed, zero_level):
    """Re-pair the kernel of ``P`` with random unitaries and retry the commutant test."""
    eig = hermitian_eig(polar.P, tol)
    kernel = eig.vectors[:, eig.values <= zero_level]
    z = kernel.shape[1]
    if z < 2:
        return None
    rng = np.random.default_rng(seed)
    n = A.shape[0]
    for attempt in range(attempts):
        Z = random_unitary(z, rng)
        K = np.eye(n) - kernel @ dagger(kernel) + kernel @ Z @ dagger(kernel)
        U = K @ polar.U
        check = bounded_commutant_check(polar.P, U, tol)
        if check.passed:
            return U, check, attempt + 1
    return None


def _masa_witness(A, P, U, tol):
    family = conjugate_family(P, U, A.shape[0] - 1, tol)
    masa = build_invariant_masa(family.members, U, tol)
    return _witness_from_basis(A, masa.V, tol)


def decide_unitary_equiv(A, tol: ToleranceConfig = DEFAULT_TOL, kernel_retries: int = 32,
                         seed: int = 0) -> DecisionReport:
    """Decide whether ``A`` is unitarily equivalent to a weighted permutation.

    Never raises on numerical trouble: failures become ``Inconclusive`` with a
    diagnostic. ``NotEquivalent`` is only reported when it is certain: ``A`` is
    not half-normal, or ``A`` is invertible (unique polar factors) and some
    ``[P, P_k]`` with ``k < n`` is nonzero.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    half_normal, hn_norm = is_half_normal(A, tol)
    polar = polar_left(A, tol)
    zero_level = tol.zero_tol * scale_of(A)
    invertible = bool(polar.singular_values[-1] > zero_level)
    report = DecisionReport(
        verdict=Verdict.INCONCLUSIVE,
        half_normal=half_normal,
        commutator_norm=hn_norm,
        singular_values=polar.singular_values,
        distinct=polar.distinct,
        invertible=invertible,
    )
    if not half_normal:
        report.verdict = Verdict.NOT_EQUIVALENT
        report.path = "half-normality"
        report.refutation = {"reason": "not half-normal", "commutator_norm": hn_norm}
        return report

    report.commutant_check = check = bounded_commutant_check(polar.P, polar.U, tol)

    if polar.distinct:
        try:
            masa, form = witness_from_distinct(A, polar, tol)
        except PreconditionViolation as exc:
            report.diagnostics.append(f"distinct-singular-value path skipped: {exc}")
        else:
            report.witness = _witness_from_basis(A, masa.V, tol)
            report.verdict = Verdict.EQUIVALENT
            report.path = "distinct-singular-values"
            return report

    U = polar.U
    path = "invariant-masa"
    if not check.passed:
        k = check.first_failing_k
        refutation = {
            "reason": "commutant",
            "k": k,
            "commutator_norm": check.commutator_norms[k],
            "commutator": _commutator_at(polar.P, polar.U, k, tol),
        }
        if invertible:
            report.verdict = Verdict.NOT_EQUIVALENT
            report.path = "commutant"
            report.refutation = refutation
            return report
        retry = _kernel_retry(A, polar, tol, kernel_retries, seed, zero_level)
        if retry is None:
            report.path = "commutant"
            report.refutation = refutation
            report.diagnostics.append(
                "A is singular: the canonical polar factor fails the commutant test, "
                f"and {kernel_retries} random kernel re-pairings did not pass either"
            )
            return report
        U, report.commutant_check, attempts = retry
        path = "kernel-retry"
        report.diagnostics.append(f"kernel re-pairing succeeded after {attempts} attempt(s)")

    try:
        witness = _masa_witness(A, polar.P, U, tol)
    except MonomeqError as exc:
        report.path = path
        report.diagnostics.append(f"masa construction failed: {exc}")
        return report
    if not _witness_ok(A, witness, tol):
        report.path = path
        report.diagnostics.append(f"masa witness residual too large: {witness.residual:.3e}")
        return report
    report.verdict = Verdict.EQUIVALENT
    report.witness = witness
    report.path = path
    return report


def _commutator_at(P, U, k, tol):
    Pk = conjugate_family(P, U, k, tol).members[k]
    return Pk @ P - P @ Pk
