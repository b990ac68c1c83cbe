"""Embed a U-invariant abelian self-adjoint algebra into a U-invariant masa.

The algebra is given by commuting Hermitian generators. Its minimal
projections are the joint eigenspaces of the generators; conjugation by ``U``
permutes them. Walking each orbit of that permutation and diagonalizing the
return map ``(U^*)^m`` on the orbit's first subspace yields an orthonormal
basis in which every generator is diagonal and ``U`` is a weighted permutation
with unimodular weights. The diagonal algebra in that basis is the masa.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousMatch, InvariantViolation, NotCommuting, NotHermitian, NotUnitary
from .linalg_kernel import (
    DEFAULT_TOL,
    ToleranceConfig,
    commutator_norm,
    dagger,
    fro,
    hermitian_defect,
    hermitian_eig,
    scale_of,
    unitary_defect,
)
from .weighted_perm import MonomialForm, cycles, nearest_monomial

# projections further apart than this (in units of commute_tol) never match
MATCH_FACTOR = 10.0


@dataclass(frozen=True)
class JointEigenspaces:
    subspaces: list
    labels: list

    @property
    def dims(self) -> list:
        return [B.shape[1] for B in self.subspaces]

    def projections(self) -> list:
        return [B @ dagger(B) for B in self.subspaces]


@dataclass(frozen=True)
class ConjugationOrbits:
    """``sigma[j] = k`` means ``U^* V_j = V_k``; ``orbits`` are the cycles of sigma."""

    sigma: tuple
    orbits: list
    match_distances: list = field(default_factory=list)


@dataclass(frozen=True)
class MasaBasis:
    V: np.ndarray
    diag_certificates: list
    monomial_certificate: MonomialForm
    monomial_residual: float
    orbits: ConjugationOrbits | None = None


def offdiag_norm(M) -> float:
    return fro(M - np.diag(np.diag(M)))


def _validate_generators(generators, tol):
    gens = [np.asarray(H, dtype=np.complex128) for H in generators]
    if not gens:
        return gens
    shape = gens[0].shape
    for i, H in enumerate(gens):
        if H.shape != shape or H.ndim != 2 or shape[0] != shape[1]:
            raise ValueError(f"generator {i} has shape {H.shape}, expected {shape}")
        if hermitian_defect(H) > tol.commute_tol * scale_of(H):
            raise NotHermitian(f"generator {i} is not Hermitian")
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            norm = commutator_norm(gens[i], gens[j])
            if norm > tol.commute_tol * max(1.0, fro(gens[i]) * fro(gens[j])):
                raise NotCommuting((i, j), norm)
    return [0.5 * (H + dagger(H)) for H in gens]


def joint_eigenspaces(generators, tol: ToleranceConfig = DEFAULT_TOL, n: int | None = None) -> JointEigenspaces:
    """Common eigenspaces of commuting Hermitian matrices by iterative refinement.

    Starting from the whole space, every current piece is split by the
    clustered spectrum of each generator's compression to it, until a full
    pass splits nothing. An empty generator list yields the whole space (``n``
    must then be given).
    """
    gens = _validate_generators(generators, tol)
    if not gens:
        if n is None:
            raise ValueError("n is required when no generators are given")
        gens = [np.eye(n, dtype=np.complex128)]
    n = gens[0].shape[0]
    scales = [scale_of(H) for H in gens]
    pieces = [np.eye(n, dtype=np.complex128)]
    changed = True
    while changed:
        changed = False
        for H, scale in zip(gens, scales):
            refined = []
            for B in pieces:
                if B.shape[1] == 1:
                    refined.append(B)
                    continue
                eig = hermitian_eig(dagger(B) @ H @ B, tol, scale=scale)
                if len(eig.clusters) == 1:
                    refined.append(B)
                    continue
                changed = True
                for c in eig.clusters:
                    refined.append(B @ eig.vectors[:, list(c)])
            pieces = refined
    labels = [
        np.array([np.real(np.trace(dagger(B) @ H @ B)) / B.shape[1] for H in gens])
        for B in pieces
    ]
    return JointEigenspaces(subspaces=pieces, labels=labels)


def conjugation_orbits(spaces: JointEigenspaces, U, tol: ToleranceConfig = DEFAULT_TOL) -> ConjugationOrbits:
    """Permutation of the joint eigenspaces induced by ``V -> U^* V``."""
    U = np.asarray(U, dtype=np.complex128)
    if unitary_defect(U) > tol.commute_tol * scale_of(U):
        raise NotUnitary("U is not unitary to tolerance")
    accept = MATCH_FACTOR * tol.commute_tol
    projections = spaces.projections()
    Uh = dagger(U)
    sigma = []
    best_distances = []
    for j, B in enumerate(spaces.subspaces):
        C = Uh @ B
        image = C @ dagger(C)
        dists = np.array([fro(E - image) for E in projections])
        order = np.argsort(dists, kind="stable")
        best = dists[order[0]]
        if best > accept:
            raise InvariantViolation(
                f"U^* maps joint eigenspace {j} onto no joint eigenspace "
                f"(closest projection distance {best:.3e}, threshold {accept:.1e})"
            )
        if len(order) > 1 and dists[order[1]] <= max(MATCH_FACTOR * best, accept):
            raise AmbiguousMatch(
                f"joint eigenspace {j} matches subspaces {int(order[0])} and {int(order[1])} "
                f"(distances {best:.3e}, {dists[order[1]]:.3e})"
            )
        sigma.append(int(order[0]))
        best_distances.append(float(best))
    if sorted(sigma) != list(range(len(sigma))):
        raise InvariantViolation(f"conjugation does not permute the joint eigenspaces: {sigma}")
    orbits = cycles(sigma)
    dims = spaces.dims
    for orbit in orbits:
        if len({dims[j] for j in orbit}) != 1:
            raise InvariantViolation(f"orbit {orbit} mixes subspace dimensions")
    return ConjugationOrbits(sigma=tuple(sigma), orbits=orbits, match_distances=best_distances)


def _eigenbasis_of_normal(R, tol):
    """Orthonormal eigenbasis of a (numerically) normal matrix via its Hermitian parts."""
    d = R.shape[0]
    if d == 1:
        return np.eye(1, dtype=np.complex128)
    re = 0.5 * (R + dagger(R))
    im = -0.5j * (R - dagger(R))
    # commutator of the parts is the normality defect; it must not block the split
    loose = ToleranceConfig(
        commute_tol=max(tol.commute_tol, 1e-6), cluster_tol=tol.cluster_tol, zero_tol=tol.zero_tol
    )
    spaces = joint_eigenspaces([re, im], loose)
    return np.hstack(spaces.subspaces)


def build_invariant_masa(generators, U, tol: ToleranceConfig = DEFAULT_TOL) -> MasaBasis:
    """Orthonormal basis diagonalizing ``generators`` in which ``U`` is monomial.

    For an orbit ``j_0 -> j_1 -> ... -> j_{m-1}`` of joint eigenspaces, take an
    eigenbasis ``f_t`` of ``(U^*)^m`` restricted to ``V_{j_0}`` and use the
    vectors ``(U^*)^i f_t``, ``i < m``. Then ``U^*`` shifts them along the
    orbit and closes it with the eigenvalue of ``f_t``.
    """
    U = np.asarray(U, dtype=np.complex128)
    n = U.shape[0]
    gens = list(generators)
    spaces = joint_eigenspaces(gens, tol, n=n)
    if spaces.subspaces[0].shape[0] != n:
        raise ValueError("generators and U have different dimensions")
    orbits = conjugation_orbits(spaces, U, tol)
    Uh = dagger(U)
    columns = []
    for orbit in orbits.orbits:
        B0 = spaces.subspaces[orbit[0]]
        Y = B0
        for _ in orbit:
            Y = Uh @ Y
        F = B0 @ _eigenbasis_of_normal(dagger(B0) @ Y, tol)
        for _ in orbit:
            columns.append(F)
            F = Uh @ F
    V = np.hstack(columns)
    diag_certs = [offdiag_norm(dagger(V) @ H @ V) for H in gens]
    form, residual = nearest_monomial(dagger(V) @ U @ V)
    return MasaBasis(
        V=V,
        diag_certificates=diag_certs,
        monomial_certificate=form,
        monomial_residual=residual,
        orbits=orbits,
    )


def certificate_report(V, generators, U, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Recompute every masa certificate for basis ``V`` from scratch."""
    V = V.V if isinstance(V, MasaBasis) else np.asarray(V, dtype=np.complex128)
    U = np.asarray(U, dtype=np.complex128)
    limit = tol.witness_tol
    diag = []
    for H in generators:
        H = np.asarray(H, dtype=np.complex128)
        diag.append((offdiag_norm(dagger(V) @ H @ V), limit * scale_of(H)))
    form, residual = nearest_monomial(dagger(V) @ U @ V)
    moduli = np.abs(form.weights)
    unitary = unitary_defect(V)
    ok = (
        unitary <= limit
        and all(value <= bound for value, bound in diag)
        and residual <= limit * scale_of(U)
        and bool(np.all(np.abs(moduli - 1.0) <= limit))
    )
    return {
        "ok": bool(ok),
        "unitary_defect": unitary,
        "diag_certificates": [value for value, _ in diag],
        "monomial_residual": residual,
        "weight_moduli": moduli.tolist(),
        "form": form,
    }


def verify_masa(V, generators, U, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Independent re-check: V unitary, generators diagonal, ``V^* U V`` unimodular monomial."""
    return certificate_report(V, generators, U, tol)["ok"]
