"""Dense complex matrix kernel.

Hermitian eigendecomposition (cyclic Jacobi), SVD (one-sided Jacobi) and the
left polar decomposition ``A = P U``, all under a single tolerance policy.
Matrices are plain ``complex128`` numpy arrays; :func:`as_matrix` is the one
gate through which external data enters.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionMismatch, MatrixFormatError, NotHermitian

_EPS = np.finfo(float).eps
_MAX_SWEEPS = 60


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds used throughout the package.

    Parameters
    ----------
    commute_tol : float
        Relative Frobenius tolerance for commutator and residual tests.
    cluster_tol : float
        Relative gap below which neighbouring eigenvalues are merged.
    zero_tol : float
        Threshold below which an entry or singular value counts as zero.
    """

    commute_tol: float = 1e-10
    cluster_tol: float = 1e-8
    zero_tol: float = 1e-12

    def __post_init__(self):
        for name in ("commute_tol", "cluster_tol", "zero_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.commute_tol >= 1:
            raise ValueError("commute_tol must be < 1")

    @property
    def witness_tol(self) -> float:
        """Relative residual accepted for witnesses and masa certificates."""
        return 100.0 * self.commute_tol

    @classmethod
    def profile(cls, name: str) -> "ToleranceConfig":
        try:
            return cls(**PROFILES[name])
        except KeyError:
            raise ValueError(
                f"unknown tolerance profile {name!r}; choose from {sorted(PROFILES)}"
            ) from None

    @classmethod
    def from_env(cls, **overrides) -> "ToleranceConfig":
        """Preset from ``MONOMEQ_TOL_PROFILE`` with non-None ``overrides`` applied."""
        name = os.environ.get("MONOMEQ_TOL_PROFILE") or "default"
        if name not in PROFILES:
            raise ValueError(
                "MONOMEQ_TOL_PROFILE must be one of " + ", ".join(sorted(PROFILES))
            )
        params = dict(PROFILES[name])
        params.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**params)


PROFILES = {
    "strict": dict(commute_tol=1e-12, cluster_tol=1e-10, zero_tol=1e-14),
    "default": dict(commute_tol=1e-10, cluster_tol=1e-8, zero_tol=1e-12),
    "loose": dict(commute_tol=1e-8, cluster_tol=1e-6, zero_tol=1e-10),
}

DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class HermitianEigen:
    values: np.ndarray
    vectors: np.ndarray
    clusters: tuple

    def cluster_values(self) -> np.ndarray:
        """Mean eigenvalue of every cluster, in cluster order."""
        return np.array([self.values[list(c)].mean() for c in self.clusters])


@dataclass(frozen=True)
class PolarDecomposition:
    P: np.ndarray
    U: np.ndarray
    singular_values: np.ndarray
    distinct: bool


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """Return ``data`` as a square, finite ``complex128`` array (a copy)."""
    try:
        arr = np.array(data, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise MatrixFormatError(f"{name}: not a numeric array ({exc})") from None
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise MatrixFormatError(f"{name}: expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MatrixFormatError(f"{name}: entries must be finite")
    return arr


def fro(A) -> float:
    A = np.asarray(A)
    return math.sqrt(abs(np.vdot(A, A)))


def scale_of(A) -> float:
    """``max(1, ||A||_F)``, the reference scale for relative tests."""
    return max(1.0, fro(A))


def dagger(A) -> np.ndarray:
    return np.conj(A).T


def commutator_norm(A, B) -> float:
    """Frobenius norm of ``AB - BA``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} are not equal square shapes")
    return fro(A @ B - B @ A)


def hermitian_defect(H) -> float:
    return fro(H - dagger(H))


def unitary_defect(U) -> float:
    return fro(dagger(U) @ U - np.eye(U.shape[0]))


def cluster_sorted(values, threshold: float) -> tuple:
    """Split descending ``values`` wherever consecutive gaps exceed ``threshold``."""
    clusters = []
    current = [0] if len(values) else []
    for i in range(1, len(values)):
        if values[i - 1] - values[i] <= threshold:
            current.append(i)
        else:
            clusters.append(tuple(current))
            current = [i]
    if current:
        clusters.append(tuple(current))
    return tuple(clusters)


def _rotations(app, aqq, apq):
    """Batched 2x2 Jacobi rotations.

    For each pair, ``G = [[c, s], [-s*conj(e), c*conj(e)]]`` makes
    ``G^H [[app, apq], [conj(apq), aqq]] G`` diagonal with diagonal
    ``(app - t|apq|, aqq + t|apq|)``. Pairs with ``apq == 0`` get ``G = I``.
    """
    r = np.abs(apq)
    live = r > 0
    safe_r = np.where(live, r, 1.0)
    e = np.where(live, apq / safe_r, 1.0)
    tau = (aqq - app) / (2.0 * safe_r)
    root = np.sqrt(1.0 + tau * tau)
    with np.errstate(divide="ignore"):
        t = np.where(tau >= 0, 1.0 / (tau + root), -1.0 / (root - tau))
    t = np.where(live, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c, e, t, r


def _round_robin(n: int):
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


_SCHEDULES: dict = {}


def _schedule(n: int):
    if n not in _SCHEDULES:
        _SCHEDULES[n] = _round_robin(n)
    return _SCHEDULES[n]


def _rotate_columns(M, p, q, c, s, e):
    ec = np.conj(e)
    Mp = M[:, p]
    Mq = M[:, q]
    M[:, p] = Mp * c - Mq * (s * ec)
    M[:, q] = Mp * s + Mq * (c * ec)


def _off_norm(A) -> float:
    return fro(A - np.diag(np.diag(A)))


def _jacobi_hermitian(H: np.ndarray):
    A = H.copy()
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    total = fro(A)
    if n == 1 or total == 0.0:
        return np.real(np.diag(A)).copy(), V
    target = _EPS * total
    rounds = _schedule(n)
    for _ in range(_MAX_SWEEPS):
        if _off_norm(A) <= target:
            return np.real(np.diag(A)).copy(), V
        for p, q in rounds:
            app = A[p, p].real
            aqq = A[q, q].real
            c, s, e, t, r = _rotations(app, aqq, A[p, q])
            _rotate_columns(A, p, q, c, s, e)
            # rows transform with G^H, i.e. the conjugate of the column update
            At = A.T
            _rotate_columns(At, p, q, c, s, np.conj(e))
            A[p, q] = 0.0
            A[q, p] = 0.0
            A[p, p] = app - t * r
            A[q, q] = aqq + t * r
            _rotate_columns(V, p, q, c, s, e)
    raise ConvergenceError(f"Jacobi eigensolver did not converge in {_MAX_SWEEPS} sweeps")


def _gram_schmidt(cols: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass, in column order."""
    Q = np.array(cols, dtype=np.complex128)
    for j in range(Q.shape[1]):
        v = Q[:, j]
        for _ in range(2):
            if j:
                v = v - Q[:, :j] @ (dagger(Q[:, :j]) @ v)
        Q[:, j] = v / np.linalg.norm(v)
    return Q


def fix_phases(V: np.ndarray) -> np.ndarray:
    """Rotate each column so its first entry of largest modulus is real positive."""
    V = V.copy()
    for j in range(V.shape[1]):
        mags = np.abs(V[:, j])
        top = mags.max()
        if top == 0:
            continue
        i = int(np.argmax(mags >= top * (1 - 1e-10)))
        V[:, j] *= np.conj(V[i, j]) / abs(V[i, j])
    return V


def hermitian_eig(H, tol: ToleranceConfig = DEFAULT_TOL, scale: float | None = None) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues are sorted descending and grouped into clusters whose
    consecutive gaps are at most ``cluster_tol * scale`` (``scale`` defaults
    to ``max(1, ||H||_F)``). Inside a cluster the eigenvectors are
    re-orthonormalized in index order; every column is phase fixed so the
    output is reproducible.
    """
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {H.shape}")
    defect = hermitian_defect(H)
    if defect > tol.commute_tol * scale_of(H):
        raise NotHermitian(f"||H - H*||_F = {defect:.3e} exceeds tolerance")
    H = 0.5 * (H + dagger(H))
    values, vectors = _jacobi_hermitian(H)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    if scale is None:
        scale = scale_of(H)
    clusters = cluster_sorted(values, tol.cluster_tol * scale)
    for c in clusters:
        if len(c) > 1:
            idx = list(c)
            vectors[:, idx] = _gram_schmidt(vectors[:, idx])
    return HermitianEigen(values=values, vectors=fix_phases(vectors), clusters=clusters)


def _jacobi_svd(A: np.ndarray):
    """One-sided (Hestenes) Jacobi: returns ``B, X`` with ``A X = B``, columns of B orthogonal."""
    B = A.copy()
    n = B.shape[1]
    X = np.eye(n, dtype=np.complex128)
    rounds = _schedule(n)
    for _ in range(_MAX_SWEEPS):
        rotated = False
        for p, q in rounds:
            if p.size == 0:
                continue
            alpha = np.sum(np.abs(B[:, p]) ** 2, axis=0)
            beta = np.sum(np.abs(B[:, q]) ** 2, axis=0)
            gamma = np.sum(np.conj(B[:, p]) * B[:, q], axis=0)
            small = np.abs(gamma) <= _EPS * np.sqrt(alpha * beta)
            if np.all(small):
                continue
            rotated = True
            gamma = np.where(small, 0.0, gamma)
            c, s, e, _, _ = _rotations(alpha, beta, gamma)
            _rotate_columns(B, p, q, c, s, e)
            _rotate_columns(X, p, q, c, s, e)
        if not rotated:
            return B, X
    raise ConvergenceError(f"Jacobi SVD did not converge in {_MAX_SWEEPS} sweeps")


def svd(A, tol: ToleranceConfig = DEFAULT_TOL):
    """``A = W diag(sigma) X^*`` with ``sigma`` descending and ``W, X`` unitary."""
    A = np.asarray(A, dtype=np.complex128)
    n = A.shape[0]
    B, X = _jacobi_svd(A)
    sigma = np.linalg.norm(B, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    B = B[:, order]
    X = X[:, order]
    cutoff = max(n * _EPS * (sigma[0] if n else 0.0), 1e-300)
    W = np.zeros_like(B)
    basis = np.eye(n, dtype=np.complex128)
    for j in range(n):
        if sigma[j] > cutoff:
            v = B[:, j] / sigma[j]
            for _ in range(2):
                v = v - W[:, :j] @ (dagger(W[:, :j]) @ v)
            W[:, j] = v / np.linalg.norm(v)
        else:
            # complete with the standard basis vector least covered so far
            resid = basis - W[:, :j] @ (dagger(W[:, :j]) @ basis)
            k = int(np.argmax(np.linalg.norm(resid, axis=0)))
            v = resid[:, k]
            for _ in range(2):
                v = v - W[:, :j] @ (dagger(W[:, :j]) @ v)
            W[:, j] = v / np.linalg.norm(v)
    return W, sigma, X


def polar_left(A, tol: ToleranceConfig = DEFAULT_TOL) -> PolarDecomposition:
    """Canonical left polar decomposition ``A = P U`` from the SVD.

    ``P = W S W^*`` and ``U = W X^*``. For singular ``A`` the unitary factor is
    not unique; this one pairs the kernel directions as the SVD completes them.
    """
    A = as_matrix(A, "A")
    W, sigma, X = svd(A, tol)
    P = (W * sigma) @ dagger(W)
    P = 0.5 * (P + dagger(P))
    U = W @ dagger(X)
    clusters = cluster_sorted(sigma, tol.cluster_tol * scale_of(A))
    return PolarDecomposition(P=P, U=U, singular_values=sigma, distinct=len(clusters) == len(sigma))


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with phase-fixed R."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))
