"""Weighted permutations ``M = D Perm(pi)`` and their detection.

Permutations are 0-based integer tuples with ``Perm(pi) e_j = e_{pi[j]}``, so
column ``j`` of ``M`` carries its single entry in row ``pi[j]`` and that entry
equals ``weights[pi[j]]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg_kernel import DEFAULT_TOL, ToleranceConfig, fro


@dataclass(frozen=True)
class MonomialForm:
    weights: np.ndarray
    perm: tuple

    @property
    def n(self) -> int:
        return len(self.perm)

    def perm_matrix(self) -> np.ndarray:
        return perm_matrix(self.perm)

    def matrix(self) -> np.ndarray:
        return self.weights[:, None] * perm_matrix(self.perm)


def perm_matrix(perm) -> np.ndarray:
    n = len(perm)
    M = np.zeros((n, n), dtype=np.complex128)
    M[list(perm), list(range(n))] = 1.0
    return M


def cycles(perm) -> list:
    """Disjoint cycles of ``perm``, each starting at its smallest element."""
    seen = set()
    out = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        j = perm[start]
        while j != start:
            cycle.append(j)
            seen.add(j)
            j = perm[j]
        out.append(tuple(cycle))
    return out


def is_permutation(perm) -> bool:
    return sorted(perm) == list(range(len(perm)))


def detect_monomial(M, tol: ToleranceConfig = DEFAULT_TOL) -> MonomialForm | None:
    """Decompose ``M`` as ``D Perm(pi)`` or return ``None``.

    Entries below ``zero_tol`` times their column norm are treated as zero.
    Zero rows and columns are paired in ascending order, giving zero weights.
    """
    M = np.asarray(M, dtype=np.complex128)
    n = M.shape[0]
    col_norms = np.linalg.norm(M, axis=0)
    mask = np.abs(M) > tol.zero_tol * col_norms[None, :]
    mask &= np.abs(M) > 0
    if np.any(mask.sum(axis=0) > 1) or np.any(mask.sum(axis=1) > 1):
        return None
    perm = [-1] * n
    weights = np.zeros(n, dtype=np.complex128)
    for i, j in zip(*np.nonzero(mask)):
        perm[j] = int(i)
        weights[i] = M[i, j]
    free_rows = iter(sorted(set(range(n)) - set(perm)))
    for j in range(n):
        if perm[j] < 0:
            perm[j] = next(free_rows)
    return MonomialForm(weights=weights, perm=tuple(perm))


def nearest_monomial(M):
    """Best-matching weighted permutation and the Frobenius residual to it.

    The permutation maximizes the total modulus of the kept entries; the
    weights are those entries themselves.
    """
    M = np.asarray(M, dtype=np.complex128)
    rows, cols = linear_sum_assignment(-np.abs(M))
    perm = [0] * M.shape[0]
    weights = np.zeros(M.shape[0], dtype=np.complex128)
    for i, j in zip(rows, cols):
        perm[j] = int(i)
        weights[i] = M[i, j]
    form = MonomialForm(weights=weights, perm=tuple(perm))
    return form, fro(M - form.matrix())
