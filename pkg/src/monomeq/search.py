"""Randomized evidence gathering: are matrices with all powers half-normal monomializable?

Each trial draws either a *candidate* (an invertible half-normal matrix with
repeated singular values, often not monomializable) or a *control* (a
conjugated weighted permutation, always monomializable), checks
half-normality of ``A^k`` for ``k = 1..max_power`` and runs the decision
procedure. A record is a ``CandidateCounterexample`` only if every power is
half-normal and yet the verdict is ``NotEquivalent``. Nothing here settles
the question; it only collects evidence.
"""
from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .fixtures import random_half_normal_pair, random_monomial_instance
from .halfnormal import is_half_normal
from .linalg_kernel import DEFAULT_TOL, ToleranceConfig
from .matrix_io import matrix_to_obj
from .monomial import Verdict, decide_unitary_equiv

CONSISTENT = "ConsistentWithConjecture"
COUNTEREXAMPLE = "CandidateCounterexample"
MODES = ("mixed", "controls", "candidates")


@dataclass(frozen=True)
class SearchRecord:
    trial: int
    seed: int
    kind: str
    dimension: int
    A: np.ndarray
    max_power_checked: int
    power_norms: list
    powers_half_normal: bool
    verdict: str
    invertible: bool
    classification: str

    def to_json(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "kind": self.kind,
            "dimension": self.dimension,
            "A": matrix_to_obj(self.A),
            "max_power_checked": self.max_power_checked,
            "power_norms": [float(x) for x in self.power_norms],
            "powers_half_normal": self.powers_half_normal,
            "verdict": self.verdict,
            "invertible": self.invertible,
            "classification": self.classification,
        }


def trial_kind(index: int, mode: str) -> str:
    if mode == "controls":
        return "control"
    if mode == "candidates":
        return "candidate"
    return "control" if index % 2 else "candidate"


def _draw(kind, n, rng, tol):
    if kind == "control":
        return random_monomial_instance(n, rng, invertible=True).A
    for _ in range(16):
        P, U = random_half_normal_pair(n, rng)
        A = P @ U
        if is_half_normal(A, tol)[0]:
            return A
    raise RuntimeError("candidate generator failed to produce a half-normal matrix")


def run_trial(index: int, n: int, max_power: int, seed: int, mode: str = "mixed",
              tol: ToleranceConfig = DEFAULT_TOL, kernel_retries: int = 32) -> SearchRecord:
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    kind = trial_kind(index, mode)
    A = _draw(kind, n, rng, tol)
    norms = []
    passes = []
    Ak = A
    for _ in range(max_power):
        ok, norm = is_half_normal(Ak, tol)
        passes.append(ok)
        norms.append(norm)
        Ak = Ak @ A
    report = decide_unitary_equiv(A, tol, kernel_retries=kernel_retries, seed=seed)
    all_powers = all(passes)
    flagged = all_powers and report.invertible and report.verdict is Verdict.NOT_EQUIVALENT
    return SearchRecord(
        trial=index,
        seed=seed,
        kind=kind,
        dimension=n,
        A=A,
        max_power_checked=max_power,
        power_norms=norms,
        powers_half_normal=all_powers,
        verdict=report.verdict.value,
        invertible=report.invertible,
        classification=COUNTEREXAMPLE if flagged else CONSISTENT,
    )


def run_search(n: int, trials: int, max_power: int, seed: int, mode: str = "mixed",
               tol: ToleranceConfig = DEFAULT_TOL, kernel_retries: int = 32, jobs: int = 1):
    """Yield one :class:`SearchRecord` per trial, in trial order, for any ``jobs``."""
    if n < 2 or trials < 1 or max_power < 2:
        raise ValueError("need n >= 2, trials >= 1 and max_power >= 2")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    work = functools.partial(
        run_trial, n=n, max_power=max_power, seed=seed, mode=mode, tol=tol,
        kernel_retries=kernel_retries,
    )
    if jobs <= 1:
        for index in range(trials):
            yield work(index)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order, so the stream is independent of jobs
        yield from pool.map(work, range(trials), chunksize=64)
