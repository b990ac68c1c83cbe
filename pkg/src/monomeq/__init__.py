"""Unitary equivalence to weighted permutations, and U-invariant masas."""

__version__ = "0.1.0"

from .errors import (
    AmbiguousMatch,
    IllConditioned,
    InvariantViolation,
    MatrixFormatError,
    MonomeqError,
    NotCommuting,
    NotHermitian,
    NotUnitary,
    PreconditionViolation,
)
from .halfnormal import (
    bounded_commutant_check,
    conjugate_family,
    extended_commutant_check,
    is_half_normal,
)
from .invariant_masa import (
    MasaBasis,
    build_invariant_masa,
    conjugation_orbits,
    joint_eigenspaces,
    verify_masa,
)
from .linalg_kernel import (
    ToleranceConfig,
    commutator_norm,
    hermitian_eig,
    polar_left,
    random_unitary,
)
from .monomial import (
    DecisionReport,
    Verdict,
    decide_unitary_equiv,
    perturb_to_distinct,
    similar_to_weighted_permutation,
    witness_from_distinct,
)
from .weighted_perm import MonomialForm, detect_monomial
