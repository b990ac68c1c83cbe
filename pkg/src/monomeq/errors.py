"""Exception hierarchy shared by all modules."""


class MonomeqError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(MonomeqError, ValueError):
    pass


class NotHermitian(MonomeqError, ValueError):
    pass


class NotUnitary(MonomeqError, ValueError):
    pass


class NotCommuting(MonomeqError, ValueError):
    """Two generators fail to commute; ``pair`` and ``norm`` locate the failure."""

    def __init__(self, pair, norm):
        self.pair = tuple(pair)
        self.norm = float(norm)
        super().__init__(
            f"generators {self.pair[0]} and {self.pair[1]} do not commute "
            f"(commutator norm {self.norm:.3e})"
        )


class InvariantViolation(MonomeqError):
    """The algebra is not (numerically) invariant under conjugation by U."""


class AmbiguousMatch(MonomeqError):
    pass


class PreconditionViolation(MonomeqError, ValueError):
    pass


class IllConditioned(MonomeqError):
    pass


class ConvergenceError(MonomeqError, ArithmeticError):
    pass


class MatrixFormatError(MonomeqError, ValueError):
    """Malformed matrix file or array (non-square, non-finite, bad JSON)."""
