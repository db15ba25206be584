"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class Sym2ChabError(Exception):
    """Base class for every error raised by this package."""


class PrecisionExhausted(Sym2ChabError, ArithmeticError):
    """A result would need more 2-adic digits than the inputs justify."""


class DivisionByZeroToPrecision(PrecisionExhausted, ZeroDivisionError):
    """The divisor cannot be distinguished from zero at its precision."""


class Indistinguishable(PrecisionExhausted):
    """Two elements agree on every known digit, so equality is unproven."""


class ZeroVector(Sym2ChabError, ValueError):
    pass


class GenusTooSmall(Sym2ChabError, ValueError):
    pass


class NotGood(Sym2ChabError, ValueError):
    """The curve does not satisfy the goodness predicate."""


class NotInFamily(Sym2ChabError, ValueError):
    pass


class NonConvergence(Sym2ChabError, ArithmeticError):
    pass


class SingularComparison(Sym2ChabError, ArithmeticError):
    pass


class CertificateFailure(Sym2ChabError):
    """Raised when a residue-disk bound cannot be certified.

    ``term`` holds the first offending term bound (or ``None`` when the
    failure is in the tail lemma or the witnesses).
    """

    def __init__(self, message: str, term=None):
        super().__init__(message)
        self.term = term


class RankTooLarge(Sym2ChabError, ValueError):
    pass


class DimensionMismatch(Sym2ChabError, ValueError):
    pass


class SeedMissing(Sym2ChabError, ValueError):
    pass


class InputFormatError(Sym2ChabError, ValueError):
    """Malformed curve, Selmer, or image file content."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
