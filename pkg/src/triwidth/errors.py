"""Exception types shared across the package.

Division by zero raises the builtin ZeroDivisionError.
"""


class TriwidthError(Exception):
    """Base class for all package-specific errors."""


# field construction and arithmetic

class NonPrimeError(TriwidthError):
    """The characteristic supplied for a finite field is not prime."""


class ReducibleModulusError(TriwidthError):
    """The extension modulus factors over the prime field."""


class FieldMismatchError(TriwidthError):
    """Operands belong to different field specs."""


class NotFiniteError(TriwidthError):
    """Operation requires a finite field."""


class ZeroElementError(TriwidthError):
    """Operation requires a nonzero element."""


class NotAnSthPowerError(TriwidthError):
    """No s-th root exists for the given element."""


# matrices

class NotTriangularError(TriwidthError):
    """Strictly lower entries are nonzero."""


class SingularDiagonalError(TriwidthError):
    """A diagonal entry is zero."""


class SizeMismatchError(TriwidthError):
    """Matrix sizes are incompatible."""


class BadIndexError(TriwidthError):
    """Index pair out of range or not strictly upper."""


class BadSizeError(TriwidthError):
    """Block or corner size out of range."""


class GuardExceededError(TriwidthError):
    """Requested enumeration or closure exceeds the configured guard."""


# words and descriptors

class WordSyntaxError(TriwidthError):
    """Word text does not match the grammar."""


class PowerWordInputError(TriwidthError):
    """Operation defined only for outer commutator words."""


class MissingAssignmentError(TriwidthError):
    """A variable of the word has no assigned matrix."""


class InvalidWordError(TriwidthError):
    """Word fails validation (repeated variables, nested power word)."""


class ContextMismatchError(TriwidthError):
    """Matrix does not match the descriptor's field or size."""


# decomposition engines

class NotInVerbalError(TriwidthError):
    """Target matrix is outside the verbal subgroup."""


class NotCoprimeExponentError(TriwidthError):
    """Exponent shares a factor with the characteristic."""


class SearchExhaustedError(TriwidthError):
    """Bounded search ended without a witness."""

    def __init__(self, message: str, tried: int = 0):
        super().__init__(message)
        self.tried = tried


class NoRootError(TriwidthError):
    """No root of the requested shape exists."""


class NotLevelError(TriwidthError):
    """Matrix is not in the required level subgroup."""


class FieldTooSmallError(TriwidthError):
    """Construction needs at least three field elements."""
