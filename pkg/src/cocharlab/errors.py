"""Exception hierarchy shared by all cocharlab modules."""


class CocharLabError(Exception):
    """Base class for all library errors."""


class ParseError(CocharLabError, ValueError):
    """Malformed literal (element, polynomial, descriptor, word)."""


class DomainError(CocharLabError, ArithmeticError):
    """Operation undefined in the given field (division by zero, wrong characteristic)."""


class NotIrreducibleError(CocharLabError, ValueError):
    """Minimal polynomial of an extension is reducible over its base."""


class ZeroPolynomialError(CocharLabError, ValueError):
    """Operation requires a nonzero polynomial."""


class UnsupportedFieldError(CocharLabError, NotImplementedError):
    """No factorization backend available for this field descriptor."""


class DegreeTooLargeError(CocharLabError, ValueError):
    """Input exceeds the configured desk-scale degree or search budget."""


class NotLinearizableError(CocharLabError, TypeError):
    """Action model exposes no linear structure."""


class DimensionMismatchError(CocharLabError, ValueError):
    """Matrix/vector/cocharacter dimensions are incompatible."""


class NonSquareError(CocharLabError, ValueError):
    """Square matrix required."""


class PreconditionFailedError(CocharLabError, ValueError):
    """A stated precondition of the operation does not hold."""


class EnumerationBudgetExceededError(CocharLabError, ValueError):
    """Requested enumeration exceeds the configured budget."""


class NonUniqueMinimalError(CocharLabError, RuntimeError):
    """More than one cocharacter-closed orbit in a closure; indicates an internal bug."""


class NotRuConjugateError(CocharLabError, ValueError):
    """No unipotent block-triangular conjugator exists."""


class BasisMismatchError(CocharLabError, ValueError):
    """Supplied field basis does not match the extension."""


class InvalidConventionError(CocharLabError, ValueError):
    """Malformed structure-constant sign convention."""


class NonClosedSupportError(CocharLabError, ValueError):
    """Word letters are not supported on a closed set of positive roots."""


class ReplayMismatchError(CocharLabError, RuntimeError):
    """A replayed computation does not reproduce its stated result."""
