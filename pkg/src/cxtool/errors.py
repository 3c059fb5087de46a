"""Exception hierarchy shared by every module."""


class ComplexError(ValueError):
    """Base class for malformed input and failed preconditions."""


class UnknownIdentifier(ComplexError):
    pass


class DuplicateIdentifier(ComplexError):
    pass


class CornerMismatch(ComplexError):
    def __init__(self, square, corner):
        super().__init__(f"square {square!r}: side {corner} does not end where side {(corner + 1) % 4} starts")
        self.square = square
        self.corner = corner


class IdentityViolation(ComplexError):
    def __init__(self, simplex, i, j):
        super().__init__(f"simplex {simplex!r}: facet_{i}(facet_{j}) != facet_{j - 1}(facet_{i})")
        self.simplex = simplex
        self.i = i
        self.j = j


class MissingFacet(ComplexError):
    pass


class DimensionGap(ComplexError):
    pass


class InvalidSlot(ComplexError):
    pass


class FormatSyntaxError(ComplexError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class PartitionMismatch(ComplexError):
    pass


class NotLocallyInjective(ComplexError):
    pass


class NotVhPreserving(ComplexError):
    pass


class NotSimplexified(ComplexError):
    pass


class NotConnected(ComplexError):
    pass


class InvalidLabeling(ComplexError):
    def __init__(self, square, message=None):
        super().__init__(message or f"boundary permutation of square {square!r} is not the identity")
        self.square = square


class UnknownName(ComplexError):
    pass


class CliqueBudgetExceeded(RuntimeError):
    """Raised when clique enumeration hits its cap; the input is too big to check."""


class EnumerationTooLarge(RuntimeError):
    pass
