"""Exception hierarchy shared by every compop module."""


class CompopError(Exception):
    """Base class for all errors raised by this package."""


class MapSyntaxError(CompopError, ValueError):
    """A map-spec string does not follow the grammar."""

    def __init__(self, message, position=None, expected=None):
        self.position = position
        self.expected = expected
        detail = message
        if position is not None:
            detail = f"{message} at position {position}"
        if expected:
            detail = f"{detail} (expected {expected})"
        super().__init__(detail)


class DomainError(CompopError, ValueError):
    """A map parameter lies outside its admissible range."""


class NotSelfMap(CompopError, ValueError):
    """Sampled modulus exceeds one, so the map does not send the disk into itself."""

    def __init__(self, message, witness=None, modulus=None):
        self.witness = witness
        self.modulus = modulus
        super().__init__(message)


class SingularBoundaryPoint(CompopError, ArithmeticError):
    """Boundary evaluation hit an essential singularity on the circle."""


class PrecisionLoss(CompopError, ArithmeticError):
    pass


class RegionOutsideDomain(CompopError, ValueError):
    pass


class BoundaryRootSuspected(CompopError, ArithmeticError):
    """Argument-principle integral did not settle near an integer."""


class NonconvergentRoot(CompopError, ArithmeticError):
    pass


class CertificationMismatch(CompopError, ArithmeticError):
    """Polished root count disagrees with the winding number."""


class InfiniteValue(CompopError, ArithmeticError):
    """The counting function is infinite at this point (w equals psi(0))."""


class NoConvergence(CompopError, ArithmeticError):
    pass


class NoConvergenceWarning(RuntimeWarning):
    """Quadrature reached its node cap; the last estimate was returned."""


class TruncationTooLoose(CompopError, ArithmeticError):
    def __init__(self, message, bound=None, value=None):
        self.bound = bound
        self.value = value
        super().__init__(message)


class ResolutionExceeded(CompopError, ValueError):
    """Window size is below what the atom spacing can resolve."""
