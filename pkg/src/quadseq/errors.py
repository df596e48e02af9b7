"""Exception types shared across the package."""


class QuadseqError(Exception):
    """Base class for all package-specific errors."""


class BasisMismatch(QuadseqError):
    """Two values living over different real bases were combined."""


class IndeterminateComparison(QuadseqError):
    """Sign refinement hit its precision cap without separating from zero.

    This is the expected outcome when the basis generators are rationally
    dependent (e.g. a basis containing both 1 and sqrt(4)): some nonzero
    coefficient vectors then denote the real number 0, which no finite
    amount of interval refinement can certify.
    """

    def __init__(self, message: str, bits: int = 0):
        super().__init__(message)
        self.bits = bits


class EmptyGeneratorSet(QuadseqError):
    """A monomial ideal or form was given no generators."""


class NonPositiveValue(QuadseqError):
    """A frame value that must be strictly positive was not."""


class AmbiguousDirection(QuadseqError):
    """The minimum frame value is attained by more than one direction."""


class DirectionNotMinimal(QuadseqError):
    """A scripted step names a direction whose value is not minimal."""


class IndexOutOfRange(QuadseqError, IndexError):
    """A step or direction index lies outside the valid range."""


class KilledDirectionUsed(QuadseqError):
    """A quotient replay encountered a step in the removed direction."""


class IncompleteCoverage(QuadseqError):
    """A direction word was required to use every direction but did not."""


class RatioUndefined(QuadseqError):
    """An order ratio could not be formed (denominator order is zero)."""


class NotTerminated(QuadseqError):
    """An iterative search exceeded its step budget."""

    def __init__(self, message: str, steps: int = 0):
        super().__init__(message)
        self.steps = steps


class ConfigError(QuadseqError):
    """A scenario configuration is malformed or inconsistent."""


class UnknownCheck(QuadseqError, KeyError):
    """A check id is not in the registry."""
