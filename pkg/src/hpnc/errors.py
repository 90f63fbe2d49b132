"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` (malformed input,
CLI exit code 2) and :class:`NumericalPreconditionError` (the input is well
formed but the requested computation would be inaccurate or undefined,
CLI exit code 3).
"""


class HPNCError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(HPNCError, ValueError):
    pass


class NumericalPreconditionError(HPNCError, ArithmeticError):
    pass


class InvalidSpec(ValidationError):
    """A state specification is malformed or describes no state."""


class DimensionError(ValidationError):
    """A moment order or index does not fit the truncated space."""


class GeometryError(ValidationError):
    """Spin directions are not unit length or not mutually orthogonal."""


class TruncationError(NumericalPreconditionError):
    """Too much probability sits near the Fock cutoff."""


class SupportError(NumericalPreconditionError):
    """A single-mode state has amplitude above the Dicke ladder top."""


class BlockOverflow(NumericalPreconditionError):
    """A populated total-number block does not fit both output modes."""


class DegenerateBS(NumericalPreconditionError):
    """The beam splitter is too close to fully transmitting or reflecting."""


class DegenerateDenominator(NumericalPreconditionError):
    """The spin-squeezing denominator vanishes."""


class DegenerateMeanSpin(NumericalPreconditionError):
    """The mean spin vector is too short to define a frame."""
