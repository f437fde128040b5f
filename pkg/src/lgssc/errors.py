"""Exception types raised across the package."""


class LgsscError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(LgsscError):
    """Gallery geometry (height * width) does not match the data dimension."""


class NonFinite(LgsscError):
    """A matrix contains NaN or infinite entries."""


class TooFewSamples(LgsscError):
    """Fewer than two samples were provided."""


class ZeroColumn(LgsscError):
    """A column has (numerically) zero norm and cannot be normalized."""


class LengthMismatch(LgsscError):
    """Two sequences that must have equal length do not."""


class DegenerateGram(LgsscError):
    """All off-diagonal inner products vanish; the data-term weight is undefined."""


class SolveFailure(LgsscError):
    """The positive-definite linear system could not be solved accurately."""


class EigFailure(LgsscError):
    """The symmetric eigendecomposition failed to converge."""


class PatchTooSmall(LgsscError):
    """A leaf patch would have a spatial dimension smaller than 2 pixels."""


class GeometryMismatch(LgsscError):
    """A patch node or file geometry is inconsistent with the gallery."""


class ParseError(LgsscError):
    """A dataset file could not be parsed; the message carries the position."""


class NotConvergedWarning(RuntimeWarning):
    """ADMM hit the iteration cap with a residual well above tolerance."""
