"""Exception types raised by wavedim.

Every error signalling degenerate or out-of-contract input derives from
:class:`WaveDimError`, itself a :class:`ValueError`, so callers can catch the
whole family at once. The CLI maps these to exit status 2.
"""


class WaveDimError(ValueError):
    """Base class for all data/contract errors."""


class FlatSignal(WaveDimError):
    """Ordinate has zero range; the dimension is undefined."""


class ZeroAbscissa(WaveDimError):
    """Largest abscissa is zero, so it cannot be used as a scale."""


class NegativeAbscissa(WaveDimError):
    """Abscissa starts below zero; normalization divides by x_max only."""


class TooShort(WaveDimError):
    """Not enough samples for the requested operation."""


# Same condition, named after the series-oriented operations that raise it.
SeriesTooShort = TooShort


class DegenerateFit(WaveDimError):
    """All regressor values are equal; the slope is undefined."""


class ZeroLength(WaveDimError):
    """All points coincide, so the curve has no length."""


class NonPositiveLength(WaveDimError):
    """A mean curve length is zero and cannot be log-transformed."""


class ZeroVariance(WaveDimError):
    """Every segment of the series is constant."""


class MissingVariance(WaveDimError):
    """An estimate carries no (positive) variance."""


class StageTooLarge(WaveDimError):
    """Requested Koch stage exceeds the supported range."""


class NumericalBlowup(WaveDimError):
    """An integrated trajectory left the bounded region (bad step size?)."""


class WindowTooLarge(WaveDimError):
    """Sliding window is longer than the series."""


class LengthMismatch(WaveDimError):
    """Two profiles that must align have different shapes."""


class DataFileError(WaveDimError):
    """A series file could not be parsed."""


class ZeroPowerWarning(RuntimeWarning):
    """A spectral bin used in a fit had zero power and was floored."""
