"""Exception types shared across heatgauge modules."""


class HeatgaugeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(HeatgaugeError, ValueError):
    """Malformed input: wrong shapes, negative weights, p < 1, bad points."""


class NumericsError(HeatgaugeError, ArithmeticError):
    """A numerical routine failed: NaN propagation, quadrature that did not
    converge, or a root finder that stopped with a large residual.

    Attributes
    ----------
    detail : dict
        Diagnostic payload (residual, step index, claim id, ...), whatever
        the failing routine could say about itself.
    """

    def __init__(self, message, **detail):
        super().__init__(message)
        self.detail = detail


class UnsupportedOracleError(HeatgaugeError):
    """An exact oracle (closed-form heat kernel, exact sampler) was requested
    for a geometry that does not have one."""


class UnsupportedReductionError(HeatgaugeError):
    """Quadrature was requested for a function with no declared radial or
    coordinate reduction."""


class ClassificationError(HeatgaugeError):
    """A test function failed its harmonic/subharmonic certification."""


class ConfigError(HeatgaugeError):
    """A run configuration could not be parsed or validated.

    Attributes
    ----------
    field : str or None
        Name of the offending config field, when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class CacheFormatError(HeatgaugeError):
    """An endpoint cache file has a bad magic number, version or payload."""
