"""heatgauge: numerical checks of L^p contraction properties of heat
kernel measures on model geometries (Euclidean space, hyperbolic 3-space,
the first Heisenberg group)."""

__version__ = "0.1.0"

from .errors import (
    HeatgaugeError,
    InvalidInputError,
    NumericsError,
    UnsupportedOracleError,
    UnsupportedReductionError,
    ClassificationError,
    ConfigError,
    CacheFormatError,
)
from .reports import InequalityReport, PASS, PASS_EXACT, FAIL, INCONCLUSIVE

__all__ = [
    "HeatgaugeError", "InvalidInputError", "NumericsError",
    "UnsupportedOracleError", "UnsupportedReductionError",
    "ClassificationError", "ConfigError", "CacheFormatError",
    "InequalityReport", "PASS", "PASS_EXACT", "FAIL", "INCONCLUSIVE",
    "__version__",
]
