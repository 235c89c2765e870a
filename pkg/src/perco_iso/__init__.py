"""Isoperimetric constants, contours and supercritical bond percolation on infinite graphs."""

__version__ = "0.1.0"

from .errors import (BudgetExceeded, DomainError, InsufficientData, OracleError, PaddingError,
                     ParseError, PercoIsoError, UnsupportedError)
from .families import make_family
from .graph import GraphOracle, Window, ball, parse_window

__all__ = [
    "BudgetExceeded", "DomainError", "GraphOracle", "InsufficientData", "OracleError",
    "PaddingError", "ParseError", "PercoIsoError", "UnsupportedError", "Window", "ball",
    "make_family", "parse_window", "__version__",
]
