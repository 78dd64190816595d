"""Computational toolkit for periods of the thrice-punctured line and
limit mixed Hodge structures: truncated noncommutative series, multiple
zeta values, Chen-series transport and the Drinfeld associator, exact
weight filtrations, regular-singular ODE regularization, Hodge structure
validators, and integer-relation experiments."""

__version__ = "0.1.0"

from .words import CompositionIndex, parse_index  # noqa: F401
from .mzv import zeta  # noqa: F401
from .freealg import TruncatedSeries  # noqa: F401
