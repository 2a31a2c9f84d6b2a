"""
Numerical foundations shared by every module: the time grid, seeded random
streams, φ-functions and symmetric matrix functions, and the exception
hierarchy.
"""

from pyrollup import rollup

from . import exceptions, grid, numerics, rng
from .exceptions import *  # noqa
from .grid import *  # noqa
from .numerics import *  # noqa
from .rng import *  # noqa

__all__ = rollup(
    grid,
    rng,
    numerics,
    exceptions,
)

__canonical_syms__ = [
    "TimeGrid",
    "SeedSpec",
]

__canonical_children__ = [
    "grid",
    "rng",
    "numerics",
    "exceptions",
]
