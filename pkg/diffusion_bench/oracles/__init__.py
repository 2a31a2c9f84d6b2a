"""
Score oracles of the forward OU marginals `p_t`: exact for Gaussian
targets, Monte-Carlo for general ones, and a corruption wrapper modeling
estimation error.
"""

from pyrollup import rollup

from . import corruption, diagnostics, gaussian, monte_carlo, oracle
from .corruption import *  # noqa
from .diagnostics import *  # noqa
from .gaussian import *  # noqa
from .monte_carlo import *  # noqa
from .oracle import *  # noqa

__all__ = rollup(
    oracle,
    gaussian,
    monte_carlo,
    corruption,
    diagnostics,
)

__canonical_syms__ = [
    "ScoreOracle",
]

__canonical_children__ = [
    "oracle",
    "gaussian",
    "monte_carlo",
    "corruption",
    "diagnostics",
]
