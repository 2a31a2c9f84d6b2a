"""
Target distributions `p₀`: analytic Gaussians and the penalized
logistic-regression posterior, with reference sampling.
"""

from pyrollup import rollup

from . import gaussian, logistic, mala, target
from .gaussian import *  # noqa
from .logistic import *  # noqa
from .mala import *  # noqa
from .target import *  # noqa

__all__ = rollup(
    target,
    gaussian,
    logistic,
    mala,
)

__canonical_children__ = [
    "target",
    "gaussian",
    "logistic",
    "mala",
]
