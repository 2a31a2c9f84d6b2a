"""
Wasserstein-2 estimators, convergence-order fitting and the theoretical
error bounds of each scheme.
"""

from pyrollup import rollup

from . import bounds, order, regularity, wasserstein
from .bounds import *  # noqa
from .order import *  # noqa
from .regularity import *  # noqa
from .wasserstein import *  # noqa

__all__ = rollup(
    wasserstein,
    order,
    regularity,
    bounds,
)

__canonical_children__ = [
    "wasserstein",
    "order",
    "regularity",
    "bounds",
]
