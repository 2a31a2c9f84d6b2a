"""
Discretization schemes of the backward SDE, the batch chain runner and the
exact law propagator for Gaussian targets.
"""

from pyrollup import rollup

from . import kernels, pushforward, runner, types
from .kernels import *  # noqa
from .pushforward import *  # noqa
from .runner import *  # noqa
from .types import *  # noqa

__all__ = rollup(
    types,
    kernels,
    runner,
    pushforward,
)

__canonical_syms__ = [
    "SchemeKind",
    "run_batch",
]

__canonical_children__ = [
    "types",
    "kernels",
    "runner",
    "pushforward",
]
