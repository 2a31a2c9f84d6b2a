"""
diffusion-bench: discretization schemes for score-based diffusion
samplers, with score oracles, Wasserstein metrics, convergence bounds and
a benchmark harness.
"""

from pyrollup import rollup

from . import core, metrics, oracles, samplers, targets, tools
from .core import *  # noqa
from .metrics import *  # noqa
from .oracles import *  # noqa
from .samplers import *  # noqa
from .targets import *  # noqa
from .tools import *  # noqa

__all__ = rollup(core, targets, oracles, samplers, metrics, tools)

__canonical_children__ = [
    "core",
    "targets",
    "oracles",
    "samplers",
    "metrics",
    "tools",
]
