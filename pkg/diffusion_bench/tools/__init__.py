"""
Experiment harness of the `diffusion-bench` CLI: configuration, experiment
drivers, output files and self-test.
"""

from pyrollup import rollup

from . import config, experiments, outputs, results, selftest
from .config import *  # noqa
from .experiments import *  # noqa
from .outputs import *  # noqa
from .results import *  # noqa
from .selftest import *  # noqa

__all__ = rollup(
    config,
    results,
    experiments,
    outputs,
    selftest,
)

__canonical_children__ = [
    "config",
    "results",
    "experiments",
    "outputs",
    "selftest",
]
