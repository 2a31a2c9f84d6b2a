"""
Batch runner: many independent chains of one scheme through a time grid.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.exceptions import BatchError, CapabilityError
from ..core.grid import TimeGrid
from ..core.rng import SeedSpec, TrajectoryStreams
from ..oracles.oracle import OracleKey, OracleOutput, ScoreOracle, SecondOrderTerms
from .kernels import STEP_KERNELS, init_from_hat_pT
from .types import ChainResult, SchemeKind

__all__ = [
    "BLOCK_SIZE",
    "THREADS_ENV",
    "run_batch",
    "resolve_threads",
]

BLOCK_SIZE = 1000
"""
Trajectories advanced together as one vectorized block. Trajectory `j`
draws from sub-stream `j` of the run's seed whatever block it lands in, so
results depend neither on the block size nor on how blocks are scheduled.
Oracle call keys still name the block.
"""

THREADS_ENV = "DIFFBENCH_THREADS"
"""
Environment variable capping the number of worker threads; 0 or unset
means one per CPU.
"""


def resolve_threads(n_threads: int | None = None) -> int:
    """
    Return the number of worker threads: `n_threads` if given and positive,
    else the value of {obj}`THREADS_ENV`, else the CPU count.
    """
    if n_threads is None:
        n_threads = int(os.environ.get(THREADS_ENV, "0") or 0)

    if n_threads <= 0:
        n_threads = os.cpu_count() or 1

    return n_threads


class _BlockOracle(ScoreOracle):
    """
    Per-block view of an oracle which counts evaluated rows and flagged
    estimates.
    """

    def __init__(self, inner: ScoreOracle):
        self.inner = inner
        self.dim = inner.dim
        self.has_hessian = inner.has_hessian
        self.has_m_term = inner.has_m_term
        self.calls = 0
        self.flagged = 0

    def __repr__(self):
        return repr(self.inner)

    def _record(self, n_rows: int, flagged: NDArray | None):
        self.calls += n_rows
        if flagged is not None:
            self.flagged += int(np.count_nonzero(flagged))

    def evaluate(
        self,
        t: ArrayLike,
        x: NDArray,
        hessian: bool = False,
        key: OracleKey = (),
    ) -> OracleOutput:
        out = self.inner.evaluate(t, x, hessian=hessian, key=key)
        self._record(out.score.shape[0], out.flagged)
        return out

    def second_order(
        self, t: ArrayLike, x: NDArray, key: OracleKey = ()
    ) -> SecondOrderTerms:
        terms = self.inner.second_order(t, x, key=key)
        self._record(terms.score.shape[0], terms.flagged)
        return terms


def _run_block(
    scheme: SchemeKind,
    oracle: ScoreOracle,
    grid: TimeGrid,
    seed: SeedSpec,
    block: int,
    start: int,
    size: int,
) -> tuple[NDArray, int, int, list[str]]:
    kernel = STEP_KERNELS[scheme]
    rng = TrajectoryStreams(seed, start, size)
    recorder = _BlockOracle(oracle)

    theta = init_from_hat_pT(grid.T, oracle.dim, rng, size)
    errors: list[str] = []

    for n in range(grid.N):
        try:
            theta = kernel(theta, n, grid, recorder, rng, key=(block, n))
        except Exception as e:
            errors.append(
                f"Trajectories {start}..{start + size - 1}: step {n} failed: {e!r}"
            )
            break

        bad = ~np.all(np.isfinite(theta), axis=-1)
        if np.any(bad):
            for j in np.flatnonzero(bad):
                errors.append(
                    f"Trajectory {start + j}: non-finite state at step {n + 1}"
                )
            break

    return theta, recorder.calls, recorder.flagged, errors


def run_batch(
    scheme: SchemeKind,
    oracle: ScoreOracle,
    grid: TimeGrid,
    n_traj: int,
    seed: SeedSpec,
    n_threads: int | None = None,
    block_size: int = BLOCK_SIZE,
) -> ChainResult:
    """
    Run `n_traj` independent chains from {obj}`init_from_hat_pT` through
    `grid.N` steps of `scheme`.

    Trajectories are split into blocks of `block_size` which run
    concurrently. Trajectory `j` draws from sub-stream `j` of `seed`, so
    its output is the same for any number of threads, any block size and
    any `n_traj > j`. Oracles that draw per call are keyed on
    `(block, step)`; with those only the thread count is free.

    :param scheme: Discretization scheme
    :param oracle: Score oracle; {obj}`SchemeKind.SO` needs `L` and `M`
    :param grid: Time grid
    :param n_traj: Number of trajectories, at least 1
    :param seed: Stream of the run
    :param n_threads: Worker threads, see {obj}`resolve_threads`
    :param block_size: Trajectories per block
    :raises CapabilityError: If the oracle can't drive the scheme
    :raises BatchError: If any trajectory fails or leaves the finite range
    """
    assert n_traj >= 1, f"Need at least one trajectory, got {n_traj}"
    assert block_size >= 1

    if scheme is SchemeKind.SO and not (oracle.has_hessian and oracle.has_m_term):
        raise CapabilityError(oracle, "Hessian and M-term")

    n_blocks = math.ceil(n_traj / block_size)
    blocks = [
        (b, b * block_size, min(block_size, n_traj - b * block_size))
        for b in range(n_blocks)
    ]

    n_workers = min(resolve_threads(n_threads), n_blocks)
    logging.debug(
        f"Running {n_traj} {scheme.name} trajectories, N={grid.N}, "
        f"{n_blocks} block(s) on {n_workers} thread(s)"
    )

    started = time.perf_counter()

    with ThreadPoolExecutor(max_workers=n_workers) as executor:
        outputs = list(
            executor.map(
                lambda blk: _run_block(scheme, oracle, grid, seed, *blk), blocks
            )
        )

    wall_ms = 1000.0 * (time.perf_counter() - started)

    errors = [e for _, _, _, errs in outputs for e in errs]
    if len(errors):
        raise BatchError(errors)

    finals = np.concatenate([theta for theta, _, _, _ in outputs])
    calls = sum(c for _, c, _, _ in outputs)
    flagged = sum(f for _, _, f, _ in outputs)

    warnings: list[str] = []
    if flagged:
        msg = (
            f"{scheme.name}: {flagged} of {calls} oracle evaluations had a "
            f"low effective sample size"
        )
        logging.warning(msg)
        warnings.append(msg)

    return ChainResult(
        finals=finals,
        scheme=scheme,
        grid=grid,
        seed=seed,
        wall_ms=wall_ms,
        oracle_calls=calls,
        n_flagged=flagged,
        warnings=warnings,
    )
