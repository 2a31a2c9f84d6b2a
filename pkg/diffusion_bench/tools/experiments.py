"""
Experiment drivers: the logistic-regression study, the convergence-order
study on a Gaussian target and the score-error sweep.

Each driver returns an {obj}`ExperimentResult`; a cell (scheme, λ, h) which
fails yields an error row instead of aborting the run.
"""

from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy.stats import linregress, norm

from ..core.exceptions import BoundError, DiffusionBenchError
from ..core.grid import TimeGrid, build_time_grid
from ..core.rng import SeedSpec, make_generator
from ..metrics.bounds import theorem_bound
from ..metrics.order import fit_order
from ..metrics.regularity import RegularityConstants
from ..metrics.wasserstein import sliced_w2, w2_1d, w2_gaussian
from ..oracles.corruption import corrupt_oracle
from ..oracles.gaussian import GaussianOracle
from ..oracles.monte_carlo import McOracleConfig, MonteCarloOracle
from ..oracles.oracle import ScoreOracle
from ..samplers.pushforward import gaussian_pushforward_exact
from ..samplers.runner import run_batch
from ..samplers.types import GaussianLaw, SchemeKind
from ..targets.gaussian import GaussianTarget
from ..targets.logistic import LogisticPosterior, generate_dataset
from ..targets.mala import mala_reference_sampler
from ..targets.target import BaseTarget
from .config import ExperimentConfig
from .results import BoundRow, ExperimentResult, ResultRow, SlopeRow, SweepFit

__all__ = [
    "run_figure1",
    "run_order_study",
    "run_score_sweep",
    "run_experiment",
    "order_study_target",
    "score_sweep_target",
]

# Stream ids of the independent random inputs of a run; the λ index is
# added to each base in the logistic study.
STREAM_DATASET = 100
STREAM_REFERENCE = 200
STREAM_PARTICLES = 300
STREAM_CORRUPTION = 400
STREAM_CHAINS = 500
STREAM_PROJECTIONS = 600


def _seed(cfg: ExperimentConfig, stream_id: int) -> SeedSpec:
    return SeedSpec(master_seed=cfg.master_seed, stream_id=stream_id)


def _moment_law(samples: NDArray) -> GaussianLaw:
    return GaussianLaw(samples.mean(axis=0), np.atleast_2d(np.cov(samples.T)))


def _error_row(
    cfg: ExperimentConfig,
    experiment: str,
    scheme: SchemeKind,
    h: float,
    error: Exception,
    lam: float | None = None,
    eps_sc: float = 0.0,
) -> ResultRow:
    logging.error(f"{experiment}: {scheme.name} at h={h} failed: {error}")
    return ResultRow(
        experiment=experiment,
        scheme=scheme.name,
        lam=lam,
        h=h,
        N=math.floor(cfg.T / h + 1e-9),
        n_traj=0,
        seed=cfg.master_seed,
        eps_sc=eps_sc,
        error=str(error).splitlines()[0],
    )


def _bound_rows(
    experiment: str,
    cfg: ExperimentConfig,
    target: BaseTarget,
    X0_norm: float,
    lam: float | None = None,
    eps_sc: float = 0.0,
    h_list: list[float] | None = None,
) -> list[BoundRow]:
    rc = RegularityConstants.from_target(target)
    rows: list[BoundRow] = []

    for scheme in cfg.schemes:
        for h in h_list or cfg.h_list:
            try:
                report = theorem_bound(
                    scheme, rc, target.dim, h, cfg.T, eps_sc=eps_sc, X0_norm=X0_norm
                )
            except BoundError as e:
                logging.info(f"Skipping bounds for {target}: {e}")
                return []
            rows.append(BoundRow.from_report(experiment, report, lam))

    return rows


def _run_cell(
    cfg: ExperimentConfig,
    scheme: SchemeKind,
    oracle: ScoreOracle,
    grid: TimeGrid,
    n_traj: int,
    seed: SeedSpec,
    measure: Callable[[NDArray], dict[str, float | None]],
    **labels,
) -> ResultRow:
    result = run_batch(scheme, oracle, grid, n_traj, seed)

    logging.info(
        f"{labels['experiment']}: {scheme.name} h={grid.h} N={grid.N} "
        f"done in {result.wall_ms:.0f} ms"
    )

    return ResultRow(
        scheme=scheme.name,
        h=grid.h,
        N=grid.N,
        n_traj=n_traj,
        seed=cfg.master_seed,
        wall_ms=result.wall_ms if cfg.record_timing else 0.0,
        oracle_calls=result.oracle_calls,
        **measure(result.finals),
        **labels,
    )


def run_figure1(cfg: ExperimentConfig) -> ExperimentResult:
    """
    Compare all schemes on logistic-regression posteriors, one per λ.

    For each λ a dataset is generated, reference samples of the posterior
    are drawn by MALA and a Monte-Carlo oracle is built over a separate set
    of MALA particles shared by all schemes. Each (scheme, h) cell reports
    the `W2` distance between first coordinates of the chain output and the
    reference, and the sliced `W2`.
    """
    experiment = "figure1"
    out = ExperimentResult(experiment)

    for i, lam in enumerate(cfg.lambda_list):
        dataset = generate_dataset(
            cfg.n_data,
            cfg.d,
            cfg.sigma2,
            cfg.theta_star,
            _seed(cfg, STREAM_DATASET + i),
        )
        out.datasets[lam] = dataset
        target = LogisticPosterior(dataset, lam)

        reference = mala_reference_sampler(
            target,
            cfg.mala.model_copy(update={"n_samples": cfg.n_reference}),
            _seed(cfg, STREAM_REFERENCE + i),
        )

        oracle: ScoreOracle = MonteCarloOracle.from_target(
            target,
            McOracleConfig(
                n_particles=cfg.mc_particles,
                seed=_seed(cfg, STREAM_PARTICLES + i),
            ),
            cfg.mala,
        )
        if not cfg.corruption.is_clean:
            oracle = corrupt_oracle(
                oracle, cfg.corruption, _seed(cfg, STREAM_CORRUPTION + i)
            )

        projections = _seed(cfg, STREAM_PROJECTIONS)

        def measure(finals: NDArray) -> dict[str, float | None]:
            return {
                "w2_dim1": w2_1d(finals[:, 0], reference[:, 0]),
                "w2_sliced": sliced_w2(finals, reference, cfg.n_proj, projections),
            }

        for scheme in cfg.schemes:
            for h in cfg.h_list:
                try:
                    row = _run_cell(
                        cfg,
                        scheme,
                        oracle,
                        build_time_grid(cfg.T, h),
                        cfg.n_traj,
                        _seed(cfg, STREAM_CHAINS + i),
                        measure,
                        experiment=experiment,
                        lam=lam,
                        eps_sc=cfg.corruption.eps_sc,
                    )
                except DiffusionBenchError as e:
                    row = _error_row(cfg, experiment, scheme, h, e, lam=lam)
                out.rows.append(row)

        out.bounds += _bound_rows(
            experiment,
            cfg,
            target,
            target.second_moment_norm(reference),
            lam=lam,
            eps_sc=cfg.corruption.eps_sc,
        )

    out.rows.sort(key=lambda r: (r.lam, r.scheme, r.h))
    return out


def order_study_target(cfg: ExperimentConfig) -> GaussianTarget:
    """
    Non-stationary Gaussian target of the order study.
    """
    return GaussianTarget.isotropic(
        np.full(cfg.d, cfg.order_mean), cfg.order_variance
    )


def score_sweep_target(cfg: ExperimentConfig) -> GaussianTarget:
    """
    Gaussian target of the score sweep. A fixed score bias `ε·u` moves the
    sampled mean by about `2ε·σ²/(2 - σ²)·u` for variance `σ²`, so this
    target is wider than the order-study one for the bias to dominate the
    discretization error.
    """
    return GaussianTarget.isotropic(
        np.full(cfg.d, cfg.sweep_mean), cfg.sweep_variance
    )


def _quantile_reference(target: GaussianTarget, n: int) -> NDArray:
    """
    `n` evenly spaced quantiles of the first marginal of `target`: a
    noise-free stand-in for `n` exact draws.
    """
    u = (np.arange(n) + 0.5) / n
    return target.mu[0] + math.sqrt(target.Sigma[0, 0]) * norm.ppf(u)


def _sampling_noise(
    cfg: ExperimentConfig, target: GaussianTarget, reference: NDArray, n: int
) -> float:
    """
    Root-mean-square `w2_dim1` of `n` exact draws against `reference`,
    i.e. the error an exact sampler would show.
    """
    if cfg.n_noise_draws == 0:
        return 0.0

    rng = make_generator(_seed(cfg, STREAM_REFERENCE))
    sq = [
        w2_1d(target.sample(n, rng)[:, 0], reference) ** 2
        for _ in range(cfg.n_noise_draws)
    ]
    return math.sqrt(float(np.mean(sq)))


def run_order_study(cfg: ExperimentConfig) -> ExperimentResult:
    """
    Measure the empirical convergence order of each scheme on a Gaussian
    target with its exact oracle.

    EM, EI and SO are propagated exactly with
    {obj}`gaussian_pushforward_exact` and measured with {obj}`w2_gaussian`,
    free of sampling noise. REM and REI are sampled with
    `cfg.n_traj_order` trajectories and measured by the first-coordinate
    `W2` against quantiles of the target. Their orders are fitted after
    removing the error an exact sampler of the same size would show.
    """
    experiment = "order_study"
    out = ExperimentResult(experiment)

    target = order_study_target(cfg)
    oracle: ScoreOracle = GaussianOracle(target)
    if not cfg.corruption.is_clean:
        oracle = corrupt_oracle(oracle, cfg.corruption, _seed(cfg, STREAM_CORRUPTION))

    exact = GaussianLaw(target.mu, target.Sigma)
    reference = _quantile_reference(target, cfg.n_traj_order)

    def measure(finals: NDArray) -> dict[str, float | None]:
        return {
            "w2_dim1": w2_1d(finals[:, 0], reference),
            "w2_gauss": w2_gaussian(_moment_law(finals), exact),
        }

    sampled = [
        scheme
        for scheme in cfg.schemes
        if scheme.is_randomized or not cfg.corruption.is_clean
    ]
    noise = 0.0
    if any(scheme.is_randomized for scheme in sampled):
        noise = _sampling_noise(cfg, target, reference, cfg.n_traj_order)
        logging.info(f"{experiment}: sampling noise of w2_dim1 is {noise:.2e}")

    for scheme in cfg.schemes:
        for h in cfg.h_list:
            try:
                grid = build_time_grid(cfg.T, h)

                if scheme in sampled:
                    row = _run_cell(
                        cfg,
                        scheme,
                        oracle,
                        grid,
                        cfg.n_traj_order,
                        _seed(cfg, STREAM_CHAINS),
                        measure,
                        experiment=experiment,
                        eps_sc=cfg.corruption.eps_sc,
                    )
                else:
                    law = gaussian_pushforward_exact(scheme, target, grid)
                    row = ResultRow(
                        experiment=experiment,
                        scheme=scheme.name,
                        h=grid.h,
                        N=grid.N,
                        n_traj=0,
                        seed=cfg.master_seed,
                        w2_dim1=w2_gaussian(
                            GaussianLaw(law.mean[:1], law.cov[:1, :1]),
                            GaussianLaw(exact.mean[:1], exact.cov[:1, :1]),
                        ),
                        w2_gauss=w2_gaussian(law, exact),
                        oracle_calls=grid.N * (target.dim + 1),
                    )
            except DiffusionBenchError as e:
                row = _error_row(cfg, experiment, scheme, h, e)
            out.rows.append(row)

    X0_norm = target.second_moment_norm()
    floor = math.exp(-min(1.0, target.regularity()[0]) * cfg.T) * X0_norm

    for scheme in cfg.schemes:
        rows = [r for r in out.rows if r.scheme == scheme.name and not r.failed]
        if scheme.is_randomized:
            out.slopes.append(
                _slope_row(experiment, scheme, rows, "w2_dim1", floor, noise)
            )
        else:
            out.slopes.append(_slope_row(experiment, scheme, rows, "w2_gauss", floor))

    out.bounds += _bound_rows(
        experiment, cfg, target, X0_norm, eps_sc=cfg.corruption.eps_sc
    )

    out.rows.sort(key=lambda r: (r.scheme, r.h))
    return out


def _slope_row(
    experiment: str,
    scheme: SchemeKind,
    rows: list[ResultRow],
    metric: str,
    floor: float,
    noise: float = 0.0,
) -> SlopeRow:
    h = [r.h for r in rows]
    err = [getattr(r, metric) for r in rows]

    if noise > 0:
        try:
            fit_order(h, err, floor, noise)
        except ValueError as e:
            logging.warning(
                f"{experiment}: {scheme.name} errors are within the sampling "
                f"noise, fitting them as measured: {e}"
            )
            noise = 0.0

    try:
        slope, intercept, r2 = fit_order(h, err, floor, noise)
    except ValueError as e:
        logging.warning(f"{experiment}: no order fit for {scheme.name}: {e}")
        return SlopeRow(
            experiment=experiment,
            scheme=scheme.name,
            metric=metric,
            floor=floor,
            noise=noise,
            n_points=len(rows),
        )

    logging.info(f"{experiment}: {scheme.name} order {slope:.3f} (r2={r2:.4f})")
    return SlopeRow(
        experiment=experiment,
        scheme=scheme.name,
        metric=metric,
        slope=slope,
        intercept=intercept,
        r2=r2,
        floor=floor,
        noise=noise,
        n_points=len(rows),
    )


def run_score_sweep(cfg: ExperimentConfig) -> ExperimentResult:
    """
    Sweep the score error `ε_sc` at fixed `h` on {obj}`score_sweep_target`
    and fit the final error affinely in `ε_sc` per scheme.

    All levels share the chain seed and the perturbation direction, so
    differences between them are due to the size of the score error only.
    """
    experiment = "score_sweep"
    out = ExperimentResult(experiment)

    target = score_sweep_target(cfg)
    clean = GaussianOracle(target)
    exact = GaussianLaw(target.mu, target.Sigma)
    reference = _quantile_reference(target, cfg.n_traj)

    def measure(finals: NDArray) -> dict[str, float | None]:
        return {
            "w2_dim1": w2_1d(finals[:, 0], reference),
            "w2_gauss": w2_gaussian(_moment_law(finals), exact),
        }

    grid = build_time_grid(cfg.T, cfg.sweep_h)

    for scheme in cfg.schemes:
        for eps in cfg.sweep_eps:
            oracle = corrupt_oracle(
                clean,
                cfg.corruption.model_copy(update={"eps_sc": eps}),
                _seed(cfg, STREAM_CORRUPTION),
            )
            try:
                row = _run_cell(
                    cfg,
                    scheme,
                    oracle,
                    grid,
                    cfg.n_traj,
                    _seed(cfg, STREAM_CHAINS),
                    measure,
                    experiment=experiment,
                    eps_sc=eps,
                )
            except DiffusionBenchError as e:
                row = _error_row(cfg, experiment, scheme, grid.h, e, eps_sc=eps)
            out.rows.append(row)

        ok = [r for r in out.rows if r.scheme == scheme.name and not r.failed]
        if len(ok) >= 2:
            fit = linregress([r.eps_sc for r in ok], [r.w2_gauss for r in ok])
            out.sweep.append(
                SweepFit(
                    scheme=scheme.name,
                    h=grid.h,
                    metric="w2_gauss",
                    slope=float(fit.slope),
                    intercept=float(fit.intercept),
                    r2=float(fit.rvalue**2),
                    n_points=len(ok),
                )
            )

    X0_norm = target.second_moment_norm()
    for eps in cfg.sweep_eps:
        out.bounds += _bound_rows(
            experiment, cfg, target, X0_norm, eps_sc=eps, h_list=[grid.h]
        )

    out.rows.sort(key=lambda r: (r.scheme, r.eps_sc))
    return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """
    Dispatch to the driver named by `cfg.experiment`.
    """
    match cfg.experiment:
        case "figure1":
            return run_figure1(cfg)
        case "order_study":
            return run_order_study(cfg)
        case "score_sweep":
            return run_score_sweep(cfg)
        case _:
            raise ValueError(f"Not a sampling experiment: {cfg.experiment}")
