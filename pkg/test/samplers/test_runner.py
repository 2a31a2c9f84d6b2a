import math

import numpy as np
from pytest import mark, raises

from diffusion_bench import *


def test_thread_independence(gaussian_oracle: GaussianOracle, seed: SeedSpec):
    grid = build_time_grid(1.0, 0.1)

    a = run_batch(SchemeKind.REI, gaussian_oracle, grid, 250, seed, n_threads=1, block_size=50)
    b = run_batch(SchemeKind.REI, gaussian_oracle, grid, 250, seed, n_threads=4, block_size=50)

    assert np.array_equal(a.finals, b.finals)


def test_block_size_independence(gaussian_oracle: GaussianOracle, seed: SeedSpec):
    grid = build_time_grid(1.0, 0.1)

    a = run_batch(SchemeKind.REM, gaussian_oracle, grid, 250, seed, block_size=50)
    b = run_batch(SchemeKind.REM, gaussian_oracle, grid, 250, seed, block_size=100)
    c = run_batch(SchemeKind.REM, gaussian_oracle, grid, 250, seed)

    # batched linear algebra may round differently with the block shape
    assert np.allclose(a.finals, b.finals, rtol=0, atol=1e-12)
    assert np.allclose(a.finals, c.finals, rtol=0, atol=1e-12)


@mark.parametrize("scheme", list(SchemeKind))
def test_trajectory_prefix(scheme: SchemeKind, gaussian_oracle: GaussianOracle, seed):
    grid = build_time_grid(1.0, 0.2)

    short = run_batch(scheme, gaussian_oracle, grid, 10, seed, block_size=4)
    long = run_batch(scheme, gaussian_oracle, grid, 250, seed, block_size=64)

    # trajectory j is the same whoever else runs with it
    assert np.allclose(short.finals, long.finals[:10], rtol=0, atol=1e-12)


def test_result(gaussian_oracle: GaussianOracle, seed: SeedSpec):
    grid = build_time_grid(1.0, 0.25)

    result = run_batch(SchemeKind.EM, gaussian_oracle, grid, 130, seed, block_size=50)

    assert result.finals.shape == (130, 2)
    assert result.n_traj == 130
    assert result.scheme is SchemeKind.EM
    assert result.grid == grid
    assert result.oracle_calls == 130 * 4
    assert result.n_flagged == 0
    assert result.wall_ms >= 0


@mark.parametrize("scheme", list(SchemeKind))
def test_oracle_calls(scheme: SchemeKind, gaussian_oracle: GaussianOracle, seed):
    grid = build_time_grid(1.0, 0.2)
    result = run_batch(scheme, gaussian_oracle, grid, 20, seed)

    assert result.oracle_calls == scheme.calls_per_step * 20 * grid.N


def test_init_only(gaussian_oracle: GaussianOracle, seed: SeedSpec):
    grid = TimeGrid(T=1.0, h=0.5, N=0)
    result = run_batch(SchemeKind.SO, gaussian_oracle, grid, 20_000, seed)

    assert result.oracle_calls == 0
    assert np.allclose(result.finals.var(axis=0), 1.0 - math.exp(-1.0), atol=0.03)


def test_capability(zero_oracle: ScoreFunctionOracle, seed: SeedSpec):
    grid = build_time_grid(1.0, 0.1)

    with raises(CapabilityError):
        run_batch(SchemeKind.SO, zero_oracle, grid, 10, seed)

    # first-order schemes only need the score
    run_batch(SchemeKind.EI, zero_oracle, grid, 10, seed)


def test_non_finite(seed: SeedSpec):
    def blow_up(t, x):
        return np.full_like(x, np.inf)

    oracle = ScoreFunctionOracle(blow_up, 2)
    grid = build_time_grid(1.0, 0.1)

    with raises(BatchError) as e:
        run_batch(SchemeKind.EM, oracle, grid, 5, seed)

    assert len(e.value.errors) == 5
    assert "non-finite state at step 1" in e.value.errors[0]


def test_failing_oracle(seed: SeedSpec):
    def broken(t, x):
        raise RuntimeError("broken model")

    oracle = ScoreFunctionOracle(broken, 2)
    grid = build_time_grid(1.0, 0.1)

    with raises(BatchError) as e:
        run_batch(SchemeKind.REM, oracle, grid, 120, seed, block_size=50)

    # one message per block
    assert len(e.value.errors) == 3
    assert "broken model" in str(e.value)


def test_flagged(stationary_target: GaussianTarget, rng, seed: SeedSpec):
    particles = stationary_target.sample(100, rng)
    oracle = MonteCarloOracle(particles, McOracleConfig(n_particles=100))

    # near t = 0 the kernel is narrower than the particle spacing
    grid = build_time_grid(0.02, 0.01)
    result = run_batch(SchemeKind.EM, oracle, grid, 100, seed)

    assert result.n_flagged > 0
    assert len(result.warnings) == 1


def test_resolve_threads(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert resolve_threads() == 3
    assert resolve_threads(2) == 2

    monkeypatch.setenv(THREADS_ENV, "0")
    assert resolve_threads() >= 1


@mark.slow
@mark.parametrize("scheme", list(SchemeKind))
def test_stationary_fixed_point(scheme: SchemeKind, stationary_target: GaussianTarget):
    oracle = GaussianOracle(stationary_target)
    grid = build_time_grid(10.0, 0.01)

    finals = run_batch(scheme, oracle, grid, 100_000, SeedSpec(master_seed=1)).finals

    assert np.all(np.abs(finals.mean(axis=0)) < 0.02)
    assert np.all(np.abs(finals.var(axis=0) - 1.0) < 0.03)
