"""
Built-in consistency checks of the numerical building blocks, run by
`diffusion-bench selftest`. Each check is small enough for the whole suite
to finish in seconds.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from ..core.exceptions import SymmetryError
from ..core.grid import build_time_grid
from ..core.numerics import (
    check_symmetric,
    phi_functions,
    sample_gaussian_with_cov,
    sym_matrix_function,
)
from ..core.rng import SeedSpec, make_generator
from ..metrics.bounds import scheme_constants
from ..metrics.order import fit_order
from ..metrics.regularity import RegularityConstants, convexity_m, lipschitz_L
from ..metrics.wasserstein import sliced_w2, w2_1d, w2_gaussian
from ..oracles.corruption import CorruptionSpec, corrupt_oracle
from ..oracles.gaussian import (
    GaussianOracle,
    gaussian_marginal_derivatives,
    ou_marginal_gaussian,
)
from ..oracles.monte_carlo import mc_marginal_derivatives
from ..oracles.oracle import linearization_terms
from ..samplers.kernels import ei_mean, em_mean, rei_rho, so_mean_and_cov
from ..samplers.pushforward import gaussian_pushforward_exact
from ..samplers.runner import run_batch
from ..samplers.types import GaussianLaw, SchemeKind
from ..targets.gaussian import GaussianTarget
from .config import ExperimentConfig

__all__ = [
    "CheckResult",
    "self_test",
    "format_report",
    "CHECKS",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed_ms: float


CheckFunc = Callable[[np.random.Generator], tuple[bool, str]]

CHECKS: dict[str, CheckFunc] = {}
"""
Registered checks by name, in registration order.
"""


def check(name: str):
    """
    Register a check. The function receives a seeded generator and returns
    `(passed, detail)`.
    """

    def decorator(func: CheckFunc) -> CheckFunc:
        assert name not in CHECKS, f"Duplicate check {name}"
        CHECKS[name] = func
        return func

    return decorator


def _max_err(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


@check("phi.recurrence")
def _phi_recurrence(rng):
    z = np.concatenate([rng.uniform(-50, 50, 200), rng.uniform(-2e-4, 2e-4, 200)])
    phi1, phi2 = phi_functions(z)

    # φ₁ = 1 + zφ₂ and φ₁ = eᶻ·φ₁(-z), relative to max(1, |φ₁|)
    scale = np.maximum(1.0, np.abs(phi1))
    err1 = _max_err(phi1 / scale, (1.0 + z * phi2) / scale)
    err2 = _max_err(phi1 / scale, np.exp(z) * phi_functions(-z)[0] / scale)
    return max(err1, err2) < 1e-10, f"max rel err {max(err1, err2):.2e}"


@check("phi.origin")
def _phi_origin(rng):
    phi1, phi2 = phi_functions(np.array([0.0, 1e-300, -1e-9]))
    err = max(_max_err(phi1, 1.0), _max_err(phi2, 0.5))
    return err < 1e-9, f"max err {err:.2e}"


@check("phi.series_continuity")
def _phi_continuity(rng):
    z = np.array([0.99999e-4, 1.00001e-4, -0.99999e-4, -1.00001e-4])
    phi1, phi2 = phi_functions(z)
    err = max(abs(phi1[0] - phi1[1]), abs(phi2[2] - phi2[3]))
    return err < 1e-8, f"jump {err:.2e}"


@check("matrix.expm")
def _matrix_expm(rng):
    G = rng.standard_normal((4, 4))
    A = 0.5 * (G + G.T)
    err = _max_err(sym_matrix_function(A, np.exp), expm(A))
    return err < 1e-10, f"max err {err:.2e}"


@check("matrix.asymmetry_rejected")
def _asymmetry(rng):
    try:
        check_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))
    except SymmetryError:
        return True, "raised"
    return False, "accepted a non-symmetric matrix"


@check("matrix.gaussian_cov")
def _gaussian_cov(rng):
    C = np.array([[2.0, 0.6], [0.6, 0.5]])
    draws = sample_gaussian_with_cov(np.broadcast_to(C, (40_000, 2, 2)), rng)
    err = _max_err(np.cov(draws.T), C)
    return err < 0.06, f"max err {err:.3f}"


@check("grid.exact_multiple")
def _grid(rng):
    grid = build_time_grid(10.0, 0.1)
    return grid.N == 100 and grid.T == 10.0, f"N={grid.N}, T={grid.T}"


@check("rng.streams")
def _streams(rng):
    seed = SeedSpec(master_seed=7)
    a = make_generator(seed, 3).random(5)
    b = make_generator(seed, 3).random(5)
    c = make_generator(seed.stream(1), 3).random(5)
    return bool(np.all(a == b) and np.all(a != c)), "reproducible, distinct"


@check("oracle.ou_marginal")
def _ou_marginal(rng):
    mu = np.array([1.0, -2.0])
    law = ou_marginal_gaussian(GaussianTarget(mu, np.eye(2)), math.log(2.0))
    err = max(_max_err(law.mu, mu / math.sqrt(2)), _max_err(law.Sigma, np.eye(2)))
    return err < 1e-12, f"max err {err:.2e}"


@check("oracle.dt_score")
def _dt_score(rng):
    target = GaussianTarget([1.0, -0.5], [[2.0, 0.3], [0.3, 0.4]])
    x = rng.standard_normal((20, 2))
    t, dt = 0.7, 1e-5

    _, _, dt_score = gaussian_marginal_derivatives(target, t, x)
    plus = gaussian_marginal_derivatives(target, t + dt, x)[0]
    minus = gaussian_marginal_derivatives(target, t - dt, x)[0]
    err = _max_err(dt_score, (plus - minus) / (2 * dt))
    return err < 1e-6, f"max err {err:.2e}"


@check("oracle.m_identity")
def _m_identity(rng):
    target = GaussianTarget([0.5, 1.0], [[4.0, 1.0], [1.0, 2.0]])
    oracle = GaussianOracle(target)

    t = rng.uniform(0.01, 5.0, 100)
    x = 2.0 * rng.standard_normal((100, 2))

    # Gaussian marginals have vanishing third derivatives: M = -∂ₜ∇log p
    _, M = linearization_terms(oracle, t, x)
    _, _, dt_score = gaussian_marginal_derivatives(target, t, x)
    err = _max_err(M, -dt_score)
    return err < 1e-8, f"max err {err:.2e}"


@check("oracle.mc_vs_analytic")
def _mc_vs_analytic(rng):
    target = GaussianTarget([1.0, 0.0], [[1.5, 0.2], [0.2, 0.8]])
    particles = target.sample(100_000, rng)
    x = rng.standard_normal((10, 2))

    mc = mc_marginal_derivatives(particles, 1.0, x)[0]
    exact = gaussian_marginal_derivatives(target, 1.0, x)[0]
    err = float(np.max(np.linalg.norm(mc - exact, axis=-1)))
    return err < 0.05, f"max L2 err {err:.4f}"


@check("oracle.mc_single_particle")
def _mc_single(rng):
    theta0 = np.array([[0.3, -1.2]])
    x = rng.standard_normal((5, 2))
    t = 0.5
    score = mc_marginal_derivatives(theta0, t, x)[0]
    exact = -(x - math.exp(-t / 2) * theta0) / (-math.expm1(-t))
    err = _max_err(score, exact)
    return err < 1e-12, f"max err {err:.2e}"


@check("oracle.corruption_norm")
def _corruption(rng):
    oracle = GaussianOracle(GaussianTarget.isotropic([1.0, 1.0], 0.5))
    noisy = corrupt_oracle(oracle, CorruptionSpec(eps_sc=0.1), SeedSpec())
    x = rng.standard_normal((50, 2))
    diff = noisy.score(1.0, x, key=(0, 1)) - oracle.score(1.0, x)
    err = _max_err(np.linalg.norm(diff, axis=-1), 0.1)
    return err < 1e-12, f"max err {err:.2e}"


@check("sampler.rho_bounds")
def _rho_bounds(rng):
    h = np.linspace(1e-3, 5.0, 60)[:, None]
    U = np.linspace(1e-8, 1.0, 60)[None, :]
    rho, comp = rei_rho(h, U)
    at_one = float(np.max(np.abs(rei_rho(h, 1.0)[0] - 1.0)))
    ok = bool(np.all((rho >= 0) & (rho <= 1))) and at_one < 1e-12
    ok = ok and _max_err(rho**2 + comp**2, 1.0) < 1e-12
    return ok, f"rho in [{rho.min():.2e}, {rho.max():.6f}], |rho(1)-1| {at_one:.1e}"


@check("sampler.rho_small_h")
def _rho_small_h(rng):
    rho, _ = rei_rho(1e-7, 0.36)
    return abs(float(rho) - 0.6) < 1e-6, f"rho {float(rho):.8f}"


@check("sampler.em_ei_drift")
def _em_ei(rng):
    oracle = GaussianOracle(GaussianTarget(np.zeros(1), np.eye(1)))
    grid = build_time_grid(1.0, 0.1)
    em = float(em_mean(np.ones((1, 1)), 0, grid, oracle)[0, 0])

    grid2 = build_time_grid(4.0 * math.log(2.0), 2.0 * math.log(2.0))
    zero = _ZeroOracle(1)
    ei = float(ei_mean(np.ones((1, 1)), 0, grid2, zero)[0, 0])
    ok = abs(em - 0.95) < 1e-12 and abs(ei - 2.0) < 1e-12
    return ok, f"EM {em:.12f}, EI {ei:.12f}"


@check("sampler.so_stationary_exact")
def _so_exact(rng):
    oracle = GaussianOracle(GaussianTarget(np.zeros(2), np.eye(2)))
    grid = build_time_grid(3.0, 0.3)
    theta = rng.standard_normal((10, 2))
    mean, cov = so_mean_and_cov(theta, 2, grid, oracle)

    err = max(
        _max_err(mean, math.exp(-0.15) * theta),
        _max_err(cov, -math.expm1(-0.3) * np.eye(2)),
    )
    return err < 1e-10, f"max err {err:.2e}"


@check("sampler.pushforward_stationary")
def _pushforward(rng):
    target = GaussianTarget(np.zeros(2), np.eye(2))
    grid = build_time_grid(10.0, 0.5)
    law = gaussian_pushforward_exact(SchemeKind.SO, target, grid)
    expected = 1.0 - math.exp(-20.0)
    err = max(_max_err(np.diag(law.cov), expected), _max_err(law.mean, 0.0))
    return err < 1e-10, f"max err {err:.2e}"


@check("sampler.stationary_fixed_point")
def _fixed_point(rng):
    oracle = GaussianOracle(GaussianTarget(np.zeros(2), np.eye(2)))
    grid = build_time_grid(4.0, 0.02)
    n = 10_000
    worst = 0.0
    for scheme in SchemeKind:
        finals = run_batch(scheme, oracle, grid, n, SeedSpec(master_seed=1)).finals
        # 4-sigma bands on mean and variance
        z_mean = np.max(np.abs(finals.mean(axis=0))) / math.sqrt(1.0 / n)
        z_var = np.max(np.abs(finals.var(axis=0) - 1.0)) / math.sqrt(2.0 / n)
        worst = max(worst, float(z_mean), float(z_var))
    return worst < 4.0, f"worst z-score {worst:.2f}"


@check("sampler.clean_corruption_transparent")
def _clean_corruption(rng):
    oracle = GaussianOracle(GaussianTarget.isotropic([1.0, -1.0], 0.5))
    wrapped = corrupt_oracle(oracle, CorruptionSpec(), SeedSpec())
    grid = build_time_grid(1.0, 0.1)
    seed = SeedSpec(master_seed=3)

    a = run_batch(SchemeKind.SO, oracle, grid, 100, seed).finals
    b = run_batch(SchemeKind.SO, wrapped, grid, 100, seed).finals
    return bool(np.array_equal(a, b)), "bit-identical"


@check("sampler.thread_determinism")
def _threads(rng):
    oracle = GaussianOracle(GaussianTarget.isotropic([1.0, -1.0], 0.5))
    grid = build_time_grid(1.0, 0.1)
    seed = SeedSpec(master_seed=5)

    a = run_batch(SchemeKind.REI, oracle, grid, 250, seed, n_threads=1, block_size=50)
    b = run_batch(SchemeKind.REI, oracle, grid, 250, seed, n_threads=4, block_size=50)
    return bool(np.array_equal(a.finals, b.finals)), "bit-identical"


@check("metrics.w2_brute_force")
def _w2_brute(rng):
    worst = 0.0
    for n in range(1, 7):
        a, b = rng.standard_normal(n), rng.standard_normal(n)
        best = min(
            math.sqrt(np.mean((a - b[list(p)]) ** 2))
            for p in itertools.permutations(range(n))
        )
        worst = max(worst, abs(w2_1d(a, b) - best))
    return worst < 1e-10, f"max err {worst:.2e}"


@check("metrics.w2_gaussian")
def _w2_gauss(rng):
    shift = w2_gaussian(GaussianLaw([0.0], [[1.0]]), GaussianLaw([3.0], [[1.0]]))
    scale = w2_gaussian(GaussianLaw([0.0], [[1.0]]), GaussianLaw([0.0], [[4.0]]))
    err = max(abs(shift - 3.0), abs(scale - 1.0))
    return err < 1e-10, f"max err {err:.2e}"


@check("metrics.sliced_degenerate")
def _sliced(rng):
    a, b = rng.standard_normal((300, 2)), rng.standard_normal((200, 2))
    sliced = sliced_w2(a, b, 1, SeedSpec(), directions=[[1.0, 0.0]])
    err = abs(sliced - w2_1d(a[:, 0], b[:, 0]))
    return err < 1e-12, f"err {err:.2e}"


@check("metrics.fit_order")
def _fit_order(rng):
    h = np.array([0.4, 0.2, 0.1, 0.05, 0.025])
    s1 = fit_order(h, 3.0 * h)[0]
    s2 = fit_order(h, 2.0 * np.sqrt(h) + 1e-3, floor=1e-3)[0]
    err = max(abs(s1 - 1.0), abs(s2 - 0.5))
    return err < 1e-6, f"slopes {s1:.8f}, {s2:.8f}"


@check("metrics.regularity_functions")
def _regularity_functions(rng):
    t = np.linspace(1e-3, 20.0, 2000)
    ok = True
    for m0, L0 in [(0.5, 0.5), (1.0, 1.0), (2.0, 7.0), (10.0, 60.0)]:
        ok &= all(lipschitz_L(s, L0) <= L0 + 1 + 1e-12 for s in t)
        ok &= all(convexity_m(s, m0) >= min(1.0, m0) - 1e-12 for s in t)
    return ok, "L(t) <= L0 + 1, m(t) >= min(1, m0)"


@check("metrics.bound_constants")
def _constants(rng):
    rc = RegularityConstants(m0=1.0, L0=1.0)
    em = scheme_constants(SchemeKind.EM, rc, 2, 0.1)
    ei = scheme_constants(SchemeKind.EI, rc, 2, 0.1)
    err = max(abs(em[0] - 5.0), abs(em[1] - 2.0), abs(ei[0] - 4.0))
    return err < 1e-12, f"C1_EM={em[0]}, C2_EM={em[1]}, C1_EI={ei[0]}"


class _ZeroOracle(GaussianOracle):
    """
    Oracle returning a zero score.
    """

    def __init__(self, dim: int):
        super().__init__(GaussianTarget(np.zeros(dim), np.eye(dim)))

    def evaluate(self, t, x, hessian=False, key=()):
        out = super().evaluate(t, x, hessian, key)
        return type(out)(score=np.zeros_like(out.score), hessian=out.hessian)


def self_test(cfg: ExperimentConfig | None = None) -> list[CheckResult]:
    """
    Run every registered check. A check raising an exception fails.
    """
    seed = SeedSpec(master_seed=cfg.master_seed if cfg else 0)
    results: list[CheckResult] = []

    for i, (name, func) in enumerate(CHECKS.items()):
        rng = make_generator(seed, i)
        started = time.perf_counter()

        try:
            passed, detail = func(rng)
        except Exception as e:
            logging.exception(f"Check {name} raised")
            passed, detail = False, f"raised {e!r}"

        elapsed = 1000.0 * (time.perf_counter() - started)
        results.append(CheckResult(name, bool(passed), detail, elapsed))

    return results


def format_report(results: list[CheckResult]) -> str:
    """
    Render check results as a fixed-width table.
    """
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  status  {'ms':>8}  detail"]
    lines.append("-" * len(lines[0]))

    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{r.name:<{width}}  {status:<6}  {r.elapsed_ms:>8.1f}  {r.detail}"
        )

    n_passed = sum(r.passed for r in results)
    lines.append(f"{n_passed}/{len(results)} checks passed")

    return "\n".join(lines)
