import math

import numpy as np
from pytest import raises

from diffusion_bench import *

H = np.array([0.4, 0.2, 0.1, 0.05, 0.025])


def test_exact_power_laws():
    slope, intercept, r2 = fit_order(H, 3.0 * H)

    assert math.isclose(slope, 1.0)
    assert math.isclose(intercept, math.log(3.0))
    assert math.isclose(r2, 1.0)

    assert math.isclose(fit_order(H, 0.5 * H**2)[0], 2.0)


def test_floor_subtracted():
    slope, _, _ = fit_order(H, 2.0 * np.sqrt(H) + 1e-3, floor=1e-3)
    assert math.isclose(slope, 0.5)


def test_floor_dominated_points_dropped():
    err = np.array([0.4, 0.2, 0.1, 0.005, 0.001])
    slope, _, _ = fit_order(H, err, floor=0.004)

    # only the first three points are above twice the floor
    assert slope > 0.9


def test_too_few_points():
    with raises(ValueError):
        fit_order(H, [0.4, 0.2, 0.001, 0.001, 0.001], floor=0.01)


def test_noise_removed():
    noise = 0.01
    err = np.sqrt((0.1 * H) ** 2 + noise**2)

    slope, intercept, r2 = fit_order(H, err, noise=noise)
    assert math.isclose(slope, 1.0)
    assert math.isclose(intercept, math.log(0.1))

    # without the correction the noise flattens the small steps
    assert fit_order(H, err)[0] < 0.9


def test_noise_dominated_points_dropped():
    err = np.array([0.4, 0.2, 0.1, 0.009, 0.008])
    slope, _, _ = fit_order(H, err, noise=0.01)

    assert abs(slope - 1.0) < 0.01

    with raises(ValueError):
        fit_order(H, [0.4, 0.2, 0.009, 0.008, 0.007], noise=0.01)
