import numpy as np
import pydantic
from pytest import raises

from diffusion_bench import *


def test_reproducible():
    seed = SeedSpec(master_seed=7, stream_id=2)

    a = make_generator(seed, 3).random(10)
    b = make_generator(seed, 3).random(10)

    assert np.array_equal(a, b)


def test_streams_independent():
    seed = SeedSpec(master_seed=7)

    base = make_generator(seed).random(10)
    other_stream = make_generator(seed.stream(1)).random(10)
    sub_stream = make_generator(seed, 1).random(10)
    other_master = make_generator(SeedSpec(master_seed=8)).random(10)

    for draws in (other_stream, sub_stream, other_master):
        assert not np.any(base == draws)


def test_stream():
    seed = SeedSpec(master_seed=7, stream_id=2)
    other = seed.stream(5)

    assert other.master_seed == 7
    assert other.stream_id == 5


def test_seed_range():
    SeedSpec(master_seed=2**64 - 1)

    with raises(pydantic.ValidationError):
        SeedSpec(master_seed=-1)

    with raises(pydantic.ValidationError):
        SeedSpec(master_seed=2**64)


def test_trajectory_streams():
    seed = SeedSpec(master_seed=3)
    streams = TrajectoryStreams(seed, first=4, count=3, chunk=8)

    normals = np.concatenate([streams.standard_normal((3, 2, 2)).reshape(3, 4) for _ in range(5)], axis=1)
    uniforms = streams.random(3)

    # row j replays the lone generator of trajectory 4 + j, across chunk refills
    for j in range(3):
        alone = make_generator(seed, 4 + j)
        assert np.array_equal(normals[j], alone.standard_normal(24)[:20])
        assert uniforms[j] == alone.random()


def test_trajectory_streams_shape():
    streams = TrajectoryStreams(SeedSpec(), first=0, count=2)

    assert len(streams) == 2
    assert streams.standard_normal((2, 3)).shape == (2, 3)
    assert streams.random(2).shape == (2,)
