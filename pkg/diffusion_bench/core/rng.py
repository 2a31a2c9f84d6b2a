"""
Seeded, stream-splittable randomness.

Every random draw in the package comes from a generator built by
{obj}`make_generator`. Generators are counter-based (Philox) and keyed by a
`SeedSequence` whose spawn key is the stream id followed by any sub-keys, so
independent streams never share draws and the same key always reproduces
the same sequence.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

__all__ = [
    "SeedSpec",
    "make_generator",
    "TrajectoryStreams",
    "RandomSource",
]

U64_MAX = 2**64 - 1


class SeedSpec(BaseModel):
    """
    Identifies one reproducible random stream.
    """

    model_config = ConfigDict(frozen=True)

    master_seed: int = Field(default=0, ge=0, le=U64_MAX)
    """
    Seed shared by all streams of a run.
    """

    stream_id: int = Field(default=0, ge=0, le=U64_MAX)
    """
    Independent sub-stream, e.g. a trajectory block index.
    """

    def stream(self, stream_id: int) -> SeedSpec:
        """
        Return a spec for another stream of the same run.
        """
        return SeedSpec(master_seed=self.master_seed, stream_id=stream_id)

    def sequence(self, *keys: int) -> np.random.SeedSequence:
        """
        Return the seed sequence of this stream, optionally narrowed to a
        sub-stream by `keys`.

        :param keys: Non-negative integers identifying a sub-stream, e.g. a step index
        """
        return np.random.SeedSequence(
            entropy=self.master_seed,
            spawn_key=(self.stream_id, *keys),
        )


def make_generator(seed: SeedSpec, *keys: int) -> np.random.Generator:
    """
    Create the generator for a stream.

    :param seed: Stream to draw from
    :param keys: Optional sub-stream keys
    """
    return np.random.Generator(np.random.Philox(seed.sequence(*keys)))


class TrajectoryStreams:
    """
    Draws for a block of trajectories, row `j` of every draw coming from the
    generator of trajectory `first + j`. A trajectory's draws therefore
    don't depend on which block it runs in or how many others run with it.

    Only the two draws the step kernels make are provided. Values are taken
    from per-trajectory buffers refilled `chunk` at a time, so the sequence
    each trajectory sees depends only on the order of requests.
    """

    def __init__(self, seed: SeedSpec, first: int, count: int, chunk: int = 256):
        assert first >= 0 and count >= 1 and chunk >= 1

        self.generators = [make_generator(seed, first + j) for j in range(count)]
        self.chunk = chunk
        self._normals = np.empty((count, 0))
        self._uniforms = np.empty((count, 0))

    def __len__(self) -> int:
        return len(self.generators)

    def _take(self, buffer: NDArray, width: int, refill) -> tuple[NDArray, NDArray]:
        if buffer.shape[1] < width:
            size = max(self.chunk, width - buffer.shape[1])
            fresh = np.stack([refill(g, size) for g in self.generators])
            buffer = np.concatenate([buffer, fresh], axis=1)
        return buffer[:, :width], buffer[:, width:]

    def standard_normal(self, shape: tuple[int, ...]) -> NDArray:
        assert shape[0] == len(self), f"Expected {len(self)} rows, got {shape[0]}"
        width = int(np.prod(shape[1:], dtype=int))

        out, self._normals = self._take(
            self._normals, width, lambda g, k: g.standard_normal(k)
        )
        return out.reshape(shape)

    def random(self, size: int) -> NDArray:
        assert size == len(self), f"Expected {len(self)} rows, got {size}"

        out, self._uniforms = self._take(
            self._uniforms, 1, lambda g, k: g.random(k)
        )
        return out[:, 0]


RandomSource = np.random.Generator | TrajectoryStreams
"""
Anything the step kernels can draw from.
"""
