"""Seeded, splittable random streams.

Every experiment draws from a RandomStream, a thin single-owner wrapper
around numpy's PCG64 generator. Sub-streams for independent runs are
derived by XOR-ing the base seed with multiples of the 64-bit golden
ratio, so a (kind, seed, purpose) key maps to a reproducible stream
without any global draw ordering.
"""

from __future__ import annotations

import numpy as np

GOLDEN64 = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def derive_seed(base_seed: int, run_index: int) -> int:
    """Seed for sub-stream `run_index`: base_seed XOR (run_index * golden)."""
    return (int(base_seed) ^ ((int(run_index) * GOLDEN64) & _MASK64)) & _MASK64


class RandomStream:
    """Deterministic random stream with an explicit seed and draw counter.

    Single-owner: never share one instance between concurrent tasks. Two
    streams built from the same seed produce identical draw sequences
    (PCG64 bit stream; numpy's documented transforms for normals etc.).
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self.counter = 0
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def substream(self, run_index: int) -> "RandomStream":
        """Independent stream for sub-run `run_index` of this stream's seed."""
        return RandomStream(derive_seed(self.seed, run_index))

    def standard_normal(self, shape) -> np.ndarray:
        out = self._gen.standard_normal(shape)
        self.counter += int(np.size(out))
        return out

    def random(self, shape) -> np.ndarray:
        """Uniform draws in [0, 1)."""
        out = self._gen.random(shape)
        self.counter += int(np.size(out))
        return out

    def beta(self, a: float, b: float, shape) -> np.ndarray:
        out = self._gen.beta(a, b, shape)
        self.counter += int(np.size(out))
        return out

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, counter={self.counter})"
