"""Seeded standard-Gaussian innovation streams.

All generators in this package draw their innovations from a
:class:`NoiseSource`, which wraps a PCG64 bit generator so that the same
seed always yields the same draw sequence, bit for bit.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseSource:
    """Deterministic stream of i.i.d. N(0, 1) draws identified by a seed."""

    seed: int

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def rng(self) -> np.random.Generator:
        """Fresh generator positioned at the start of the stream."""
        return np.random.default_rng(np.uint64(self.seed))

    def gaussians(self, n: int) -> np.ndarray:
        """First ``n`` draws of the stream (restarts from the seed)."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        return self.rng().standard_normal(int(n))
