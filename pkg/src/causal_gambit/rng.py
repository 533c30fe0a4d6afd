"""Seeded random streams.

Every stochastic operation takes an explicit :class:`RngStream`. The stream is
numpy's PCG64 bit generator (a 128-bit permuted congruential generator whose
state transition is fixed and platform independent) wrapped in a
``numpy.random.Generator``.
"""

from __future__ import annotations

import numpy as np

_MAX_SEED = 2**64


class RngStream:
    """A named, seeded PCG64 stream. Same seed, same draws."""

    algorithm = "PCG64"

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < _MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.generator = np.random.Generator(np.random.PCG64(seed))

    def __repr__(self):
        return f"RngStream(seed={self.seed})"

    def random(self) -> float:
        return float(self.generator.random())

    def integers(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        return int(self.generator.integers(n))

    def uniform(self, lo: float, hi: float, size=None):
        return self.generator.uniform(lo, hi, size)

    def gamma(self, shape) -> np.ndarray:
        """Unit-scale gamma variates with the given shape parameters."""
        return self.generator.standard_gamma(shape)

    def categorical(self, p) -> int:
        """Inverse-CDF draw of one state index from probability vector ``p``.

        States with zero probability are never returned.
        """
        cdf = np.cumsum(p)
        u = self.generator.random() * cdf[-1]
        return int(min(np.searchsorted(cdf, u, side="right"), len(cdf) - 1))
