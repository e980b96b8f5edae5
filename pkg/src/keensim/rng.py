"""Counter-based random streams.

Each (seed, run_index) pair keys an independent Philox stream, so paths are
reproducible independent of worker scheduling: the stream for a given run is
the same whether it executes first, last, or in another process.
"""

from __future__ import annotations

import numpy as np

__all__ = ["RngStream"]


class RngStream:
    """Deterministic stream keyed by (seed, run_index).

    Same pair -> identical sequence; different run_index -> statistically
    independent sequences (distinct 128-bit Philox keys).
    """

    def __init__(self, seed: int, run_index: int = 0):
        if not (0 <= seed < 2**64):
            raise ValueError("seed must fit in 64 bits")
        if not (0 <= run_index < 2**64):
            raise ValueError("run_index must fit in 64 bits")
        self.seed = seed
        self.run_index = run_index
        key = (int(seed) << 64) | int(run_index)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def draw_gaussian(self) -> float:
        return float(self._gen.standard_normal())

    def draw_uniform(self) -> float:
        return float(self._gen.random())

    def gaussians(self, n: int) -> np.ndarray:
        return self._gen.standard_normal(n)

    def uniforms(self, n: int) -> np.ndarray:
        return self._gen.random(n)
