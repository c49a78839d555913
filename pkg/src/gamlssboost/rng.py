"""Seeded random streams that reproduce across platforms.

Bits come from numpy's PCG64 bit generator (seeded through SeedSequence),
whose raw output is fixed by the algorithm. The transforms to uniforms,
normals and permutations are spelled out here rather than delegated to
``numpy.random.Generator`` methods, whose streams numpy does not promise to
keep stable between releases.
"""
import numpy as np


class PortableRNG:
    def __init__(self, seed: int):
        self.seed = int(seed)
        self._bits = np.random.PCG64(np.random.SeedSequence(self.seed))

    def uniform(self, size, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        """Uniform draws on ``[low, high)`` from the top 53 bits of each word."""
        shape = (size,) if np.isscalar(size) else tuple(size)
        count = int(np.prod(shape))
        raw = self._bits.random_raw(count) if count else np.empty(0, dtype=np.uint64)
        u = (np.asarray(raw, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return (low + (high - low) * u).reshape(shape)

    def normal(self, size) -> np.ndarray:
        """Standard normals by the Box-Muller transform."""
        shape = (size,) if np.isscalar(size) else tuple(size)
        count = int(np.prod(shape))
        pairs = (count + 1) // 2
        u1 = 1.0 - self.uniform(pairs)  # (0, 1], keeps log finite
        u2 = self.uniform(pairs)
        radius = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * pairs)
        z[0::2] = radius * np.cos(2.0 * np.pi * u2)
        z[1::2] = radius * np.sin(2.0 * np.pi * u2)
        return z[:count].reshape(shape)

    def permutation(self, n: int) -> np.ndarray:
        return np.argsort(self.uniform(n), kind="stable")


def spawn_seeds(master_seed: int, count: int) -> list:
    """Independent 63-bit child seeds derived from ``master_seed``."""
    children = np.random.SeedSequence(int(master_seed)).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0] >> np.uint64(1)) for c in children]
