"""Deterministic 64-bit random streams.

The whole package draws randomness from a single primitive: a SplitMix64
sequence.  The same constants are used by the pure-Python `RandomStream`
below and by the compiled kernels in `_kernels`, so a trajectory simulated
step by step in Python is bit-identical to one produced by a kernel.

Per-trajectory seeds are derived by avalanche-mixing (master_seed, index),
which makes ensembles reproducible regardless of scheduling.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
STREAM_INIT = 0x6A09E667F3BCC909  # domain separator for trajectory streams
SEED_INIT = 0x71C72E5B0A1B2C3D  # domain separator for seed derivation

_INV_2_53 = 1.0 / (1 << 53)
_TWO_PI = 2.0 * math.pi


def splitmix64(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit avalanche permutation."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def derive_seed(master_seed: int, index: int) -> int:
    """Collision-resistant per-trajectory seed from (master_seed, index)."""
    h = splitmix64((master_seed & MASK64) ^ SEED_INIT)
    return splitmix64(h ^ splitmix64((index + 1) * GOLDEN & MASK64))


class RandomStream:
    """Single-owner SplitMix64 stream of uniforms and normals.

    Not thread-safe by design: exactly one consumer at a time.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = splitmix64((seed & MASK64) ^ STREAM_INIT)

    def next_uniform(self) -> float:
        """Uniform draw on [0, 1) with 53 random bits."""
        self._state = (self._state + GOLDEN) & MASK64
        return (splitmix64(self._state) >> 11) * _INV_2_53

    def next_normal(self, mean: float = 0.0, stddev: float = 1.0) -> float:
        # Box-Muller, cosine branch only: two uniforms per normal keeps
        # the decision stream identical between Python and the kernels.
        u1 = self.next_uniform()
        u2 = self.next_uniform()
        z = math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(_TWO_PI * u2)
        return mean + stddev * z
