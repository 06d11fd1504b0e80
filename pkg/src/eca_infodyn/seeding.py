"""Deterministic seed derivation and input generation.

Seeds are mixed with the splitmix64 finalizer, which is a bijection on
64-bit words; the index fields are packed into disjoint bit ranges before
mixing, so two distinct index tuples can never share a seed under one
master seed.  Random bits are drawn from ``numpy.random.PCG64.random_raw``,
whose output stream numpy keeps stable across releases (unlike the
higher-level ``Generator`` methods).
"""

from __future__ import annotations

import numpy as np

PRNG_ID = "numpy.random.PCG64.random_raw"
SEED_MIXER_ID = "splitmix64(splitmix64(master) ^ (rep | input<<8 | sym<<40))"

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, representative: int, input_index: int,
                symmetry_index: int = 0) -> int:
    """64-bit seed for one (representative, input, symmetry) task."""
    if not 0 <= representative < 256:
        raise ValueError(f"representative out of range: {representative}")
    if not 0 <= input_index < (1 << 32):
        raise ValueError(f"input_index out of range: {input_index}")
    if not 0 <= symmetry_index < 256:
        raise ValueError(f"symmetry_index out of range: {symmetry_index}")
    packed = representative | (input_index << 8) | (symmetry_index << 40)
    return splitmix64(splitmix64(master_seed & _MASK64) ^ packed)


class BitStream:
    """Thin wrapper over PCG64 raw output."""

    def __init__(self, seed: int):
        self._bitgen = np.random.PCG64(seed)

    def words(self, n: int) -> np.ndarray:
        return np.asarray(self._bitgen.random_raw(n), dtype=np.uint64)

    def bits(self, n: int) -> np.ndarray:
        words = self.words((n + 63) // 64)
        raw = words.astype("<u8").view(np.uint8)
        return np.unpackbits(raw, bitorder="little")[:n].copy()

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection on 64-bit words."""
        if bound < 1:
            raise ValueError("bound must be positive")
        limit = ((1 << 64) // bound) * bound
        while True:
            w = int(self.words(1)[0])
            if w < limit:
                return w % bound


def random_bits(width: int, seed: int) -> np.ndarray:
    return BitStream(seed).bits(width)


def random_positions(width: int, count: int, seed: int) -> np.ndarray:
    """``count`` distinct positions in ``range(width)``, partial Fisher-Yates."""
    if not 0 <= count <= width:
        raise ValueError(f"count must lie in [0, {width}], got {count}")
    stream = BitStream(seed)
    perm = list(range(width))
    for i in range(count):
        j = i + stream.below(width - i)
        perm[i], perm[j] = perm[j], perm[i]
    return np.array(sorted(perm[:count]), dtype=np.int64)
