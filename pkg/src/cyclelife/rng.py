"""Deterministic pseudo-randomness built on a splitmix64 recurrence.

Every seeded draw in the package flows through this module so that runs
agree bit-for-bit across platforms and worker counts.  The generator is
the splitmix64 recurrence: the state advances by a fixed odd constant
(GOLDEN) and each output is a finalizer over the new state:

    state <- (state + GOLDEN) mod 2**64
    z <- state
    z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2**64)
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB   (mod 2**64)
    output <- z ^ (z >> 31)

Because the state is a counter, output i equals mix64(seed + (i+1)*GOLDEN),
so the vectorised stream helpers produce exactly the sequential outputs.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

_U53_INV = 2.0 ** -53


def mix64(z: int) -> int:
    """splitmix64 finalizer over one 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *parts: int) -> int:
    """Fold integer labels into a fresh 64-bit seed.

    Used to give independent deterministic streams to sub-tasks
    (per tree, per repeat, per epoch) regardless of execution order.
    """
    h = mix64(seed)
    for p in parts:
        h = mix64(((h ^ (p & MASK64)) + GOLDEN) & MASK64)
    return h


def stream_u64(seed: int, n: int) -> np.ndarray:
    """First n raw outputs of SplitMix64(seed), computed vectorised."""
    idx = np.arange(1, n + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def uniform_stream(seed: int, n: int) -> np.ndarray:
    """n uniforms in [0, 1), one per raw output (53-bit mantissa)."""
    return (stream_u64(seed, n) >> np.uint64(11)).astype(np.float64) * _U53_INV


def normal_stream(seed: int, n: int) -> np.ndarray:
    """n standard normals via Box-Muller; consumes 2n raw outputs."""
    raw = stream_u64(seed, 2 * n)
    u1 = ((raw[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * _U53_INV
    u2 = (raw[1::2] >> np.uint64(11)).astype(np.float64) * _U53_INV
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


class SplitMix64:
    """Sequential splitmix64 generator with the draw helpers used here."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def uniform(self) -> float:
        """Uniform in [0, 1)."""
        return (self.next_u64() >> 11) * _U53_INV

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def below(self, n: int) -> int:
        """Integer in [0, n), via the multiply-shift bound trick."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi] inclusive."""
        return lo + self.below(hi - lo + 1)

    def normal(self) -> float:
        """Standard normal via Box-Muller; two raw draws, no caching."""
        u1 = ((self.next_u64() >> 11) + 1) * _U53_INV
        u2 = (self.next_u64() >> 11) * _U53_INV
        return float(np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2))

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> np.ndarray:
        idx = list(range(n))
        self.shuffle(idx)
        return np.asarray(idx, dtype=np.int64)

    def sample_without_replacement(self, n: int, k: int) -> np.ndarray:
        """k distinct indices from range(n), partial Fisher-Yates order."""
        if k > n:
            raise ValueError("k exceeds population size")
        idx = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return np.asarray(idx[:k], dtype=np.int64)
