"""Deterministic 64-bit PRNG used by the corpus generator.

SplitMix64: state advances by 0x9E3779B97F4A7C15 per draw; the output is
the mixed state

    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

all arithmetic modulo 2**64.  The algorithm is documented here so the
generated corpora are reproducible from the seed alone; identical seeds
produce identical corpora.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

_MASK = 0xFFFFFFFFFFFFFFFF
T = TypeVar("T")


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        """Unbiased draw from [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (2**64 // n) * n
        while True:
            draw = self.next_u64()
            if draw < limit:
                return draw % n

    def randint(self, lo: int, hi: int) -> int:
        """Inclusive draw from [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.randrange(hi - lo + 1)

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.randrange(len(seq))]

    def weighted_choice(self, items: Sequence[T], weights: Sequence[int]) -> T:
        total = sum(weights)
        pick = self.randrange(total)
        for item, weight in zip(items, weights):
            if pick < weight:
                return item
            pick -= weight
        raise AssertionError("unreachable")
