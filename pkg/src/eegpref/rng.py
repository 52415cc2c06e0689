"""Deterministic pseudo-random number generation.

Every seeded operation in this package draws from SplitMix64 so that a
given seed produces the identical stream on every platform and run. The
generator is fixed on purpose: "same seed, same output" is a contract,
not an accident of whatever the host runtime ships.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class Rng64:
    """SplitMix64 generator plus the few derived draws the pipeline needs.

    Instances are sequential state: never share one between concurrent
    tasks. Parallel work must derive independent generators from distinct
    seeds (e.g. seed + stream index) instead of sharing a stream.
    """

    __slots__ = ("_state", "_spare_normal")

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64
        self._spare_normal: float | None = None

    @property
    def state(self) -> int:
        return self._state

    def next_u64(self) -> int:
        """Next raw 64-bit output."""
        self._state = (self._state + _GOLDEN_GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform float in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), rejection-free (multiply-shift)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        return (self.next_u64() * n) >> 64

    def normal(self) -> float:
        """Standard normal draw (Box-Muller; the spare is cached)."""
        if self._spare_normal is not None:
            value, self._spare_normal = self._spare_normal, None
            return value
        u1 = 1.0 - self.uniform()  # (0, 1]: keeps the log finite
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        self._spare_normal = radius * math.sin(2.0 * math.pi * u2)
        return radius * math.cos(2.0 * math.pi * u2)

    def normals(self, count: int) -> list[float]:
        return [self.normal() for _ in range(count)]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
