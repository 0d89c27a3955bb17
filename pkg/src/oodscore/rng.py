"""Deterministic pseudo-random generator with a pinned algorithm.

The generator is xoshiro256++ seeded through splitmix64, so identical seeds
produce identical streams on every platform and Python version. The exact
recipe, which downstream reimplementations must follow bit for bit:

Seeding: starting from the u64 seed, four splitmix64 steps produce the state
``s0..s3``. One splitmix64 step is

    z = (x + 0x9E3779B97F4A7C15) mod 2^64        (x is the running state)
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output z ^ (z >> 31)

Output: ``rotl(s0 + s3, 23) + s0`` (mod 2^64), then the state update

    t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t
    s3 = rotl(s3, 45)

Derived draws:
  * ``uniform()``   takes the top 53 bits: ``(u64 >> 11) * 2.0**-53``.
  * ``below(n)``    multiply-shift: ``(u64 * n) >> 64``.
  * ``gaussian()``  Marsaglia polar on uniform pairs; the spare is cached
    and served next, so gaussians are consumed in generated order.
"""

import math

_MASK = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


def _splitmix64(x: int):
    """One splitmix64 step: returns (new_state, output)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return x, z ^ (z >> 31)


class Rng:
    """xoshiro256++ stream addressed by a single u64 seed."""

    def __init__(self, seed: int):
        seed = int(seed) & _MASK
        state = []
        x = seed
        for _ in range(4):
            x, out = _splitmix64(x)
            state.append(out)
        self._s = state
        self._spare = None

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[0] + s[3]) & _MASK, 23) + s[0]) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, n: int) -> int:
        """Integer in [0, n) via the multiply-shift reduction."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        return (self.next_u64() * n) >> 64

    def gaussian(self, mean: float = 0.0, sigma: float = 1.0) -> float:
        """Standard normal draw scaled to (mean, sigma), Marsaglia polar."""
        if self._spare is not None:
            z = self._spare
            self._spare = None
            return mean + sigma * z
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                break
        scale = math.sqrt(-2.0 * math.log(s) / s)
        self._spare = v * scale
        return mean + sigma * (u * scale)

    def gaussians(self, count: int, mean: float = 0.0, sigma: float = 1.0):
        """List of `count` gaussian draws in stream order."""
        return [self.gaussian(mean, sigma) for _ in range(count)]
