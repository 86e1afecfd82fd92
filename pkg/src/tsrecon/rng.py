"""Seeded pseudo-random generator with a pinned algorithm.

Everything stochastic in this package draws from :class:`SplitMix64` so a
seed fixes the byte-for-byte outcome of a run. The generator is SplitMix64
(Steele, Lea, Flood 2014; the same finalizer as Java's SplittableRandom),
chosen because the update is a single 64-bit add and the output is a pure
function of the state, which makes scalar and vectorized draws provably
identical and the integer stream reproducible in any language with 64-bit
words.

Derived streams, all documented so they can be re-implemented elsewhere:

* ``uniform``: top 53 bits of the next word, scaled by 2**-53 -> [0, 1).
* ``normal``: Box-Muller on uniform pairs (u1, u2); each pair yields
  r*cos(2*pi*u2) then r*sin(2*pi*u2) with r = sqrt(-2*log1p(-u1)); the
  second value is cached and emitted before a new pair is drawn.
* ``randbelow``: rejection sampling on raw words, so no modulo bias.
* ``permutation`` / ``sample_without_replacement``: stable argsort of one
  uniform per element (a random uniform key per index).

The integer stream is bit-exact on every platform. The float transforms
round through IEEE-754 float64 and inherit the platform libm's cos/sin/log,
which in practice agree to the last bit on mainstream toolchains; the unit
tests pin concrete values to catch any drift.
"""

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TO_UNIT = 2.0 ** -53


class SplitMix64:
    """Deterministic generator; every instance is independent given its seed."""

    def __init__(self, seed: int):
        if not isinstance(seed, int):
            raise ValueError(f"seed must be an int, got {type(seed).__name__}")
        self._state = seed & _MASK64
        self._spare_normal: float | None = None

    def u64_block(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit words as a uint64 array."""
        if n < 0:
            raise ValueError("n must be non-negative")
        steps = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(self._state) + steps * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        self._state = (self._state + n * _GAMMA) & _MASK64
        return z

    def next_u64(self) -> int:
        return int(self.u64_block(1)[0])

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` float64 draws from [0, 1)."""
        return (self.u64_block(n) >> np.uint64(11)).astype(np.float64) * _TO_UNIT

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    def normals(self, n: int) -> np.ndarray:
        """``n`` float64 draws from the standard normal distribution."""
        if n < 0:
            raise ValueError("n must be non-negative")
        out = np.empty(n, dtype=np.float64)
        k = 0
        if self._spare_normal is not None and n > 0:
            out[0] = self._spare_normal
            self._spare_normal = None
            k = 1
        pairs = (n - k + 1) // 2
        if pairs > 0:
            u = self.uniforms(2 * pairs)
            r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
            angle = 2.0 * math.pi * u[1::2]
            z0 = r * np.cos(angle)
            z1 = r * np.sin(angle)
            need = n - k
            interleaved = np.empty(2 * pairs, dtype=np.float64)
            interleaved[0::2] = z0
            interleaved[1::2] = z1
            out[k:] = interleaved[:need]
            if 2 * pairs > need:
                self._spare_normal = float(interleaved[need])
        return out

    def normal(self) -> float:
        return float(self.normals(1)[0])

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection; no modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            word = self.next_u64()
            if word < limit:
                return word % n

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of range(n): stable argsort of uniform keys."""
        if n < 0:
            raise ValueError("n must be non-negative")
        return np.argsort(self.uniforms(n), kind="stable")

    def sample_without_replacement(self, n: int, k: int) -> np.ndarray:
        """``k`` distinct indices from range(n), order random."""
        if not 0 <= k <= n:
            raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
        return self.permutation(n)[:k]
