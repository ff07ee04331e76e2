"""Deterministic random source.

Every stochastic choice in the package (weight init, batch shuffling,
dropout masks) draws from :class:`RandomSource`, which produces the
SplitMix64 stream (Steele, Lea & Flood 2014) in counter mode:

    out[n] = mix64(seed + n * 0x9E3779B97F4A7C15)    for n = 1, 2, 3, ...

where ``mix64`` is the published two-round xor/multiply finalizer. The
stream depends only on (seed, draw index), so equal seeds give bitwise
equal sequences on every platform, and the generator state is fully
described by the number of 64-bit words drawn so far.

Uniform doubles take the top 53 bits: ``(out >> 11) * 2**-53``.
Permutations are the stable argsort of n fresh uniform keys.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidRangeError

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = float(2.0**-53)

ALGORITHM = "splitmix64-counter"


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


class RandomSource:
    """Seeded deterministic stream of uniform draws.

    A RandomSource is single-owner: never share one instance between
    concurrent tasks. ``draws`` counts 64-bit words consumed, which
    together with ``seed`` pins the stream position exactly.
    """

    algorithm = ALGORITHM

    def __init__(self, seed: int):
        if not 0 <= int(seed) < 2**64:
            raise InvalidRangeError(f"seed must fit in 64 unsigned bits, got {seed}")
        self.seed = int(seed)
        self._seed_u64 = np.uint64(seed)
        self.draws = 0

    def __repr__(self):
        return f"RandomSource(algorithm={self.algorithm!r}, seed={self.seed}, draws={self.draws})"

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit words as a uint64 array."""
        if n < 0:
            raise InvalidRangeError(f"draw count must be >= 0, got {n}")
        idx = np.arange(self.draws + 1, self.draws + n + 1, dtype=np.uint64)
        self.draws += n
        with np.errstate(over="ignore"):
            return _mix64(self._seed_u64 + idx * _GOLDEN)

    def uniform(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        """``n`` doubles in [lo, hi)."""
        if not lo < hi:
            raise InvalidRangeError(f"uniform requires lo < hi, got [{lo}, {hi})")
        u = (self.raw(n) >> _S11).astype(np.float64) * _INV53
        if lo == 0.0 and hi == 1.0:
            return u
        vals = lo + u * (hi - lo)
        # rounding at u close to 1 may touch hi; keep the half-open contract
        return np.minimum(vals, np.nextafter(hi, lo))

    def permutation(self, n: int) -> np.ndarray:
        """A permutation of range(n): stable argsort of n fresh keys."""
        if n < 0:
            raise InvalidRangeError(f"permutation length must be >= 0, got {n}")
        return np.argsort(self.uniform(n), kind="stable")

    def spawn(self, tag: int) -> "RandomSource":
        """Independent child stream for parallel sweep cells.

        Child seed = mix64(seed XOR mix64(tag+1)), so distinct tags give
        unrelated streams while staying reproducible from the parent seed.
        """
        with np.errstate(over="ignore"):
            t = _mix64(np.uint64([tag + 1]))[0]
            child = _mix64(np.uint64([self._seed_u64 ^ t]))[0]
        return RandomSource(int(child))
