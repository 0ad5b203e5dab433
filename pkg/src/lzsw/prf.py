"""Deterministic randomness utilities.

Two primitives are used everywhere and are fixed so that seeded runs are
portable across machines:

* ``splitmix64`` -- the 64-bit finalizer of Steele, Lea and Flood's
  SplitMix generator.  It is used as a keyed mixing function: derived
  seeds and bin assignments are pure functions of the user seed.
* numpy's PCG64 bit generator, keyed by a ``splitmix64``-derived seed,
  for sampling (uniform symbols, Markov chains, permutations).
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 step: add the golden-ratio increment, then finalize."""
    x = (x + _GAMMA) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix(*values: int) -> int:
    """Fold integers into a single 64-bit hash, order sensitive."""
    h = 0x5555555555555555
    for v in values:
        h = splitmix64((h ^ (v & _MASK64)) & _MASK64)
        v >>= 64
        while v:
            h = splitmix64((h ^ (v & _MASK64)) & _MASK64)
            v >>= 64
    return h


def derive_seed(seed: int, *tags: int) -> int:
    """Derive an independent child seed from a user seed and integer tags."""
    return mix(seed, *tags)


def generator(seed: int, *tags: int) -> np.random.Generator:
    """PCG64 generator keyed by ``derive_seed(seed, *tags)``."""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *tags)))


def splitmix64_array(values: np.ndarray) -> np.ndarray:
    """Vectorized ``splitmix64`` over a uint64 array."""
    x = (values + np.uint64(_GAMMA)).astype(np.uint64)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))
