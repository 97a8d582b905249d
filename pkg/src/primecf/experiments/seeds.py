"""Counter-based derivation of per-trajectory seeds."""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finaliser: a bijection on 64-bit integers."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed of trajectory ``index`` under ``master_seed``.

    mix64(mix64(master) + (index + 1) * golden) modulo 2^64; injective in
    ``index`` below 2^64 because the golden constant is odd and mix64 is a bijection.
    """
    base = mix64(int(master_seed) & _MASK)
    return mix64((base + (int(index) + 1) * _GOLDEN) & _MASK)
