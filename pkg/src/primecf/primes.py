"""Prime machinery: a bit-packed segmented sieve over odd integers plus the
number-theoretic helpers the rest of the package needs.

Only odd numbers are stored; bit ``i`` of the packed array flags ``2*i + 1``
(little bit order within each byte).  Cumulative counts of odd primes are kept
at fixed block boundaries so that ``pi`` and ``nth_prime`` never unpack more
than one block.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numba
import numpy as np

from .errors import DomainError

__all__ = [
    "PrimeTable",
    "DigitClass",
    "build_table",
    "default_table",
    "is_probable_prime",
    "totient",
    "residue_of_prime",
    "prime_digit_class",
    "almost_prime_class",
    "DEFAULT_SIEVE_BOUND",
]

DEFAULT_SIEVE_BOUND = 10**8

BLOCK_BYTES = 64
BLOCK_ODDS = BLOCK_BYTES * 8
_SEGMENT_ODDS = 1 << 22

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)

# Deterministic for n < 3.3e24 (Sorenson & Webster); every digit we can sample is far below.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with the first 13 prime bases.

    Deterministic below 3.3e24; beyond that a strong probable-prime test.
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def _sieve_odd_bits(bound: int) -> np.ndarray:
    n_odds = (bound + 1) // 2
    n_bytes = -(-n_odds // 8)
    n_bytes = -(-n_bytes // BLOCK_BYTES) * BLOCK_BYTES
    packed = np.zeros(n_bytes, dtype=np.uint8)
    base = _simple_sieve(math.isqrt(bound))[1:]  # odd base primes
    for i0 in range(0, n_odds, _SEGMENT_ODDS):
        i1 = min(i0 + _SEGMENT_ODDS, n_odds)
        seg = np.ones(i1 - i0, dtype=bool)
        lo = 2 * i0 + 1
        for p in base:
            p = int(p)
            start = max(p * p, -(-lo // p) * p)
            if start % 2 == 0:
                start += p
            j = (start - 1) // 2 - i0
            if j >= seg.size:
                continue
            seg[j::p] = False
        if i0 == 0:
            seg[0] = False  # 1 is not prime
        packed[i0 // 8 : i0 // 8 + -(-seg.size // 8)] = np.packbits(seg, bitorder="little")
    # clear padding bits past the bound
    tail = np.unpackbits(packed[n_odds // 8 :], bitorder="little")
    tail[n_odds % 8 :] = 0
    packed[n_odds // 8 :] = np.packbits(tail, bitorder="little")
    return packed


@numba.njit(cache=True)
def _mulmod(a, b, m):
    if m < 2147483648:
        return (a * b) % m
    r = 0
    a %= m
    b %= m
    while b > 0:
        if b & 1:
            r = (r + a) % m
        a = (a + a) % m
        b >>= 1
    return r


@numba.njit(cache=True)
def _powmod(a, e, m):
    r = 1
    a %= m
    while e > 0:
        if e & 1:
            r = _mulmod(r, a, m)
        a = _mulmod(a, a, m)
        e >>= 1
    return r


@numba.njit(cache=True)
def _miller_rabin(n):
    # n odd, n > 41, n < 2**62
    bases = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in bases:
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        x = _powmod(a, d, n)
        if x == 1 or x == n - 1:
            continue
        composite = True
        for _ in range(s - 1):
            x = _mulmod(x, x, n)
            if x == n - 1:
                composite = False
                break
        if composite:
            return False
    return True


@numba.njit(cache=True, nogil=True)
def _is_prime_bits(n, bits, bound):
    if n < 2:
        return False
    if n == 2:
        return True
    if n % 2 == 0:
        return False
    if n <= bound:
        i = n >> 1
        return (bits[i >> 3] >> (i & 7)) & 1 == 1
    return _miller_rabin(n)


@numba.njit(cache=True, nogil=True)
def prime_part(digits, bits, bound, out):
    """Write ``d if d is prime else 0`` for each digit into ``out``."""
    for i in range(digits.size):
        d = digits[i]
        out[i] = d if _is_prime_bits(d, bits, bound) else 0
    return out


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Immutable sieve up to ``bound``; safe to share between threads.

    ``bits`` packs primality flags of odd numbers, ``block_counts[b]`` is the
    number of odd primes below odd-index ``b * BLOCK_ODDS``.
    """

    bound: int
    bits: np.ndarray
    block_counts: np.ndarray

    @property
    def nbytes(self) -> int:
        return self.bits.nbytes + self.block_counts.nbytes

    def _check(self, x: int, what: str) -> None:
        if x > self.bound:
            raise DomainError(f"{what}={x} exceeds sieve bound {self.bound}")

    def is_prime(self, n: int) -> bool:
        """Primality for any positive integer; Miller-Rabin beyond the sieve."""
        n = int(n)
        if n <= self.bound:
            if n < 2:
                return False
            if n == 2:
                return True
            if n % 2 == 0:
                return False
            i = n >> 1
            return bool((int(self.bits[i >> 3]) >> (i & 7)) & 1)
        return is_probable_prime(n)

    def prime_part(self, digits) -> np.ndarray:
        """Vectorised ``a'``: keep prime entries, zero the rest."""
        digits = np.ascontiguousarray(digits, dtype=np.int64)
        return prime_part(digits, self.bits, self.bound, np.empty_like(digits))

    def pi(self, x: int) -> int:
        """Number of primes <= x."""
        x = int(x)
        self._check(x, "x")
        if x < 2:
            return 0
        i_max = (x - 1) // 2
        block = i_max // BLOCK_ODDS
        start = block * BLOCK_BYTES
        chunk = np.unpackbits(self.bits[start : (i_max >> 3) + 1], bitorder="little")
        return 1 + int(self.block_counts[block]) + int(chunk[: i_max - block * BLOCK_ODDS + 1].sum())

    def count_primes_in_interval(self, lo: int, hi: int) -> int:
        """Number of primes p with lo < p <= hi."""
        if lo > hi:
            raise DomainError(f"empty interval: lo={lo} > hi={hi}")
        self._check(hi, "hi")
        return self.pi(hi) - self.pi(max(int(lo), 0))

    def nth_prime(self, n: int) -> int:
        """The n-th prime, with nth_prime(1) == 2."""
        n = int(n)
        if n < 1:
            raise DomainError(f"prime index must be >= 1, got {n}")
        if n == 1:
            return 2
        target = n - 1  # wanted count of odd primes
        block = int(np.searchsorted(self.block_counts, target, side="left")) - 1
        chunk = np.unpackbits(self.bits[block * BLOCK_BYTES : (block + 1) * BLOCK_BYTES], bitorder="little")
        need = target - int(self.block_counts[block])
        ones = np.flatnonzero(chunk)
        if block < 0 or need > ones.size:
            raise DomainError(f"the {n}-th prime exceeds sieve bound {self.bound}")
        return 2 * (block * BLOCK_ODDS + int(ones[need - 1])) + 1

    def primes_upto(self, x: int | None = None) -> np.ndarray:
        """All primes <= x (default: the whole sieve) as int64."""
        x = self.bound if x is None else int(x)
        self._check(x, "x")
        if x < 2:
            return np.empty(0, dtype=np.int64)
        i_max = (x - 1) // 2
        flags = np.unpackbits(self.bits[: (i_max >> 3) + 1], bitorder="little")[: i_max + 1]
        odd = 2 * np.flatnonzero(flags).astype(np.int64) + 1
        return np.concatenate(([2], odd))


def build_table(bound: int = DEFAULT_SIEVE_BOUND) -> PrimeTable:
    """Sieve all primes up to ``bound`` (segmented; one bit per odd number)."""
    bound = int(bound)
    if bound < 2:
        raise DomainError(f"sieve bound must be >= 2, got {bound}")
    bits = _sieve_odd_bits(bound)
    per_block = _POPCOUNT[bits].reshape(-1, BLOCK_BYTES).sum(axis=1, dtype=np.int64)
    counts = np.zeros(per_block.size, dtype=np.uint32)
    np.cumsum(per_block[:-1], out=counts[1:])
    bits.flags.writeable = False
    counts.flags.writeable = False
    return PrimeTable(bound=bound, bits=bits, block_counts=counts)


@functools.lru_cache(maxsize=4)
def default_table(bound: int = DEFAULT_SIEVE_BOUND) -> PrimeTable:
    """Process-wide cached table."""
    return build_table(bound)


def totient(m: int) -> int:
    """Euler's totient by trial factorisation."""
    m = int(m)
    if m < 1:
        raise DomainError(f"totient needs m >= 1, got {m}")
    result, rest, p = m, m, 2
    while p * p <= rest:
        if rest % p == 0:
            while rest % p == 0:
                rest //= p
            result -= result // p
        p += 1
    if rest > 1:
        result -= result // rest
    return result


def residue_of_prime(p: int, m: int) -> int:
    """Residue class of a prime p > m modulo m (always coprime to m)."""
    if m < 2:
        raise DomainError(f"modulus must be >= 2, got {m}")
    if p <= m:
        raise DomainError(f"residue marks need p > m, got p={p}, m={m}")
    if not is_probable_prime(p):
        raise DomainError(f"{p} is not prime")
    return p % m


def _big_omega(n: int) -> int:
    count, p = 0, 2
    while p * p <= n:
        while n % p == 0:
            n //= p
            count += 1
        p += 1
    return count + (n > 1)


@dataclass(frozen=True)
class DigitClass:
    """A labelled set of positive integers used to select digits."""

    label: str
    predicate: Callable[[int], bool]

    def __contains__(self, n: int) -> bool:
        return bool(self.predicate(int(n)))

    def mask(self, digits) -> np.ndarray:
        return np.fromiter((self.predicate(int(d)) for d in digits), dtype=bool, count=len(digits))


def prime_digit_class(table: PrimeTable | None = None) -> DigitClass:
    """The default class: prime digits."""
    if table is None:
        return DigitClass("prime", is_probable_prime)
    return DigitClass("prime", table.is_prime)


def almost_prime_class(k: int) -> DigitClass:
    """Integers with exactly k prime factors counted with multiplicity.

    Only empirical statistics are available for these classes.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return DigitClass(f"{k}-almost-prime", lambda n: n >= 2 and _big_omega(n) == k)
