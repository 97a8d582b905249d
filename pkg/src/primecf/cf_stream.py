"""Continued-fraction digit sources.

Three backends share one iterator interface:

* ``RationalSource``: Euclid on an exact rational; finite.
* ``LazyRealSource``: exact digits of a uniformly random real whose binary
  expansion is revealed one bit at a time.  The current tail ``x_n`` is kept
  as a Moebius transform of the dyadic interval that pins ``u``.
* ``NaturalExtensionSource``: exact in distribution.  Given the continuant
  ratio ``r = q_{n-1}/q_n``, the next Gauss-map iterate has conditional CDF
  ``F(s) = (1+r)s/(1+rs)``, so ``s = V/(1+r-rV)`` with V uniform and the digit
  is ``floor(1/s) = floor((1+r-rV)/V)``; then ``r <- 1/(k+r)``.

``NaturalExtensionBatch`` runs several independent chains ("lanes") in one
interleaved loop; each lane reproduces ``NaturalExtensionSource`` with the
same seed bit for bit.

Digits follow the cylinder convention ``I_k = (1/(k+1), 1/k]``, i.e.
``a(x) = floor(1/x)`` and ``a(1/2) = 2``.
"""

from __future__ import annotations

import math
import random
from math import gcd
from typing import Iterable, Iterator

import numba
import numpy as np

from .errors import DomainError, RefinementLimitError

__all__ = [
    "BACKENDS",
    "INITIAL_LAWS",
    "BitStream",
    "DigitSource",
    "RationalSource",
    "LazyRealSource",
    "NaturalExtensionSource",
    "NaturalExtensionBatch",
    "SourceBatch",
    "make_batch",
    "digits_of_rational",
    "make_source",
    "sample_trajectory",
    "iter_digit_chunks",
    "prime_digit_value",
    "cross_validate_sources",
    "ne_step",
    "gauss_initial_ratio",
]

BACKENDS = ("natural-extension", "lazy-real", "exact-rational")
INITIAL_LAWS = ("lebesgue", "gauss")
DEFAULT_REFINEMENT_BUDGET = 4096
CHUNK = 1 << 16


def digits_of_rational(numerator: int, denominator: int, max_digits: int | None = None) -> list[int]:
    """Exact CF digits of numerator/denominator in (0, 1]."""
    return list(RationalSource(numerator, denominator).take(max_digits))


def ne_step(r: float, v: float) -> tuple[int, float]:
    """One natural-extension transition from ratio ``r`` with uniform ``v`` in (0, 1].

    Returns the emitted digit and the updated ratio ``1/(k + r)``.
    """
    k = math.floor((1.0 + r - r * v) / v)
    return k, 1.0 / (k + r)


def gauss_initial_ratio(w: float) -> float:
    """Ratio with Gauss density 1/(log2 (1+r)) from a uniform w: 2**w - 1."""
    return 2.0**w - 1.0


# Both kernels must stay operation-for-operation identical to ne_step.
@numba.njit(cache=True, nogil=True)
def _ne_fill(uniforms, r, out):
    for i in range(uniforms.size):
        v = 1.0 - uniforms[i]
        k = math.floor((1.0 + r - r * v) / v)
        out[i] = k
        r = 1.0 / (k + r)
    return r


@numba.njit(cache=True, nogil=True)
def _ne_fill_lanes(uniforms, r, out):
    # lanes are interleaved so the dependent divisions of different chains overlap
    lanes, m = uniforms.shape
    for i in range(m):
        for j in range(lanes):
            v = 1.0 - uniforms[j, i]
            k = math.floor((1.0 + r[j] - r[j] * v) / v)
            out[j, i] = k
            r[j] = 1.0 / (k + r[j])


class DigitSource:
    """Common iterator surface: ``next_digit``, ``next_chunk``, ``take``."""

    position: int = 0

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        return self.next_digit()

    def next_digit(self) -> int:
        raise NotImplementedError

    def next_chunk(self, m: int) -> np.ndarray:
        """Up to ``m`` further digits (fewer only if the source is exhausted)."""
        out = []
        for _ in range(m):
            try:
                out.append(self.next_digit())
            except StopIteration:
                break
        return np.array(out, dtype=np.int64)

    def take(self, m: int | None) -> Iterator[int]:
        count = 0
        while m is None or count < m:
            try:
                yield self.next_digit()
            except StopIteration:
                return
            count += 1


class RationalSource(DigitSource):
    """Euclidean digit extraction for numerator/denominator in (0, 1]."""

    def __init__(self, numerator: int, denominator: int):
        numerator, denominator = int(numerator), int(denominator)
        if denominator == 0:
            raise DomainError("zero denominator")
        if not 0 < numerator <= denominator:
            raise DomainError(f"need 0 < numerator <= denominator, got {numerator}/{denominator}")
        g = gcd(numerator, denominator)
        self.numerator, self.denominator = numerator // g, denominator // g
        self._p, self._q = self.numerator, self.denominator
        self.position = 0

    def next_digit(self) -> int:
        if self._p == 0:
            raise StopIteration
        k, rem = divmod(self._q, self._p)
        self._p, self._q = rem, self._p
        self.position += 1
        return k


class BitStream:
    """Deterministic bit stream: 32-bit Mersenne Twister words, MSB first."""

    def __init__(self, seed: int):
        self._rng = random.Random(seed)
        self._word = 0
        self._left = 0

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        if self._left == 0:
            self._word = self._rng.getrandbits(32)
            self._left = 32
        self._left -= 1
        return (self._word >> self._left) & 1

    def take(self, n: int) -> int:
        """The next n bits as an integer, first bit most significant."""
        value = 0
        for _ in range(n):
            value = (value << 1) | next(self)
        return value


class LazyRealSource(DigitSource):
    """Exact digits of u in (0,1) revealed by a bit stream.

    ``u`` is only known to lie in ``[m/2^j, (m+1)/2^j)``; the current tail is
    ``x_n = (a*u + b)/(c*u + d)``.  A digit is emitted once ``floor(1/x_n)``
    is the same for every u in the half-open interval; ``budget`` caps the
    bits spent resolving a single digit.
    """

    def __init__(self, bits: Iterable[int] | int, budget: int = DEFAULT_REFINEMENT_BUDGET):
        self._bits = BitStream(bits) if isinstance(bits, int) else iter(bits)
        self.budget = int(budget)
        self.m, self.j = 0, 0
        self.matrix = (1, 0, 0, 1)
        self.position = 0

    def _resolve(self) -> int | None:
        a, b, c, d = self.matrix
        D = 1 << self.j
        lo_num, lo_den = a * self.m + b * D, c * self.m + d * D
        hi_num, hi_den = lo_num + a, lo_den + c
        # x must stay strictly positive and finite across the whole interval;
        # numerator and denominator are linear in u, so equal signs at both ends suffice
        if lo_num == 0 or hi_num == 0 or lo_den == 0 or hi_den == 0:
            return None
        if not ((lo_num > 0) == (hi_num > 0) == (lo_den > 0) == (hi_den > 0)):
            return None
        # X = 1/x = den/num; normalise signs
        if lo_num < 0:
            lo_num, lo_den = -lo_num, -lo_den
        if hi_num < 0:
            hi_num, hi_den = -hi_num, -hi_den
        k = lo_den // lo_num
        if k < 1:
            return None
        # closed at u=lo, open at u=hi: need k <= X(hi) <= k+1
        if k * hi_num <= hi_den <= (k + 1) * hi_num:
            return k
        return None

    def next_digit(self) -> int:
        spent = 0
        while True:
            k = self._resolve()
            if k is not None:
                a, b, c, d = self.matrix
                self.matrix = (c - k * a, d - k * b, a, b)
                self.position += 1
                return k
            if spent >= self.budget:
                raise RefinementLimitError(
                    f"digit {self.position + 1} unresolved after {spent} bits (budget {self.budget})"
                )
            try:
                bit = next(self._bits)
            except StopIteration:
                raise RefinementLimitError(f"bit stream exhausted at digit {self.position + 1}") from None
            self.m = 2 * self.m + bit
            self.j += 1
            spent += 1


class NaturalExtensionSource(DigitSource):
    """Stationary-in-distribution digit sampler driven by PCG64 uniforms."""

    def __init__(self, seed: int, initial_law: str = "lebesgue"):
        if initial_law not in INITIAL_LAWS:
            raise DomainError(f"initial law must be one of {INITIAL_LAWS}, got {initial_law!r}")
        self.seed = int(seed)
        self.initial_law = initial_law
        self._rng = np.random.Generator(np.random.PCG64(self.seed))
        self.r = gauss_initial_ratio(self._rng.random()) if initial_law == "gauss" else 0.0
        self._buf = np.empty(CHUNK)
        self._pos = CHUNK
        self.position = 0

    def _refill(self) -> None:
        self._rng.random(out=self._buf)
        self._pos = 0

    def next_digit(self) -> int:
        if self._pos == CHUNK:
            self._refill()
        u = float(self._buf[self._pos])
        self._pos += 1
        k, self.r = ne_step(self.r, 1.0 - u)
        self.position += 1
        return k

    def next_chunk(self, m: int) -> np.ndarray:
        out = np.empty(m, dtype=np.int64)
        done = 0
        while done < m:
            if self._pos == CHUNK:
                self._refill()
            take = min(m - done, CHUNK - self._pos)
            self.r = _ne_fill(self._buf[self._pos : self._pos + take], self.r, out[done : done + take])
            self._pos += take
            done += take
        self.position += m
        return out


class NaturalExtensionBatch:
    """Several independent natural-extension chains advanced together.

    Lane ``j`` consumes the same uniforms in the same order as
    ``NaturalExtensionSource(seeds[j], initial_law)``, so its digits coincide.
    """

    def __init__(self, seeds: Iterable[int], initial_law: str = "lebesgue"):
        if initial_law not in INITIAL_LAWS:
            raise DomainError(f"initial law must be one of {INITIAL_LAWS}, got {initial_law!r}")
        self.seeds = [int(s) for s in seeds]
        if not self.seeds:
            raise DomainError("a batch needs at least one seed")
        self.initial_law = initial_law
        self._rngs = [np.random.Generator(np.random.PCG64(s)) for s in self.seeds]
        if initial_law == "gauss":
            self.r = np.array([gauss_initial_ratio(g.random()) for g in self._rngs])
        else:
            self.r = np.zeros(len(self.seeds))
        self._buf = np.empty((len(self.seeds), CHUNK))
        self._pos = CHUNK
        self.position = 0

    @property
    def lanes(self) -> int:
        return len(self.seeds)

    def _refill(self) -> None:
        for j, g in enumerate(self._rngs):
            g.random(out=self._buf[j])
        self._pos = 0

    def next_block(self, m: int) -> np.ndarray:
        """The next ``m`` digits of every lane, shape ``(lanes, m)``."""
        out = np.empty((self.lanes, m), dtype=np.int64)
        done = 0
        while done < m:
            if self._pos == CHUNK:
                self._refill()
            take = min(m - done, CHUNK - self._pos)
            _ne_fill_lanes(self._buf[:, self._pos : self._pos + take], self.r, out[:, done : done + take])
            self._pos += take
            done += take
        self.position += m
        return out


class SourceBatch:
    """Lane-batch interface over independent scalar sources."""

    def __init__(self, sources: list[DigitSource]):
        if not sources:
            raise DomainError("a batch needs at least one source")
        self.sources = sources
        self.position = 0

    @property
    def lanes(self) -> int:
        return len(self.sources)

    def next_block(self, m: int) -> np.ndarray:
        out = np.empty((self.lanes, m), dtype=np.int64)
        for j, src in enumerate(self.sources):
            row = src.next_chunk(m)
            if row.size != m:
                raise DomainError(f"lane {j} ran out of digits at position {self.position + row.size}")
            out[j] = row
        self.position += m
        return out


def make_source(backend: str, seed: int, initial_law: str = "lebesgue", **kwargs) -> DigitSource:
    """Construct a random digit source for an experiment backend."""
    if backend == "natural-extension":
        return NaturalExtensionSource(seed, initial_law)
    if backend == "lazy-real":
        if initial_law != "lebesgue":
            raise DomainError("the lazy-real backend samples u uniformly; only the lebesgue law applies")
        return LazyRealSource(int(seed), kwargs.get("budget", DEFAULT_REFINEMENT_BUDGET))
    if backend == "exact-rational":
        raise DomainError("exact-rational is not a random backend; use RationalSource directly")
    raise DomainError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def make_batch(backend: str, seeds: Iterable[int], initial_law: str = "lebesgue", **kwargs):
    """Lane batch of independent trajectories, one per seed."""
    seeds = list(seeds)
    if backend == "natural-extension":
        if initial_law not in INITIAL_LAWS:
            raise DomainError(f"initial law must be one of {INITIAL_LAWS}, got {initial_law!r}")
        return NaturalExtensionBatch(seeds, initial_law)
    return SourceBatch([make_source(backend, s, initial_law, **kwargs) for s in seeds])


def iter_digit_chunks(source: DigitSource, n: int, breaks: Iterable[int] = (), chunk: int = CHUNK):
    """Yield successive digit arrays totalling ``n`` digits.

    Chunks are split so that every position in ``breaks`` ends a chunk.
    """
    stops = sorted({int(b) for b in breaks if 0 < b < n} | {n})
    done = 0
    for stop in stops:
        while done < stop:
            m = min(chunk, stop - done)
            yield source.next_chunk(m)
            done += m


def sample_trajectory(
    seed: int, n: int, backend: str = "natural-extension", initial_law: str = "lebesgue"
) -> np.ndarray:
    """First n digits of a random trajectory; deterministic in all arguments."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    source = make_source(backend, seed, initial_law)
    if backend == "natural-extension":
        return source.next_chunk(n)
    return np.fromiter(source.take(n), dtype=np.int64, count=n)


def prime_digit_value(d: int, table) -> int:
    """``a'``: the digit itself if prime, else 0."""
    return int(d) if table.is_prime(int(d)) else 0


def cross_validate_sources(bit_seed: int, bits: int) -> bool:
    """Check that lazy exact-real digits agree with Euclid on the same dyadic rational.

    The first ``bits`` bits define u = k / 2**bits; every digit the lazy source
    can certify from those bits alone must be a digit of u.
    """
    if bits < 1:
        raise DomainError(f"bits must be >= 1, got {bits}")
    k = BitStream(bit_seed).take(bits)
    if k == 0:
        return True
    exact = digits_of_rational(k, 1 << bits)
    stream = BitStream(bit_seed)
    lazy = LazyRealSource((next(stream) for _ in range(bits)), budget=bits)
    emitted = []
    try:
        while True:
            emitted.append(lazy.next_digit())
    except RefinementLimitError:
        pass
    return emitted == exact[: len(emitted)] and len(emitted) <= len(exact)
