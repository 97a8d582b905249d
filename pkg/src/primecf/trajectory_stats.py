"""Streaming statistics of digit trajectories.

``SummaryBatch`` advances several trajectories ("lanes") that share digit
positions, one block at a time; ``TrajectorySummary`` is the single-lane
view.  Trimmed sums never subtract: the largest ``capacity`` prime digits are
held in a sorted buffer and everything evicted from it is accumulated
separately, so removing the b largest terms costs no cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numba
import numpy as np

from .cf_stream import DigitSource
from .errors import DomainError
from .gauss import LOG2, GaussContext, gauss_context
from .primes import PrimeTable, _is_prime_bits, default_table

__all__ = [
    "EventFamily",
    "threshold_events",
    "equality_events",
    "interval_events",
    "SummaryBatch",
    "TrajectorySummary",
    "count_events",
    "HittingRecord",
    "hitting_process",
    "check_hitting_params",
    "ratio_series",
    "INTERVAL_EXPONENT",
]

INTERVAL_EXPONENT = 0.475
_NEVER = np.iinfo(np.int64).max


_SMALL = 4096  # digits below this use lookup tables; larger ones are rare (mass ~ 3.5e-4)


@numba.njit(cache=True, nogil=True)
def _accumulate(digits, bits, bound, small_prime, small_pow, pp, sum_full, max_full, sum_prime, max_prime,
                count_prime, rest_int, gammas, rest_pow, top):
    lanes, m = digits.shape
    cap = top.shape[1]
    ng = gammas.size
    for j in range(lanes):
        sf = sum_full[j]
        mf = max_full[j]
        sp = sum_prime[j]
        mp = max_prime[j]
        cp = count_prime[j]
        ri = rest_int[j]
        for i in range(m):
            d = digits[j, i]
            sf += d
            mf = max(mf, d)
            small = d < _SMALL
            if small:
                v = d * small_prime[d]
            elif _is_prime_bits(d, bits, bound):
                v = d
            else:
                v = 0
            pp[j, i] = v
            sp += v
            cp += v > 0
            mp = max(mp, v)
            if cap > 0 and v > top[j, cap - 1]:
                out = top[j, cap - 1]
                k = cap - 1
                while k > 0 and top[j, k - 1] < v:
                    top[j, k] = top[j, k - 1]
                    k -= 1
                top[j, k] = v
                small = out < _SMALL
            else:
                out = v
            ri += out
            if small:
                for g in range(ng):
                    rest_pow[j, g] += small_pow[g, out]
            elif out > 0:
                for g in range(ng):
                    rest_pow[j, g] += float(out) ** gammas[g]
        sum_full[j] = sf
        max_full[j] = mf
        sum_prime[j] = sp
        max_prime[j] = mp
        count_prime[j] = cp
        rest_int[j] = ri


Schedule = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class EventFamily:
    """A sequence of events ``A_k`` on the prime digit ``a'_k``.

    * ``threshold``: a'_k >= b_k (``strict``: a'_k > b_k)
    * ``equality``: a'_k = d_k
    * ``interval``: d_k <= a'_k <= d_k (1 + 1/c_k), with c_k <= d_k^0.475

    Schedules map 1-based positions (float array) to parameter values; a
    non-finite threshold means no event at that position.
    """

    kind: str
    schedule: Schedule
    width: Schedule | None = None
    strict: bool = False
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("threshold", "equality", "interval"):
            raise DomainError(f"unknown event kind {self.kind!r}")
        if self.kind == "interval" and self.width is None:
            raise DomainError("interval events need a width schedule c_k")

    def bounds(self, positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Integer range [lo, hi] of a' values making up A_k at each position."""
        x = np.asarray(self.schedule(np.asarray(positions, dtype=np.float64)), dtype=np.float64)
        x = np.broadcast_to(x, np.shape(positions))
        finite = np.isfinite(x)
        lo = np.full(x.shape, _NEVER, dtype=np.int64)
        hi = np.full(x.shape, _NEVER, dtype=np.int64)
        if self.kind == "threshold":
            t = np.floor(x[finite]) + 1 if self.strict else np.ceil(x[finite])
            lo[finite] = np.clip(t, -1, 2.0**62).astype(np.int64)
            return lo, hi
        d = x[finite]
        if np.any(d < 1) or np.any(d != np.floor(d)):
            raise DomainError(f"{self.kind} events need positive integer d_k")
        lo[finite] = d.astype(np.int64)
        if self.kind == "equality":
            hi[finite] = lo[finite]
            return lo, hi
        c = np.broadcast_to(np.asarray(self.width(np.asarray(positions, dtype=np.float64)), dtype=np.float64), x.shape)[finite]
        if np.any(c <= 0) or np.any(c > d**INTERVAL_EXPONENT):
            bad = np.flatnonzero((c <= 0) | (c > d**INTERVAL_EXPONENT))[0]
            raise DomainError(
                f"interval events need 0 < c_k <= d_k^{INTERVAL_EXPONENT}; "
                f"violated at d={d[bad]:.17g}, c={c[bad]:.17g}"
            )
        hi[finite] = np.floor(d + d / c).astype(np.int64)
        return lo, hi

    def validate(self, n: int) -> None:
        """Check the schedule on positions 1..n (raises DomainError)."""
        for start in range(1, n + 1, 1 << 20):
            self.bounds(np.arange(start, min(start + (1 << 20), n + 1), dtype=np.float64))

    def hits(self, pp: np.ndarray, positions: np.ndarray) -> np.ndarray:
        """Boolean indicator of A_k for prime-digit values ``pp`` (last axis = positions)."""
        lo, hi = self.bounds(positions)
        if self.kind == "threshold":
            return pp >= lo
        return (pp >= lo) & (pp <= hi) & (lo != _NEVER)

    def measures(self, positions: np.ndarray, ctx: GaussContext | None = None) -> np.ndarray:
        """Exact Gauss measures mu(A_k) at the given positions."""
        ctx = gauss_context() if ctx is None else ctx
        lo, hi = self.bounds(positions)
        out = np.zeros(lo.shape)
        if self.kind == "threshold":
            live = lo != _NEVER
            out[live & (lo <= 0)] = 1.0
            mid = live & (lo > 0)
            if mid.any():
                out[mid] = ctx.tail_values(np.maximum(lo[mid], 2))[0]
            return out
        live = lo != _NEVER
        if self.kind == "equality":
            d = lo[live]
            prime = ctx.table.prime_part(d) > 0
            df = d.astype(np.float64)
            out[live] = np.where(prime, np.log1p(1.0 / (df * (df + 2.0))) / LOG2, 0.0)
            return out
        out[live] = ctx.interval_values(lo[live], hi[live])
        return out

    def centering(self, n: int, ctx: GaussContext | None = None) -> float:
        """``sum_{k<=n} mu(A_k)``."""
        total = 0.0
        for start in range(1, n + 1, 1 << 20):
            pos = np.arange(start, min(start + (1 << 20), n + 1), dtype=np.float64)
            total += math.fsum(self.measures(pos, ctx))
        return total


def threshold_events(b: Schedule | float, strict: bool = False, label: str = "") -> EventFamily:
    return EventFamily("threshold", _as_schedule(b), strict=strict, label=label)


def equality_events(d: Schedule | int, label: str = "") -> EventFamily:
    return EventFamily("equality", _as_schedule(d), label=label)


def interval_events(d: Schedule | int, c: Schedule | float, label: str = "") -> EventFamily:
    return EventFamily("interval", _as_schedule(d), width=_as_schedule(c), label=label)


def _as_schedule(x) -> Schedule:
    if callable(x):
        return x
    value = float(x)
    return lambda n: np.full(np.shape(n), value)


class SummaryBatch:
    """Streaming statistics for ``lanes`` trajectories over common positions.

    ``gammas`` lists extra powers whose sums (and trimmed sums) are tracked;
    ``capacity`` is the number of largest prime digits retained for trimming.
    ``ratio_g`` enables the running-ratio maxima with g applied to a'.
    """

    def __init__(
        self,
        lanes: int,
        table: PrimeTable | None = None,
        gammas: Sequence[float] = (),
        capacity: int = 1,
        families: Sequence[EventFamily] = (),
        ratio_g: Callable | None = None,
    ):
        if lanes < 1:
            raise DomainError(f"lanes must be >= 1, got {lanes}")
        if capacity < 0:
            raise DomainError(f"capacity must be >= 0, got {capacity}")
        self.table = default_table() if table is None else table
        self.lanes = lanes
        self.n = 0
        self.gammas = np.array([float(g) for g in gammas], dtype=np.float64)
        self.capacity = capacity
        self.sum_full = np.zeros(lanes, dtype=np.int64)
        self.max_full = np.zeros(lanes, dtype=np.int64)
        self.sum_prime = np.zeros(lanes, dtype=np.int64)
        self.max_prime = np.zeros(lanes, dtype=np.int64)
        self.count_prime = np.zeros(lanes, dtype=np.int64)
        self.rest_int = np.zeros(lanes, dtype=np.int64)
        self.rest_pow = np.zeros((lanes, self.gammas.size))
        # lookup tables: prime flags, and (a')^gamma (0 for non-primes) computed as float(v) ** g
        small = np.arange(_SMALL, dtype=np.int64)
        self._small_prime = (self.table.prime_part(small) > 0).astype(np.int64)
        self._small_pow = np.zeros((self.gammas.size, _SMALL))
        for g, gamma in enumerate(self.gammas):
            self._small_pow[g] = [float(v) ** gamma if f else 0.0 for v, f in zip(small, self._small_prime)]
        self.top = np.zeros((lanes, capacity), dtype=np.int64)
        self.families = list(families)
        self.event_counts = np.zeros((len(self.families), lanes), dtype=np.int64)
        self.ratio_g = ratio_g
        self.ratio_max = np.zeros((3, lanes))  # a'/prior a', g(a')/prior a', a'/prior a
        self.ratio_exceed = np.zeros(lanes, dtype=np.int64)  # count of a'_n > sum_{k<n} a'_k

    def update_block(self, digits: np.ndarray) -> np.ndarray:
        """Advance every lane by one block of shape (lanes, m); returns the prime parts."""
        digits = np.ascontiguousarray(digits, dtype=np.int64)
        if digits.ndim != 2 or digits.shape[0] != self.lanes:
            raise DomainError(f"expected a block of shape ({self.lanes}, m), got {digits.shape}")
        if digits.size and digits.min() < 1:
            raise DomainError("digits must be >= 1")
        prior_full = self.sum_full.copy()
        prior_prime = self.sum_prime.copy()
        pp = np.empty_like(digits)
        _accumulate(digits, self.table.bits, self.table.bound, self._small_prime, self._small_pow, pp, self.sum_full, self.max_full,
                    self.sum_prime, self.max_prime, self.count_prime, self.rest_int, self.gammas,
                    self.rest_pow, self.top)
        m = digits.shape[1]
        positions = np.arange(self.n + 1, self.n + m + 1, dtype=np.float64)
        for f, fam in enumerate(self.families):
            self.event_counts[f] += fam.hits(pp, positions).sum(axis=1)
        if self.ratio_g is not None:
            self._ratios(digits, pp, prior_full, prior_prime)
        self.n += m
        return pp

    def _ratios(self, digits, pp, prior_full, prior_prime):
        # sums over k < n within the block
        before_p = (np.cumsum(pp, axis=1) - pp + prior_prime[:, None]).astype(np.float64)
        before_f = (np.cumsum(digits, axis=1) - digits + prior_full[:, None]).astype(np.float64)
        live = (pp > 0) & (before_p > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(live, pp / before_p, 0.0)
            r2 = np.where(live, self.ratio_g(pp.astype(np.float64)) / before_p, 0.0)
            r3 = np.where((pp > 0) & (before_f > 0), pp / before_f, 0.0)
        self.ratio_max[0] = np.maximum(self.ratio_max[0], r1.max(axis=1))
        self.ratio_max[1] = np.maximum(self.ratio_max[1], r2.max(axis=1))
        self.ratio_max[2] = np.maximum(self.ratio_max[2], r3.max(axis=1))
        self.ratio_exceed += (r1 > 1.0).sum(axis=1)

    def _gamma_index(self, gamma: float) -> int:
        hits = np.flatnonzero(self.gammas == float(gamma))
        if hits.size == 0:
            raise DomainError(f"power {gamma} is not tracked; tracked powers: {self.gammas.tolist()}")
        return int(hits[0])

    def power_sum(self, gamma: float = 1.0) -> np.ndarray:
        """``sum_k (a'_k)^gamma`` over prime digits, per lane."""
        return self.trimmed_sum(0, gamma)

    def trimmed_sum(self, b: int, gamma: float = 1.0) -> np.ndarray:
        """``sum (a'_k)^gamma`` with the b largest terms removed, per lane."""
        b = int(b)
        if b < 0:
            raise DomainError(f"b must be >= 0, got {b}")
        if b > 0 and b >= self.n:
            raise DomainError(f"cannot trim b={b} terms from n={self.n}")
        if b > self.capacity:
            raise DomainError(f"b={b} exceeds the retained capacity {self.capacity}")
        kept = self.top[:, b:]
        if float(gamma) == 1.0:
            return self.rest_int + kept.sum(axis=1)
        g = self._gamma_index(gamma)
        powered = np.where(kept > 0, kept.astype(np.float64) ** float(gamma), 0.0)
        return self.rest_pow[:, g] + powered.sum(axis=1)

    def centering(self, family_index: int, ctx: GaussContext | None = None) -> float:
        return self.families[family_index].centering(self.n, ctx)


class TrajectorySummary:
    """Streaming statistics for one trajectory."""

    def __init__(self, table: PrimeTable | None = None, gammas: Sequence[float] = (), capacity: int = 1,
                 families: Sequence[EventFamily] = (), ratio_g: Callable | None = None):
        self.batch = SummaryBatch(1, table, gammas, capacity, families, ratio_g)

    def update(self, digit: int) -> "TrajectorySummary":
        self.batch.update_block(np.array([[int(digit)]], dtype=np.int64))
        return self

    def update_many(self, digits) -> "TrajectorySummary":
        digits = np.asarray(digits, dtype=np.int64)
        if digits.size:
            self.batch.update_block(digits.reshape(1, -1))
        return self

    n = property(lambda self: self.batch.n)
    sum_full = property(lambda self: int(self.batch.sum_full[0]))
    max_full = property(lambda self: int(self.batch.max_full[0]))
    sum_prime = property(lambda self: int(self.batch.sum_prime[0]))
    max_prime = property(lambda self: int(self.batch.max_prime[0]))
    count_prime = property(lambda self: int(self.batch.count_prime[0]))

    @property
    def top(self) -> list[int]:
        """Retained largest prime digits, descending (zeros pad short prefixes)."""
        return self.batch.top[0].tolist()

    @property
    def event_counts(self) -> list[int]:
        return self.batch.event_counts[:, 0].tolist()

    def power_sum(self, gamma: float = 1.0) -> float:
        return self.batch.power_sum(gamma)[0].item()

    def trimmed_sum(self, b: int, gamma: float = 1.0):
        return self.batch.trimmed_sum(b, gamma)[0].item()


def count_events(summary: TrajectorySummary | SummaryBatch, family_index: int = 0,
                 ctx: GaussContext | None = None) -> tuple:
    """``S_n`` (count of A_k for k <= n) and the exact centering ``sum mu(A_k)``."""
    batch = summary.batch if isinstance(summary, TrajectorySummary) else summary
    counts = batch.event_counts[family_index]
    center = batch.centering(family_index, ctx)
    if isinstance(summary, TrajectorySummary):
        return int(counts[0]), center
    return counts.copy(), center


@dataclass
class HittingRecord:
    """Occurrences of prime digits >= level along one trajectory."""

    level: int
    theta: float
    modulus: int | None
    positions: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    digits: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.positions, prepend=0)

    @property
    def size_threshold(self) -> int:
        return math.ceil(self.level / self.theta)

    @property
    def size_marks(self) -> np.ndarray:
        return (self.digits >= self.size_threshold).astype(np.int8)

    @property
    def residue_marks(self) -> np.ndarray:
        if self.modulus is None:
            raise DomainError("no modulus configured")
        return self.digits % self.modulus


def check_hitting_params(level: int, count: int, theta: float, modulus: int | None) -> None:
    """Raise DomainError unless level >= 1, count >= 1, 0 < theta < 1 and level > modulus >= 2."""
    if int(level) < 1 or int(count) < 1:
        raise DomainError(f"need level >= 1 and count >= 1, got level={level}, count={count}")
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    if modulus is not None and (modulus < 2 or level <= modulus):
        raise DomainError(f"residue marks need level > modulus >= 2, got level={level}, modulus={modulus}")


def hitting_process(source: DigitSource, level: int, count: int, theta: float = 0.5, modulus: int | None = None,
                    table: PrimeTable | None = None, chunk: int = 4096) -> HittingRecord:
    """Run ``source`` until ``count`` prime digits >= ``level`` have appeared."""
    check_hitting_params(level, count, theta, modulus)
    level, count = int(level), int(count)
    table = default_table() if table is None else table
    positions, digits = [], []
    found, done = 0, 0
    while found < count:
        block = source.next_chunk(chunk)
        if block.size == 0:
            raise DomainError(f"source exhausted after {done} digits with {found} hits")
        pp = table.prime_part(block)
        idx = np.flatnonzero(pp >= level)[: count - found]
        positions.append(done + idx + 1)
        digits.append(pp[idx])
        found += idx.size
        done += block.size
    return HittingRecord(level, float(theta), modulus, np.concatenate(positions), np.concatenate(digits))


def ratio_series(digits, table: PrimeTable | None = None, g: Callable | None = None) -> dict:
    """Running ratios along one trajectory, from n = 2 on.

    Keys: ``prime`` a'_n / sum_{k<n} a'_k, ``g`` g(a'_n) / sum_{k<n} a'_k,
    ``full`` a'_n / sum_{k<n} a_k, ``sums`` sum a'_k / sum a_k (k <= n), each
    with a ``*_max`` running maximum.  Positions where the prior prime sum
    vanishes carry NaN in the first two series.
    """
    table = default_table() if table is None else table
    digits = np.asarray(digits, dtype=np.int64)
    if digits.size < 2:
        raise DomainError("ratio series need at least two digits")
    pp = table.prime_part(digits).astype(np.float64)
    full = digits.astype(np.float64)
    cp, cf = np.cumsum(pp), np.cumsum(full)
    prior_p, prior_f = cp[:-1], cf[:-1]
    cur = pp[1:]
    gcur = np.asarray(g(cur), dtype=np.float64) if g is not None else cur
    with np.errstate(divide="ignore", invalid="ignore"):
        r_prime = np.where(prior_p > 0, cur / prior_p, np.nan)
        r_g = np.where(prior_p > 0, gcur / prior_p, np.nan)
    r_full = cur / prior_f
    r_sums = cp[1:] / cf[1:]
    out = {"n": np.arange(2, digits.size + 1), "prime": r_prime, "g": r_g, "full": r_full, "sums": r_sums}
    for key in ("prime", "g", "full", "sums"):
        out[key + "_max"] = np.fmax.accumulate(out[key])
    return out
