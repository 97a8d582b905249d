"""Gauss-measure constants with certified truncation brackets.

The Gauss measure has density ``1/(log2 (1+x))`` on (0, 1].  Cylinder and
digit-tail masses are closed forms; anything summed over primes is summed
exactly up to the sieve bound ``B`` (in extended precision) and the part
beyond ``B`` is enclosed by partial summation against an explicit upper bound
for the prime-counting function.

Throughout, ``loglog`` is written out; "log2" always denotes the number
``log(2)``, never a base-2 logarithm.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .primes import DEFAULT_SIEVE_BOUND, PrimeTable, default_table

__all__ = [
    "LOG2",
    "MeasureValue",
    "GaussContext",
    "gauss_context",
    "cylinder_measure",
    "digit_tail",
    "interval_measure",
    "preimage_measure",
    "prime_tail",
    "prime_tail_values",
    "truncated_expectation",
    "freq_constant",
    "moment_constant",
    "norming",
    "NORMING_MIN",
    "funny_epoch",
    "BertrandFamily",
    "RatioFamily",
    "Classification",
    "series_classifier",
    "series_lemma_check",
    "series_probe",
    "ratio_integral_classifier",
    "ratio_integral_probe",
]

LOG2 = math.log(2.0)
_EPS64 = np.finfo(np.float64).eps
_EPSLD = float(np.finfo(np.longdouble).eps)


@dataclass(frozen=True)
class MeasureValue:
    """A real quantity known to lie in ``[value - error_bound, value + error_bound]``.

    ``heuristic`` marks asymptotic stand-ins whose bound is not rigorous.
    """

    value: float
    error_bound: float = 0.0
    heuristic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "error_bound", float(self.error_bound))
        if not self.error_bound >= 0.0:
            raise DomainError(f"error bound must be non-negative, got {self.error_bound}")

    @property
    def lower(self) -> float:
        return self.value - self.error_bound

    @property
    def upper(self) -> float:
        return self.value + self.error_bound

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def __float__(self) -> float:
        return float(self.value)


def _closed(value: float, ulps: float = 8.0) -> MeasureValue:
    return MeasureValue(float(value), ulps * _EPS64 * abs(value))


def cylinder_measure(k: int) -> MeasureValue:
    """Mass of ``I_k = (1/(k+1), 1/k]``: log((k+1)^2/(k(k+2)))/log2."""
    k = int(k)
    if k < 1:
        raise DomainError(f"digit must be >= 1, got {k}")
    return _closed(math.log1p(1.0 / (k * (k + 2.0))) / LOG2)


def digit_tail(K: int) -> MeasureValue:
    """Mass of ``{a >= K}`` = log((K+1)/K)/log2."""
    K = int(K)
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    return _closed(math.log1p(1.0 / K) / LOG2)


def interval_measure(a: float, b: float) -> MeasureValue:
    """Mass of ``[a, b]`` within [0, 1]."""
    if not 0.0 <= a <= b <= 1.0:
        raise DomainError(f"need 0 <= a <= b <= 1, got [{a}, {b}]")
    return _closed(math.log1p((b - a) / (1.0 + a)) / LOG2)


def preimage_measure(a: float, b: float, terms: int = 10**6) -> MeasureValue:
    """Mass of the Gauss-map preimage of ``[a, b]``: the union over k of
    ``[1/(k+b), 1/(k+a)]``, summed to ``terms`` branches plus a tail bracket."""
    if not 0.0 <= a <= b <= 1.0:
        raise DomainError(f"need 0 <= a <= b <= 1, got [{a}, {b}]")
    k = np.arange(1, terms + 1, dtype=np.longdouble)
    a_, b_ = np.longdouble(a), np.longdouble(b)
    # mu([1/(k+b), 1/(k+a)]) = log1p((b-a)/((k+a)(k+b+1)))/log2
    parts = np.log1p((b_ - a_) / ((k + a_) * (k + b_ + 1)))
    head = float(np.sum(parts[::-1]) / np.longdouble(LOG2))
    # remaining branches, x_k = (b-a)/((k+a)(k+b+1)) with x - x^2/2 <= log1p(x) <= x:
    # sum_{k>T} x_k <= (b-a)/(T+1) and >= (b-a)/(T+2); sum x_k^2 <= (b-a)^2/(3 T^3)
    w, T = b - a, float(terms)
    hi = w / (T + 1) / LOG2
    lo = max(w / (T + 2) - w * w / (6 * T**3), 0.0) / LOG2
    rounding = (terms + 8) * _EPSLD * abs(head) + _EPS64 * abs(head)
    return MeasureValue(head + (hi + lo) / 2, (hi - lo) / 2 + rounding)


def _pi_denominator(x: float) -> float:
    """D(x) with pi(t) <= t/D(t) for all t >= x > 1, D non-decreasing.

    Rosser-Schoenfeld: pi(t) < 1.25506 t/log t (t > 1).
    Dusart: pi(t) <= t/(log t - 1.1) (t >= 60184).
    """
    d = math.log(x) / 1.25506
    if x >= 60184:
        d = max(d, math.log(x) - 1.1)
    return d


def _prime_power_tail_upper(gamma: float, x: float, pi_x: int | None) -> float:
    """Upper bound for sum_{p > x} p^(gamma-2), gamma < 1.

    Partial summation: sum = -x^(g-2) pi(x) + (2-g) int_x^inf pi(t) t^(g-3) dt,
    and pi(t) <= t/D(x) for t >= x.  If pi(x) is unknown the (negative)
    boundary term is dropped.
    """
    main = (2.0 - gamma) * x ** (gamma - 1.0) / ((1.0 - gamma) * _pi_denominator(x))
    if pi_x is not None:
        main -= pi_x * x ** (gamma - 2.0)
    return max(main, 0.0)


class GaussContext:
    """Per-prime Gauss masses for one sieve, with the sums the module needs.

    ``mu[i]`` is the mass of ``I_p`` for the i-th prime, in extended precision;
    ``suffix[i] = sum_{j >= i} mu[j]`` (zero past the end) and ``weighted[i] = sum_{j < i} p_j mu[j]``.
    """

    def __init__(self, table: PrimeTable):
        self.table = table
        self.bound = table.bound
        self.primes = table.primes_upto()
        self.pi_bound = int(self.primes.size)
        p = self.primes.astype(np.longdouble)
        self.mu = np.log1p(1 / (p * (p + 2))) / np.longdouble(LOG2)
        # suffix[pi_bound] = 0 so that any index from searchsorted is valid
        self.suffix = np.concatenate((np.cumsum(self.mu[::-1])[::-1], [np.longdouble(0)]))
        self.weighted = np.concatenate(([np.longdouble(0)], np.cumsum(p * self.mu)))
        # beyond the sieve: mu(I_p) <= 1/(p(p+2) log2) <= p^-2/log2
        self.beyond = _prime_power_tail_upper(0.0, float(self.bound), self.pi_bound) / LOG2

    def _rounding(self, terms: int, value: float) -> float:
        return (terms + 8) * _EPSLD * abs(value) + 2 * _EPS64 * abs(value)

    def tail(self, K: int) -> MeasureValue:
        """Certified ``mu(a' >= K)`` for K >= 2."""
        if K <= self.bound + 1:
            i = int(np.searchsorted(self.primes, K, side="left"))
            head = float(self.suffix[i])
            half = self.beyond / 2
            return MeasureValue(head + half, half + self._rounding(self.pi_bound - i, head))
        upper = _prime_power_tail_upper(0.0, float(K - 1), None) / LOG2
        return MeasureValue(upper / 2, upper / 2 + 2 * _EPS64 * upper)

    def tail_values(self, K: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised ``tail``; returns (values, error bounds)."""
        K = np.asarray(K, dtype=np.int64)
        if K.size and K.min() < 2:
            raise DomainError("prime tails need K >= 2")
        inside = K <= self.bound + 1
        i = np.searchsorted(self.primes, K[inside], side="left")
        head = self.suffix[i].astype(np.float64)
        values = np.empty(K.shape)
        errors = np.empty(K.shape)
        values[inside] = head + self.beyond / 2
        errors[inside] = self.beyond / 2 + (self.pi_bound - i + 8) * _EPSLD * head + 2 * _EPS64 * head
        if not inside.all():
            x = K[~inside].astype(np.float64) - 1.0
            d = np.maximum(np.log(x) / 1.25506, np.log(x) - 1.1)
            upper = 2.0 / (x * d) / LOG2
            values[~inside] = upper / 2
            errors[~inside] = upper / 2 * (1 + 4 * _EPS64)
        return values, errors

    def interval_values(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """``mu(lo <= a' <= hi)`` summed over primes in [lo, hi]; hi within the sieve."""
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        if hi.size and hi.max() > self.bound:
            raise DomainError(f"interval end {hi.max()} exceeds sieve bound {self.bound}")
        i = np.searchsorted(self.primes, lo, side="left")
        k = np.searchsorted(self.primes, hi, side="right")
        return np.where(k > i, (self.suffix[i] - self.suffix[np.maximum(k, i)]).astype(np.float64), 0.0)

    def truncated_prime_mean(self, N: int) -> MeasureValue:
        """``L'(N) = int min(a', N) dmu = sum_{p<=N} p mu(I_p) + N mu(a' >= N+1)``."""
        if N > self.bound:
            raise DomainError(f"N={N} exceeds sieve bound {self.bound}")
        i = int(np.searchsorted(self.primes, N, side="right"))
        head = float(self.weighted[i])
        rest = self.tail(N + 1)
        value = head + N * rest.value
        return MeasureValue(value, N * rest.error_bound + self._rounding(i, head))

    def weighted_sum(self, gamma: float) -> MeasureValue:
        """``sum_p p^gamma mu(I_p)`` for gamma < 1."""
        p = self.primes.astype(np.longdouble)
        terms = np.power(p, np.longdouble(gamma)) * self.mu
        head = float(np.sum(terms[::-1]))
        upper = _prime_power_tail_upper(gamma, float(self.bound), self.pi_bound) / LOG2
        return MeasureValue(head + upper / 2, upper / 2 + self._rounding(self.pi_bound + 4, head))

    def product_form(self) -> MeasureValue:
        """``log(prod_p (1 + 1/(p(p+2))))/log2`` evaluated as a product."""
        p = self.primes.astype(np.longdouble)
        prod = np.prod(1 + 1 / (p * (p + 2)))
        head = float(np.log(prod) / np.longdouble(LOG2))
        # relative product error <= n eps translates to an absolute log error
        rounding = (2 * self.pi_bound + 8) * _EPSLD / LOG2 + 2 * _EPS64 * abs(head)
        return MeasureValue(head + self.beyond / 2, self.beyond / 2 + rounding)


@functools.lru_cache(maxsize=2)
def gauss_context(bound: int = DEFAULT_SIEVE_BOUND) -> GaussContext:
    """Cached context over ``default_table(bound)``."""
    return GaussContext(default_table(bound))


def _ctx(ctx: GaussContext | None) -> GaussContext:
    return gauss_context() if ctx is None else ctx


def prime_tail(K: int, mode: str = "exact", ctx: GaussContext | None = None) -> MeasureValue:
    """``mu(a' >= K)``: exact prime sum with bracket, or the asymptotic 1/(log2 K log K)."""
    K = int(K)
    if K < 2:
        raise DomainError(f"prime tails need K >= 2, got {K}")
    if mode == "asymptotic":
        return MeasureValue(1.0 / (LOG2 * K * math.log(K)), 0.0, heuristic=True)
    if mode != "exact":
        raise DomainError(f"mode must be 'exact' or 'asymptotic', got {mode!r}")
    return _ctx(ctx).tail(K)


def prime_tail_values(K, ctx: GaussContext | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Exact-mode ``prime_tail`` over an integer array: (values, error bounds)."""
    return _ctx(ctx).tail_values(K)


def truncated_expectation(N: int, which: str = "prime", ctx: GaussContext | None = None) -> MeasureValue:
    """``int min(a, N) dmu`` (``which="full"``) or ``int min(a', N) dmu`` (``"prime"``).

    The full version telescopes to log(N+1)/log2.
    """
    N = int(N)
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if which == "full":
        return _closed(math.log1p(N) / LOG2)
    if which == "prime":
        return _ctx(ctx).truncated_prime_mean(N)
    raise DomainError(f"which must be 'full' or 'prime', got {which!r}")


def freq_constant(form: str = "sum", ctx: GaussContext | None = None) -> MeasureValue:
    """Gauss mass of the prime digits, as a prime sum or as a log-product."""
    ctx = _ctx(ctx)
    if form == "sum":
        return ctx.tail(2)
    if form == "product":
        return ctx.product_form()
    raise DomainError(f"form must be 'sum' or 'product', got {form!r}")


def moment_constant(gamma: float, ctx: GaussContext | None = None) -> MeasureValue:
    """``K_gamma = int (a')^gamma dmu`` restricted to prime digits, gamma < 1."""
    gamma = float(gamma)
    if not gamma < 1.0:
        raise DomainError(f"the prime-digit moment is finite only for gamma < 1, got {gamma}")
    return _ctx(ctx).weighted_sum(gamma)


# --- norming sequences -------------------------------------------------------

NORMING_MIN = {"aPrime": 1, "bPrime": 3, "dGamma": 2, "dFunny": math.exp(3 * math.log(3) ** 2)}


def funny_epoch(j: int) -> float:
    """``exp(j (log j)^2)``, the block ends of the piecewise-constant norming."""
    return math.exp(j * math.log(j) ** 2)


def _funny_norm(n: float) -> float:
    j = 4
    while funny_epoch(j) < n:
        j += 1
    top = funny_epoch(j)
    return top * math.log(math.log(top)) / LOG2


def norming(kind: str, n: float, gamma: float | None = None, b=None, ctx: GaussContext | None = None) -> float:
    """Norming sequences for prime-digit sums.

    * ``aPrime``: N / L'(N) (N is floored to an integer).
    * ``bPrime``: n loglog n / log2.
    * ``dGamma``: n^g b^(1-g) / ((g-1) log2^g (log n)^g), g > 1; ``b`` is a
      number or a callable of n.
    * ``dFunny``: e(j) loglog e(j)/log2 for e(j-1) < n <= e(j), e(j) = exp(j log^2 j);
      defined for n > e(3).
    """
    if kind not in NORMING_MIN:
        raise DomainError(f"unknown norming {kind!r}; expected one of {sorted(NORMING_MIN)}")
    n0 = NORMING_MIN[kind]
    if kind == "dFunny" and not n > n0:
        raise DomainError(f"dFunny needs n > {n0:.6g}, got {n}")
    if n < n0:
        raise DomainError(f"{kind} needs n >= {n0}, got {n}")
    if kind == "aPrime":
        N = int(math.floor(n))
        return N / truncated_expectation(N, "prime", ctx).value
    if kind == "bPrime":
        return n * math.log(math.log(n)) / LOG2
    if kind == "dGamma":
        if gamma is None or not gamma > 1.0:
            raise DomainError(f"dGamma needs gamma > 1, got {gamma}")
        bn = float(b(n) if callable(b) else b) if b is not None else None
        if bn is None or not bn > 0:
            raise DomainError(f"dGamma needs a positive trimming count b, got {b}")
        logs = gamma * math.log(n) + (1.0 - gamma) * math.log(bn) - gamma * math.log(LOG2 * math.log(n))
        return math.exp(logs) / (gamma - 1.0)
    return _funny_norm(n)


# --- series and integral classification --------------------------------------

@dataclass(frozen=True)
class BertrandFamily:
    """``b_n = scale * n^alpha * (log n)^beta * (loglog n)^gamma``."""

    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0
    scale: float = 1.0

    def __call__(self, n):
        n = np.asarray(n, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.scale * n**self.alpha * np.log(n) ** self.beta * np.log(np.log(n)) ** self.gamma


@dataclass(frozen=True)
class RatioFamily:
    """``g(t) = t (log t)^rho (loglog t)^(-gamma)``."""

    rho: float = 0.0
    gamma: float = 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            return t * np.log(t) ** self.rho * np.log(np.log(t)) ** (-self.gamma)


@dataclass(frozen=True)
class Classification:
    """Outcome of a convergence test; ``probe`` holds (horizon, partial value) pairs."""

    verdict: str  # "divergent", "convergent" or "inconclusive"
    method: str  # "analytic" or "numeric"
    probe: tuple = field(default=())

    @property
    def inconclusive(self) -> bool:
        return self.verdict == "inconclusive"


def series_probe(b: Callable, n_max: int = 10**6, checkpoints: int = 6) -> tuple:
    """Partial sums of 1/(b_n log b_n) at logarithmically spaced n (terms with b_n <= 1 skipped)."""
    n = np.arange(3, n_max + 1, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        bn = np.asarray(b(n), dtype=np.float64)
        terms = np.where(bn > 1.0, 1.0 / (bn * np.log(bn)), 0.0)
    terms = np.nan_to_num(terms, nan=0.0, posinf=0.0)
    sums = np.cumsum(terms)
    marks = np.unique(np.logspace(1, math.log10(n_max), checkpoints).astype(np.int64))
    return tuple((int(m), float(sums[m - 3])) for m in marks if m >= 3)


def series_classifier(family) -> Classification:
    """Convergence of sum 1/(b_n log b_n).

    Bertrand rules for ``BertrandFamily``; any other callable only gets a
    numeric probe and an inconclusive verdict.
    """
    if not isinstance(family, BertrandFamily):
        return Classification("inconclusive", "numeric", series_probe(family))
    a, be, g = family.alpha, family.beta, family.gamma
    # log b_n ~ alpha log n when alpha > 0, so the term behaves like n^-a (log n)^-(b+1) (loglog n)^-g
    if a > 1:
        verdict = "convergent"
    elif 0 < a < 1:
        verdict = "divergent"
    elif a == 1:
        verdict = "convergent" if be > 0 or (be == 0 and g > 1) else "divergent"
    elif a == 0 and (be > 0 or (be == 0 and g > 0) or (be == 0 and g == 0 and family.scale > 1)):
        # b_n grows slower than any power (or is a constant > 1): terms dominate 1/n
        verdict = "divergent"
    else:
        return Classification("inconclusive", "numeric", series_probe(family))
    return Classification(verdict, "analytic")


def series_lemma_check(family: BertrandFamily) -> bool:
    """Whether limsup (n loglog n)/b_n > 0 for a family with b_n/n non-decreasing.

    A true result implies divergence of sum 1/(b_n log b_n).
    """
    if not isinstance(family, BertrandFamily):
        raise DomainError("the lemma check needs a BertrandFamily")
    a, be, g = family.alpha, family.beta, family.gamma
    increasing = a > 1 or (a == 1 and (be > 0 or (be == 0 and g >= 0)))
    if not increasing or family.scale <= 0:
        raise DomainError("b_n/n must be non-decreasing (alpha > 1, or alpha = 1 with a non-negative log profile)")
    return a == 1 and be == 0 and g <= 1


def ratio_integral_probe(g: Callable, denominator: str, checkpoints=(10.0, 30.0, 100.0, 300.0, 690.0)) -> tuple:
    """Partial integrals of g(y)/h(g(y)) dy/(y^2 log y) with y = e^u, u up to each checkpoint.

    ``h`` is loglog for ``primeSum`` and log for ``fullSum``.
    """
    if denominator not in ("primeSum", "fullSum"):
        raise DomainError(f"denominator must be 'primeSum' or 'fullSum', got {denominator!r}")
    u = np.linspace(2.0, max(checkpoints), 200001)
    y = np.exp(u)
    with np.errstate(all="ignore"):
        gy = np.asarray(g(y), dtype=np.float64)
        h = np.log(np.log(gy)) if denominator == "primeSum" else np.log(gy)
        f = gy / h / (y * u)  # dy = y du
    f = np.where(np.isfinite(f) & (gy > 3.0), f, 0.0)
    cum = np.concatenate(([0.0], np.cumsum((f[1:] + f[:-1]) / 2 * np.diff(u))))
    return tuple((c, float(cum[np.searchsorted(u, c)])) for c in checkpoints)


def ratio_integral_classifier(g, denominator: str) -> Classification:
    """Divergence of int g(y)/h(g(y)) dy/(y^2 log y), h = loglog (primeSum) or log (fullSum).

    For ``g = t (log t)^rho (loglog t)^-gamma`` the integrand is asymptotic to
    u^(rho-1) (log u)^-(gamma+1) (primeSum) or u^(rho-2) (log u)^-gamma
    (fullSum) in u = log y.
    """
    if denominator not in ("primeSum", "fullSum"):
        raise DomainError(f"denominator must be 'primeSum' or 'fullSum', got {denominator!r}")
    if not isinstance(g, RatioFamily):
        return Classification("inconclusive", "numeric", ratio_integral_probe(g, denominator))
    rho, gam = g.rho, g.gamma
    if denominator == "primeSum":
        divergent = rho > 0 or (rho == 0 and gam <= 0)
    else:
        divergent = rho > 1 or (rho == 1 and gam <= 1)
    return Classification("divergent" if divergent else "convergent", "analytic")
