"""Reference limit laws and goodness-of-fit statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "ReferenceLaw",
    "THETA",
    "EXP1",
    "STD_NORMAL",
    "bernoulli",
    "degenerate",
    "EmpiricalSample",
    "reference_cdf",
    "empirical_cdf",
    "ks_statistic",
    "chi_square_uniform",
    "chi_square_critical",
]

_erfc = np.frompyfunc(math.erfc, 1, 1)

# upper quantiles of the chi-square law, keyed by level then degrees of freedom
_CHI2_QUANTILES = {
    0.95: (3.841458820694124, 5.991464547107979, 7.814727903251178, 9.487729036781154,
           11.070497693516351, 12.591587243743977, 14.067140449340169),
    0.99: (6.6348966010212145, 9.21034037197618, 11.344866730144373, 13.276704135987622,
           15.08627246938899, 16.811893829770927, 18.475306906582357),
}


@dataclass(frozen=True)
class ReferenceLaw:
    """A limit law given by its CDF.

    ``kind`` is one of ``theta`` (CDF e^(-1/y), y > 0), ``exp1``,
    ``std_normal``, ``bernoulli`` (``probs`` over ``support``) or
    ``degenerate`` (all mass at ``support[0]``).
    """

    kind: str
    probs: tuple = field(default=())
    support: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("theta", "exp1", "std_normal", "bernoulli", "degenerate"):
            raise DomainError(f"unknown law {self.kind!r}")
        if self.kind == "bernoulli":
            q = np.asarray(self.probs, dtype=np.float64)
            if q.size < 1 or np.any(q < 0) or not math.isclose(q.sum(), 1.0, abs_tol=1e-12):
                raise DomainError(f"bernoulli weights must be non-negative and sum to 1, got {self.probs}")
            if len(self.support) != q.size or list(self.support) != sorted(set(self.support)):
                raise DomainError("bernoulli support must be strictly increasing and match the weights")
        if self.kind == "degenerate" and len(self.support) != 1:
            raise DomainError("a degenerate law needs exactly one support point")

    @property
    def atoms(self) -> np.ndarray:
        return np.asarray(self.support, dtype=np.float64)

    def cdf(self, y, left: bool = False) -> np.ndarray:
        """CDF at y, or its left limit ``P(Y < y)`` when ``left``."""
        y = np.asarray(y, dtype=np.float64)
        if self.kind == "theta":
            with np.errstate(divide="ignore"):
                return np.where(y > 0, np.exp(-1.0 / np.where(y > 0, y, 1.0)), 0.0)
        if self.kind == "exp1":
            return np.where(y > 0, -np.expm1(-np.maximum(y, 0.0)), 0.0)
        if self.kind == "std_normal":
            return 0.5 * np.asarray(_erfc(-y / math.sqrt(2.0)), dtype=np.float64)
        atoms, weights = self.atoms, np.asarray(self.probs or (1.0,), dtype=np.float64)
        idx = np.searchsorted(atoms, y, side="left" if left else "right")
        return np.concatenate(([0.0], np.cumsum(weights)))[idx].clip(0.0, 1.0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw by inverse transform (theta: y = -1/log U)."""
        u = rng.random(size)
        if self.kind == "theta":
            return -1.0 / np.log(u)
        if self.kind == "exp1":
            return -np.log1p(-u)
        if self.kind == "std_normal":
            return rng.standard_normal(size)
        atoms, weights = self.atoms, np.asarray(self.probs or (1.0,), dtype=np.float64)
        return atoms[np.minimum(np.searchsorted(np.cumsum(weights), u, side="right"), atoms.size - 1)]


THETA = ReferenceLaw("theta")
EXP1 = ReferenceLaw("exp1")
STD_NORMAL = ReferenceLaw("std_normal")


def bernoulli(probs, support=None) -> ReferenceLaw:
    """Law taking ``support[i]`` (default i) with probability ``probs[i]``."""
    probs = tuple(float(q) for q in probs)
    support = tuple(range(len(probs))) if support is None else tuple(support)
    return ReferenceLaw("bernoulli", probs, support)


def degenerate(c: float) -> ReferenceLaw:
    return ReferenceLaw("degenerate", (), (float(c),))


@dataclass(frozen=True)
class EmpiricalSample:
    """Sorted sample values."""

    values: np.ndarray

    @classmethod
    def of(cls, values) -> "EmpiricalSample":
        v = np.sort(np.asarray(values, dtype=np.float64).ravel())
        if v.size == 0:
            raise DomainError("empirical sample must be non-empty")
        if np.isnan(v).any():
            raise DomainError("empirical sample contains NaN")
        return cls(v)

    @property
    def size(self) -> int:
        return int(self.values.size)


def _sample(sample) -> EmpiricalSample:
    return sample if isinstance(sample, EmpiricalSample) else EmpiricalSample.of(sample)


def reference_cdf(law: ReferenceLaw, y):
    out = law.cdf(y)
    return float(out) if np.ndim(out) == 0 else out


def empirical_cdf(sample, y):
    """Fraction of sample values <= y."""
    s = _sample(sample)
    out = np.searchsorted(s.values, np.asarray(y, dtype=np.float64), side="right") / s.size
    return float(out) if np.ndim(out) == 0 else out


def ks_statistic(sample, law: ReferenceLaw) -> float:
    """Two-sided sup distance between the empirical and reference CDFs.

    Both CDFs are step-or-continuous, so the supremum is attained as a value
    or left limit at a sample point or an atom of the law.
    """
    s = _sample(sample)
    points = np.union1d(s.values, law.atoms) if law.atoms.size else np.unique(s.values)
    n = s.size
    right = np.searchsorted(s.values, points, side="right") / n
    left = np.searchsorted(s.values, points, side="left") / n
    d_right = np.abs(right - law.cdf(points))
    d_left = np.abs(left - law.cdf(points, left=True))
    return float(max(d_right.max(), d_left.max()))


def chi_square_uniform(counts) -> float:
    """Pearson statistic of class counts against equal expected counts."""
    c = np.asarray(counts, dtype=np.float64)
    if c.size < 2:
        raise DomainError(f"need at least 2 classes, got {c.size}")
    total = c.sum()
    if not total > 0:
        raise DomainError("total count must be positive")
    expected = total / c.size
    return float(((c - expected) ** 2).sum() / expected)


def chi_square_critical(df: int, level: float = 0.99) -> float:
    """Upper ``level`` quantile of chi-square with 1 <= df <= 7."""
    if level not in _CHI2_QUANTILES:
        raise DomainError(f"level must be one of {sorted(_CHI2_QUANTILES)}, got {level}")
    if not 1 <= df <= 7:
        raise DomainError(f"embedded quantiles cover 1..7 degrees of freedom, got {df}")
    return _CHI2_QUANTILES[level][df - 1]
