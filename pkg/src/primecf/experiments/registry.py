"""The registered experiments.

Each experiment turns a resolved ``ExperimentConfig`` into report rows.
Per-experiment defaults and acceptance thresholds live in ``Experiment``
records; anything under a log or loglog convergence rate is report-only.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import __version__
from ..cf_stream import make_source
from ..errors import DomainError
from ..gauss import (
    LOG2,
    BertrandFamily,
    RatioFamily,
    freq_constant,
    funny_epoch,
    gauss_context,
    moment_constant,
    norming,
    prime_tail,
    ratio_integral_classifier,
    series_classifier,
    truncated_expectation,
)
from ..limit_laws import EXP1, STD_NORMAL, THETA, chi_square_critical, chi_square_uniform, ks_statistic
from ..primes import totient
from ..trajectory_stats import (
    SummaryBatch,
    check_hitting_params,
    equality_events,
    hitting_process,
    interval_events,
    threshold_events,
)
from .config import ExperimentConfig, check_common
from .report import ExperimentReport, Row
from .runner import drive, map_batches, open_batch

NAN = math.nan


@dataclass(frozen=True)
class Experiment:
    name: str
    anchor: str
    run: Callable[[ExperimentConfig], list[Row]]
    defaults: dict
    thresholds: dict = field(default_factory=dict)
    check: Callable[[ExperimentConfig], None] | None = None


REGISTRY: dict[str, Experiment] = {}


def register(name: str, anchor: str, defaults: dict, thresholds: dict | None = None, check=None):
    def wrap(fn):
        REGISTRY[name] = Experiment(name, anchor, fn, defaults, thresholds or {}, check)
        return fn

    return wrap


# --- helpers -----------------------------------------------------------------

class _Rows:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.rows: list[Row] = []

    def add(self, statistic, n, value, reference=NAN, low=NAN, high=NAN, verdict="report-only"):
        self.rows.append(Row(self.cfg.experiment, statistic, int(n), int(self.cfg.trajectories), int(self.cfg.seed),
                             float(value), float(reference), float(low), float(high), verdict))

    def band(self, statistic, n, value, reference, low, high):
        verdict = "pass" if low <= value <= high else "fail"
        self.add(statistic, n, value, reference, low, high, verdict)

    def report(self, statistic, n, value, reference=NAN, low=NAN, high=NAN):
        self.add(statistic, n, value, reference, low, high, "report-only")


def _loglog(n: float) -> float:
    return math.log(math.log(n))


def _decades(n: int, first: int = 100) -> list[int]:
    out, x = [], first
    while x < n:
        out.append(x)
        x *= 10
    return out + [n]


def _summaries(cfg, stops, snap, **summary_kw) -> dict:
    """Run every trajectory to ``cfg.n`` and collect ``snap(summary, stop)`` dicts."""

    def work(seeds):
        source = open_batch(cfg, seeds)
        summary = SummaryBatch(len(seeds), **summary_kw)
        out = {}
        for stop in drive(source, summary, stops):
            for key, value in snap(summary, stop).items():
                out[f"{key}@{stop}"] = np.asarray(value, dtype=np.float64).copy()
        return out

    return map_batches(cfg, work)


def _iqr(x) -> float:
    q1, q3 = np.percentile(x, [25, 75])
    return float(q3 - q1)


# --- experiments -------------------------------------------------------------

@register("freq", "asymptotic frequency of prime digits",
          dict(n=10**5, trajectories=200, initial_law="gauss"), dict(tolerance=0.01))
def _freq(cfg):
    out = _Rows(cfg)
    res = _summaries(cfg, [cfg.n], lambda s, _: {"primes": s.count_prime}, capacity=0)
    value = res[f"primes@{cfg.n}"].sum() / (cfg.n * cfg.trajectories)
    ref = freq_constant()
    tol = REGISTRY["freq"].thresholds["tolerance"]
    out.band("prime_digit_frequency", cfg.n, value, ref.value, ref.value - tol, ref.value + tol)
    prod = freq_constant("product")
    slack = ref.error_bound + prod.error_bound
    out.band("freq_constant_product_form", 0, prod.value, ref.value, ref.value - slack, ref.value + slack)
    return out.rows


@register("tail", "tail of the prime-digit distribution",
          dict(n=10**5, trajectories=100, initial_law="gauss"), dict(levels=(5, 20, 50, 100), sigmas=4.0))
def _tail(cfg):
    out = _Rows(cfg)
    th = REGISTRY["tail"].thresholds
    families = [threshold_events(K) for K in th["levels"]]
    res = _summaries(cfg, [cfg.n], lambda s, _: {f"k{K}": s.event_counts[i] for i, K in enumerate(th["levels"])},
                     capacity=0, families=families)
    total = cfg.n * cfg.trajectories
    for K in th["levels"]:
        p = prime_tail(K).value
        se = math.sqrt(p * (1 - p) / total)
        value = res[f"k{K}@{cfg.n}"].sum() / total
        out.band(f"tail_ge_{K}", cfg.n, value, p, p - th["sigmas"] * se, p + th["sigmas"] * se)
    ratios = []
    for K in (10**3, 10**4, 10**5):
        r = prime_tail(K).value / prime_tail(K, "asymptotic").value
        ratios.append(r)
        out.report(f"tail_exact_over_asymptotic_{K}", 0, r, 1.0)
    monotone = all(abs(1 - b) < abs(1 - a) for a, b in zip(ratios, ratios[1:]))
    out.report("tail_ratio_monotone_to_one", 0, float(monotone), 1.0)
    return out.rows


def _next_prime_schedule(limit: int):
    primes = gauss_context().primes
    if limit > primes[-1]:
        raise DomainError(f"schedule needs primes up to {limit}")
    return lambda pos: primes[np.searchsorted(primes, np.ceil(np.sqrt(pos)))].astype(np.float64)


def _nloglog(power: float):
    def b(pos):
        pos = np.asarray(pos, dtype=np.float64)
        safe = np.maximum(pos, 3.0)
        return np.where(pos >= 3, safe * np.log(np.log(safe)) ** power, np.inf)

    return b


@register("bcl-counts", "finite-horizon exceedance counts against summed Gauss measures",
          dict(n=10**6, trajectories=100, initial_law="gauss"), dict(factor=2.0, convergent_median=5))
def _bcl(cfg):
    out = _Rows(cfg)
    th = REGISTRY["bcl-counts"].thresholds
    families = [
        threshold_events(_nloglog(1.0), strict=True, label="n loglog n"),
        threshold_events(_nloglog(1.5), strict=True, label="n loglog^1.5 n"),
        equality_events(_next_prime_schedule(math.isqrt(cfg.n) + 1), label="next prime after sqrt n"),
        interval_events(lambda pos: np.ceil(np.sqrt(pos)) + 1, 1.0, label="[d, 2d], d = sqrt n"),
    ]
    stops = _decades(cfg.n)
    res = _summaries(cfg, stops, lambda s, _: {f"f{i}": s.event_counts[i] for i in range(len(families))},
                     capacity=0, families=families)
    centers = {i: [f.centering(stop) for stop in stops] for i, f in enumerate(families)}
    for k, stop in enumerate(stops):
        mean = res[f"f0@{stop}"].mean()
        c = centers[0][k]
        if stop == stops[-1]:
            out.band("mean_count_divergent", stop, mean, c, c / th["factor"], c * th["factor"])
        else:
            out.report("mean_count_divergent", stop, mean, c, c / th["factor"], c * th["factor"])
        out.report("mean_count_convergent", stop, res[f"f1@{stop}"].mean(), centers[1][k])
    growth = res[f"f0@{stops[-1]}"].mean() - res[f"f0@{stops[0]}"].mean()
    out.add("count_growth_divergent", stops[-1], growth, NAN, 0.0, NAN, "pass" if growth > 0 else "fail")
    med = float(np.median(res[f"f1@{stops[-1]}"]))
    out.add("median_count_convergent", stops[-1], med, NAN, NAN, th["convergent_median"],
            "pass" if med <= th["convergent_median"] else "fail")
    out.report("mean_count_equality", cfg.n, res[f"f2@{cfg.n}"].mean(), centers[2][-1])
    out.report("mean_count_interval", cfg.n, res[f"f3@{cfg.n}"].mean(), centers[3][-1])
    for name, fam, expect in (("classifier_divergent_family", BertrandFamily(1, 0, 1), "divergent"),
                              ("classifier_convergent_family", BertrandFamily(1, 0, 1.5), "convergent")):
        got = series_classifier(fam).verdict
        out.add(name, 0, float(got == "divergent"), float(expect == "divergent"), NAN, NAN,
                "pass" if got == expect else "fail")
    return out.rows


@register("trimmed-slln", "strong law for prime-digit sums with the maximum removed",
          dict(n=10**6, trajectories=200, initial_law="lebesgue"), dict(low=0.75, high=1.35, early=10**3))
def _trimmed(cfg):
    out = _Rows(cfg)
    th = REGISTRY["trimmed-slln"].thresholds
    if cfg.n < 16:
        raise DomainError("trimmed-slln needs n >= 16")
    stops = [th["early"], cfg.n] if cfg.n > th["early"] else [cfg.n]

    def snap(s, stop):
        return {"t": LOG2 * (s.sum_prime - s.max_prime) / (stop * _loglog(stop))}

    res = _summaries(cfg, stops, snap, capacity=1)
    med = {stop: float(np.median(res[f"t@{stop}"])) for stop in stops}
    if len(stops) == 2:
        out.report("trimmed_ratio_median", stops[0], med[stops[0]], 1.0)
    out.band("trimmed_ratio_median", cfg.n, med[cfg.n], 1.0, th["low"], th["high"])
    bp = norming("bPrime", cfg.n)
    if bp <= gauss_context().bound:
        pred = LOG2 * truncated_expectation(int(bp)).value / _loglog(cfg.n)
        out.report("finite_n_prediction", cfg.n, pred, 1.0)
    if len(stops) == 2:
        a, b = abs(med[stops[0]] - 1), abs(med[cfg.n] - 1)
        out.add("distance_to_one", cfg.n, b, a, NAN, a, "pass" if b < a else "fail")
    return out.rows


@register("slln-dichotomy", "sums against b_n: limsup infinite or limit zero",
          dict(n=10**6, trajectories=100, initial_law="lebesgue"))
def _dichotomy(cfg):
    out = _Rows(cfg)
    stops = sorted({int(x) for x in np.unique(np.logspace(2, math.log10(cfg.n), 25).astype(np.int64))} | {cfg.n})
    stops = [s for s in stops if s >= 16]
    fams = {"divergent": BertrandFamily(1, 0, 1), "convergent": BertrandFamily(1, 0, 2)}

    def snap(s, stop):
        return {key: s.sum_prime / float(f(stop)) for key, f in fams.items()} | {"mean": s.sum_prime / stop}

    res = _summaries(cfg, stops, snap, capacity=0)
    for key, fam in fams.items():
        path = np.stack([res[f"{key}@{stop}"] for stop in stops])
        out.report(f"median_max_ratio_{key}", cfg.n, float(np.median(path.max(axis=0))))
        out.report(f"median_final_ratio_{key}", cfg.n, float(np.median(path[-1])))
        got = series_classifier(fam).verdict
        out.add(f"classifier_{key}", 0, float(got == "divergent"), float(key == "divergent"), NAN, NAN,
                "pass" if got == key else "fail")
    out.report("median_mean_prime_digit", cfg.n, float(np.median(res[f"mean@{cfg.n}"])))
    return out.rows


@register("funny-norm", "limsup of sums along the exp(j log^2 j) norming",
          dict(n=10**6, trajectories=100, initial_law="lebesgue"))
def _funny(cfg):
    out = _Rows(cfg)
    if cfg.n <= funny_epoch(4):
        raise DomainError(f"funny-norm needs n > {funny_epoch(4):.6g}")
    stops, j = [], 4
    while funny_epoch(j) < cfg.n:
        stops.append(int(math.floor(funny_epoch(j))))
        j += 1
    stops.append(cfg.n)

    def snap(s, stop):
        return {"r": s.sum_prime / norming("dFunny", stop)}

    res = _summaries(cfg, stops, snap, capacity=0)
    path = np.stack([res[f"r@{stop}"] for stop in stops])
    for k, stop in enumerate(stops):
        out.report("median_ratio_at_block_end", stop, float(np.median(path[k])), 1.0)
    out.report("median_running_max_ratio", cfg.n, float(np.median(path.max(axis=0))), 1.0)
    out.report("max_running_max_ratio", cfg.n, float(path.max()), 1.0)
    return out.rows


@register("ratios", "relative size of prime digits and partial sums",
          dict(n=10**6, trajectories=100, initial_law="lebesgue"))
def _ratios(cfg):
    out = _Rows(cfg)
    g = RatioFamily(1.0, 0.0)

    def snap(s, stop):
        return {"r1": s.ratio_max[0], "r2": s.ratio_max[1], "r3": s.ratio_max[2], "exceed": s.ratio_exceed,
                "sums": s.sum_prime / s.sum_full}

    res = _summaries(cfg, [cfg.n], snap, capacity=0, ratio_g=g)
    frac = float((res[f"r1@{cfg.n}"] > 1).mean())
    out.add("fraction_prime_ratio_exceeds_one", cfg.n, frac, NAN, 0.0, NAN, "pass" if frac > 0 else "fail")
    out.report("mean_exceedances_prime_ratio", cfg.n, float(res[f"exceed@{cfg.n}"].mean()))
    out.report("median_max_prime_ratio", cfg.n, float(np.median(res[f"r1@{cfg.n}"])))
    out.report("median_max_tlogt_prime_ratio", cfg.n, float(np.median(res[f"r2@{cfg.n}"])))
    out.report("median_max_full_ratio", cfg.n, float(np.median(res[f"r3@{cfg.n}"])), 0.0)
    out.report("median_prime_over_full_sum", cfg.n, float(np.median(res[f"sums@{cfg.n}"])), 0.0)
    cases = (
        ("classifier_identity_prime", RatioFamily(0.0, 0.0), "primeSum", "divergent"),
        ("classifier_tlog2t_full", RatioFamily(2.0, 0.0), "fullSum", "divergent"),
        ("classifier_tloght_full", RatioFamily(0.5, 0.0), "fullSum", "convergent"),
        ("classifier_tlogt_over_loglog_full", RatioFamily(1.0, 1.0), "fullSum", "divergent"),
        ("classifier_tlogt_over_loglog2_full", RatioFamily(1.0, 2.0), "fullSum", "convergent"),
    )
    for name, fam, denom, expect in cases:
        got = ratio_integral_classifier(fam, denom).verdict
        out.add(name, 0, float(got == "divergent"), float(expect == "divergent"), NAN, NAN,
                "pass" if got == expect else "fail")
    return out.rows


def _moments_defaults(cfg: ExperimentConfig) -> dict:
    gamma = 0.5 if cfg.gamma is None else cfg.gamma
    if gamma > 1:
        return dict(n=10**6, trajectories=200, initial_law="lebesgue", gamma=gamma)
    return dict(n=10**7, trajectories=100, initial_law="gauss", gamma=gamma)


def _moments_check(cfg: ExperimentConfig) -> None:
    if cfg.gamma == 1.0:
        raise DomainError("gamma = 1 is the weak-law case; use the weak-law experiment")


def _trim_count(n: int) -> int:
    return math.ceil(_loglog(n) ** 2)


@register("moments", "powers of prime digits: mean for gamma < 1, trimmed sums for gamma > 1",
          _moments_defaults, dict(relative=0.05, early=10**4, low=0.5, high=2.0), _moments_check)
def _moments(cfg):
    out = _Rows(cfg)
    th = REGISTRY["moments"].thresholds
    gamma = cfg.gamma
    if gamma < 1:
        ref = moment_constant(gamma)
        res = _summaries(cfg, [cfg.n], lambda s, _: {"p": s.power_sum(gamma)}, gammas=(gamma,), capacity=0)
        value = res[f"p@{cfg.n}"].sum() / (cfg.n * cfg.trajectories)
        tol = th["relative"] * ref.value
        out.band("pooled_power_mean", cfg.n, value, ref.value, ref.value - tol, ref.value + tol)
        out.report("moment_constant_bracket", 0, ref.value, ref.value, ref.lower, ref.upper)
        return out.rows
    if cfg.n < 16:
        raise DomainError("trimmed moments need n >= 16")
    stops = [th["early"], cfg.n] if cfg.n > th["early"] else [cfg.n]
    cap = _trim_count(cfg.n)

    def snap(s, stop):
        b = _trim_count(stop)
        return {"r": s.trimmed_sum(b, gamma) / norming("dGamma", stop, gamma=gamma, b=b)}

    res = _summaries(cfg, stops, snap, gammas=(gamma,), capacity=cap)
    for stop in stops:
        r = res[f"r@{stop}"]
        med = float(np.median(r))
        if stop == cfg.n:
            out.report("trimmed_ratio_median", stop, med, 1.0, th["low"], th["high"])
        else:
            out.report("trimmed_ratio_median", stop, med, 1.0)
        out.report("trimmed_ratio_iqr", stop, _iqr(r))
    if len(stops) == 2:
        a, b = _iqr(res[f"r@{stops[0]}"]), _iqr(res[f"r@{cfg.n}"])
        out.add("dispersion_shrinks", cfg.n, b, a, NAN, a, "pass" if b < a else "fail")
    return out.rows


@register("weak-law", "normalised prime-digit sums: which limit constant",
          dict(n=10**6, trajectories=500, initial_law="lebesgue"))
def _weak(cfg):
    out = _Rows(cfg)
    if cfg.n < 16:
        raise DomainError("weak-law needs n >= 16")
    res = _summaries(cfg, [cfg.n], lambda s, stop: {"w": s.sum_prime / (stop * _loglog(stop))}, capacity=0)
    med = float(np.median(res[f"w@{cfg.n}"]))
    inv, direct = 1 / LOG2, LOG2
    out.report("median_sum_over_n_loglog_n", cfg.n, med)
    out.report("distance_to_inverse_log2", cfg.n, abs(med - inv), inv)
    out.report("distance_to_log2", cfg.n, abs(med - direct), direct)
    out.report("closer_candidate", cfg.n, inv if abs(med - inv) <= abs(med - direct) else direct)
    return out.rows


@register("max-law", "distributional limit of the largest prime digit",
          dict(n=10**5, trajectories=2000, initial_law="lebesgue"), dict(ks_max=0.10, early=10**3))
def _maxlaw(cfg):
    out = _Rows(cfg)
    th = REGISTRY["max-law"].thresholds
    if cfg.n < 3:
        raise DomainError("max-law needs n >= 3")
    stops = [th["early"], cfg.n] if cfg.n > th["early"] else [cfg.n]
    res = _summaries(cfg, stops, lambda s, stop: {"m": LOG2 * math.log(stop) / stop * s.max_prime}, capacity=0)
    ks = {stop: ks_statistic(res[f"m@{stop}"], THETA) for stop in stops}
    if len(stops) == 2:
        out.report("ks_theta", stops[0], ks[stops[0]])
    out.add("ks_theta", cfg.n, ks[cfg.n], 0.0, NAN, th["ks_max"], "pass" if ks[cfg.n] <= th["ks_max"] else "fail")
    if len(stops) == 2:
        out.add("ks_decreases", cfg.n, ks[cfg.n], ks[stops[0]], NAN, ks[stops[0]],
                "pass" if ks[cfg.n] < ks[stops[0]] else "fail")
    return out.rows


def _poisson_check(cfg: ExperimentConfig) -> None:
    check_hitting_params(cfg.level, cfg.n, cfg.theta, cfg.modulus)


@register("poisson", "gaps, size marks and residue marks of large prime digits",
          dict(n=100, trajectories=50, initial_law="lebesgue", level=50, theta=0.5, modulus=4),
          dict(ks_max=0.05, sigmas=4.0, chi2_level=0.99), _poisson_check)
def _poisson(cfg):
    out = _Rows(cfg)
    th = REGISTRY["poisson"].thresholds
    l, theta, m = cfg.level, cfg.theta, cfg.modulus

    def work(seeds):
        gaps, digits = [], []
        for seed in seeds:
            rec = hitting_process(make_source(cfg.backend, seed, cfg.initial_law), l, cfg.n, theta, m)
            gaps.append(rec.gaps)
            digits.append(rec.digits)
        return {"gaps": np.concatenate(gaps), "digits": np.concatenate(digits)}

    res = map_batches(cfg, work)
    gaps, digits = res["gaps"].astype(np.float64), res["digits"]
    total = gaps.size
    scale = LOG2 * l * math.log(l)
    ks = ks_statistic(gaps / scale, EXP1)
    out.add("gap_ks_exp1", total, ks, 0.0, NAN, th["ks_max"], "pass" if ks <= th["ks_max"] else "fail")
    rate = prime_tail(l).value
    out.report("gap_ks_exp1_exact_rate", total, ks_statistic(gaps * rate, EXP1), 0.0)
    out.report("mean_scaled_gap", total, float(gaps.mean() / scale), 1.0)
    q = prime_tail(math.ceil(l / theta)).value / rate
    se = math.sqrt(q * (1 - q) / total)
    marks = float((digits >= math.ceil(l / theta)).mean())
    out.band("size_mark_frequency", total, marks, q, q - th["sigmas"] * se, q + th["sigmas"] * se)
    classes = [j for j in range(1, m + 1) if math.gcd(j, m) == 1]
    counts = [int(np.sum(digits % m == j % m)) for j in classes]
    chi2 = chi_square_uniform(counts)
    df = totient(m) - 1
    if 1 <= df <= 7:
        crit = chi_square_critical(df, th["chi2_level"])
        out.add("residue_chi_square", total, chi2, float(df), NAN, crit, "pass" if chi2 <= crit else "fail")
    else:
        out.report("residue_chi_square", total, chi2, float(df))
    return out.rows


@register("clt", "central limit theorem for counts of prime-digit events",
          dict(n=10**4, trajectories=2000, initial_law="gauss"), dict(ks_max=0.05))
def _clt(cfg):
    out = _Rows(cfg)
    th = REGISTRY["clt"].thresholds
    families = {
        "A": threshold_events(2, label="a' >= 2"),
        "B": equality_events(3, label="a' = 3"),
        "C": interval_events(lambda pos: np.ceil(np.sqrt(pos)) + 1, 1.0, label="[d, 2d], d = sqrt n"),
    }
    res = _summaries(cfg, [cfg.n], lambda s, _: {k: s.event_counts[i] for i, k in enumerate(families)},
                     capacity=0, families=list(families.values()))
    for key, fam in families.items():
        counts = res[f"{key}@{cfg.n}"]
        center = fam.centering(cfg.n)
        sd = counts.std(ddof=1)
        z = (counts - center) / sd if sd > 0 else np.zeros_like(counts)
        ks = ks_statistic(z, STD_NORMAL)
        out.report(f"mean_count_{key}", cfg.n, float(counts.mean()), center)
        if key == "A":
            out.add("clt_ks_A", cfg.n, ks, 0.0, NAN, th["ks_max"], "pass" if ks <= th["ks_max"] else "fail")
        else:
            out.report(f"clt_ks_{key}", cfg.n, ks, 0.0)
    return out.rows


@register("diamond-vaaler", "trimmed strong law for the full digits",
          dict(n=10**6, trajectories=100, initial_law="lebesgue"), dict(low=0.5, high=1.5))
def _dv(cfg):
    out = _Rows(cfg)
    th = REGISTRY["diamond-vaaler"].thresholds
    if cfg.n < 2:
        raise DomainError("diamond-vaaler needs n >= 2")
    res = _summaries(cfg, [cfg.n],
                     lambda s, stop: {"t": LOG2 * (s.sum_full - s.max_full) / (stop * math.log(stop))}, capacity=0)
    out.band("trimmed_full_ratio_median", cfg.n, float(np.median(res[f"t@{cfg.n}"])), 1.0, th["low"], th["high"])
    return out.rows


# --- entry points ------------------------------------------------------------

def resolve(cfg: ExperimentConfig) -> ExperimentConfig:
    """Fill experiment defaults and validate; errors name the violated condition."""
    if cfg.experiment not in REGISTRY:
        raise DomainError(f"unknown experiment {cfg.experiment!r}; try --list")
    check_common(cfg)
    exp = REGISTRY[cfg.experiment]
    defaults = exp.defaults(cfg) if callable(exp.defaults) else exp.defaults
    filled = {k: v for k, v in defaults.items() if getattr(cfg, k) is None}
    cfg = cfg.replace(**filled)
    check_common(cfg)
    if exp.check is not None:
        exp.check(cfg)
    return cfg


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    cfg = resolve(cfg)
    start = time.perf_counter()
    rows = REGISTRY[cfg.experiment].run(cfg)
    return ExperimentReport(cfg.experiment, cfg.echo(), rows, __version__, time.perf_counter() - start)
