import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from primecf.cf_stream import (
    CHUNK,
    BitStream,
    LazyRealSource,
    NaturalExtensionBatch,
    NaturalExtensionSource,
    RationalSource,
    SourceBatch,
    cross_validate_sources,
    digits_of_rational,
    gauss_initial_ratio,
    iter_digit_chunks,
    make_batch,
    make_source,
    ne_step,
    prime_digit_value,
    sample_trajectory,
)
from primecf.errors import DomainError, RefinementLimitError
from primecf.primes import build_table


def evaluate(digits):
    x = Fraction(0)
    for a in reversed(digits):
        x = 1 / (a + x)
    return x


@pytest.mark.parametrize(
    "num, den, expected",
    [(1, 1, [1]), (1, 2, [2]), (7, 10, [1, 2, 3]), (3, 7, [2, 3]), (13, 21, [1, 1, 1, 1, 1, 2])],
)
def test_rational_digits(num, den, expected):
    assert digits_of_rational(num, den) == expected


def test_rational_digit_limit():
    assert digits_of_rational(13, 21, 3) == [1, 1, 1]


@given(st.integers(1, 10**12), st.integers(1, 10**12))
def test_rational_digits_reconstruct_value(a, b):
    num, den = min(a, b), max(a, b)
    digits = digits_of_rational(num, den)
    assert evaluate(digits) == Fraction(num, den)
    assert all(d >= 1 for d in digits)
    assert digits[-1] >= 2 or num == den


def test_rational_source_errors():
    for num, den in [(0, 1), (2, 1), (1, 0), (-1, 2)]:
        with pytest.raises(DomainError):
            RationalSource(num, den)


def test_rational_source_exhausts():
    src = RationalSource(1, 2)
    assert src.next_digit() == 2
    with pytest.raises(StopIteration):
        src.next_digit()
    assert src.next_chunk(5).tolist() == []


@pytest.mark.parametrize("v, digit, r_new", [(0.6, 1, 1.0), (0.4, 2, 0.5)])
def test_ne_step_from_zero_ratio(v, digit, r_new):
    k, r = ne_step(0.0, v)
    assert k == digit
    assert r == pytest.approx(r_new)


@given(st.floats(0.0, 1.0), st.floats(1e-9, 1.0))
def test_ne_step_digit_matches_conditional_inverse(r, v):
    # s solves F(s) = v for F(s) = (1+r)s/(1+rs); the digit must be floor(1/s)
    s = mpmath.mpf(v) / (1 + r - r * mpmath.mpf(v))
    inv = 1 / s
    k, r_new = ne_step(r, v)
    if abs(inv - mpmath.nint(inv)) > 1e-9 * inv:
        assert k == int(mpmath.floor(inv))
    assert r_new == pytest.approx(1.0 / (k + r))
    assert 0.0 < r_new <= 1.0


def test_gauss_initial_ratio_is_inverse_cdf():
    # P(r <= t) = log2(1+t) for the Gauss law
    for w in (0.0, 0.25, 0.5, 1.0):
        assert math.log2(1 + gauss_initial_ratio(w)) == pytest.approx(w)


def test_lazy_real_first_digit_from_pinned_bits():
    # bits 11000 pin u to [0.75, 0.78125), inside (1/2, 1]
    src = LazyRealSource(iter([1, 1, 0, 0, 0]), budget=5)
    assert src.next_digit() == 1


def test_lazy_real_defers_on_straddling_interval():
    src = LazyRealSource(iter([1]), budget=1)
    with pytest.raises(RefinementLimitError):
        src.next_digit()
    assert cross_validate_sources(next(s for s in range(100) if BitStream(s).take(1) == 1), 1)


def test_lazy_real_budget_error_mentions_digit():
    with pytest.raises(RefinementLimitError, match="digit 1"):
        LazyRealSource(iter([0] * 10), budget=4).next_digit()


@pytest.mark.parametrize("seed", range(20))
def test_cross_validation_64_bits(seed):
    assert cross_validate_sources(seed, 64)


@given(st.integers(0, 2**32), st.integers(1, 200))
def test_cross_validation_property(seed, bits):
    assert cross_validate_sources(seed, bits)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=160))
def test_lazy_digits_are_a_prefix_of_euclid(bits):
    k = int("".join(map(str, bits)), 2)
    if k == 0:
        return
    exact = digits_of_rational(k, 1 << len(bits))
    src = LazyRealSource(iter(bits), budget=len(bits))
    emitted = []
    try:
        while True:
            emitted.append(src.next_digit())
    except RefinementLimitError:
        pass
    assert emitted == exact[: len(emitted)]


def test_lazy_real_agrees_with_float_expansion():
    u = BitStream(7).take(53) / 2.0**53
    digits = [d for d in make_source("lazy-real", 7).take(8)]
    x = Fraction(u)
    for d in digits:
        assert math.floor(1 / x) == d
        x = 1 / x - d


def test_bitstream_is_deterministic():
    assert BitStream(3).take(100) == BitStream(3).take(100)
    assert BitStream(3).take(100) != BitStream(4).take(100)


@pytest.mark.parametrize("law", ["lebesgue", "gauss"])
def test_natural_extension_chunk_matches_digitwise(law):
    a = NaturalExtensionSource(11, law)
    b = NaturalExtensionSource(11, law)
    chunked = np.concatenate([a.next_chunk(1000), a.next_chunk(CHUNK), a.next_chunk(7)])
    single = np.array([b.next_digit() for _ in range(chunked.size)])
    np.testing.assert_array_equal(chunked, single)
    assert a.r == b.r


@pytest.mark.parametrize("law", ["lebesgue", "gauss"])
def test_batch_lanes_match_scalar_sources(law):
    seeds = [5, 6, 7]
    batch = NaturalExtensionBatch(seeds, law)
    block = np.concatenate([batch.next_block(100), batch.next_block(CHUNK + 3)], axis=1)
    for j, s in enumerate(seeds):
        np.testing.assert_array_equal(block[j], NaturalExtensionSource(s, law).next_chunk(block.shape[1]))


def test_source_batch_wraps_scalar_sources():
    batch = make_batch("lazy-real", [1, 2])
    assert isinstance(batch, SourceBatch)
    block = batch.next_block(5)
    np.testing.assert_array_equal(block[1], sample_trajectory(2, 5, "lazy-real"))
    with pytest.raises(DomainError):
        SourceBatch([RationalSource(1, 2)]).next_block(3)


def test_sample_trajectory_is_deterministic():
    a = sample_trajectory(42, 5, "natural-extension", "lebesgue")
    assert a.tolist() == sample_trajectory(42, 5, "natural-extension", "lebesgue").tolist()
    assert len(a) == 5 and a.min() >= 1


def test_make_source_errors():
    with pytest.raises(DomainError):
        make_source("nope", 1)
    with pytest.raises(DomainError):
        make_source("lazy-real", 1, "gauss")
    with pytest.raises(DomainError):
        make_source("exact-rational", 1)
    with pytest.raises(DomainError):
        NaturalExtensionSource(1, "uniform")
    with pytest.raises(DomainError):
        sample_trajectory(1, 0)


def test_iter_digit_chunks_respects_breaks():
    src = NaturalExtensionSource(1)
    sizes = [c.size for c in iter_digit_chunks(src, 100, breaks=[10, 55], chunk=30)]
    assert sizes == [10, 30, 15, 30, 15]
    assert np.cumsum(sizes).tolist()[:3] == [10, 40, 55]


@pytest.mark.parametrize("d, expected", [(7, 7), (9, 0), (1, 0), (2, 2)])
def test_prime_digit_value(d, expected):
    assert prime_digit_value(d, build_table(100)) == expected


@pytest.mark.parametrize("backend, count", [("lazy-real", 20_000), ("natural-extension", 5_000)])
def test_first_digit_law_under_lebesgue_start(backend, count):
    # Lebesgue mass of I_k is 1/k - 1/(k+1); independent first digits, 3 standard errors
    first = np.array([make_source(backend, s).next_digit() for s in range(count)])
    for k in range(1, 6):
        p = 1 / k - 1 / (k + 1)
        se = math.sqrt(p * (1 - p) / count)
        assert abs(np.mean(first == k) - p) <= 3 * se


def test_stationary_frequency_of_digit_one():
    digits = NaturalExtensionBatch(range(10), "gauss").next_block(100_000).ravel()
    p = float(mpmath.log(mpmath.mpf(4) / 3) / mpmath.log(2))
    assert p == pytest.approx(0.415037, abs=1e-6)
    se = math.sqrt(p * (1 - p) / digits.size)
    assert abs(np.mean(digits == 1) - p) <= 4 * se
