import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from primecf.errors import DomainError
from primecf.primes import (
    almost_prime_class,
    build_table,
    default_table,
    is_probable_prime,
    prime_digit_class,
    residue_of_prime,
    totient,
)

ORACLE_BOUND = 200_000


def brute_sieve(n):
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


ORACLE = brute_sieve(ORACLE_BOUND)
ORACLE_PRIMES = np.flatnonzero(ORACLE)
SMALL = build_table(ORACLE_BOUND)


@pytest.fixture
def small():
    return SMALL


def test_primes_upto_matches_oracle(small):
    np.testing.assert_array_equal(small.primes_upto(), ORACLE_PRIMES)


@given(st.integers(0, ORACLE_BOUND))
def test_pi_and_membership_match_oracle(x):
    assert SMALL.pi(x) == int(ORACLE[: x + 1].sum())
    assert SMALL.is_prime(x) == bool(ORACLE[x])


@given(st.integers(0, ORACLE_BOUND), st.integers(0, ORACLE_BOUND))
def test_interval_count_is_difference_of_pi(a, b):
    lo, hi = min(a, b), max(a, b)
    t = default_table()
    assert t.count_primes_in_interval(lo, hi) == int(ORACLE[lo + 1 : hi + 1].sum())


@pytest.mark.parametrize("x, expected", [(2, 1), (10, 4), (100, 25), (1, 0), (0, 0)])
def test_pi_small_values(small, x, expected):
    assert small.pi(x) == expected


def test_pi_one_million():
    assert build_table(10**6).pi(10**6) == 78498


def test_is_prime_small_cases(small):
    assert small.is_prime(2)
    assert not small.is_prime(1)
    assert not small.is_prime(9)


@pytest.mark.parametrize("n, expected", [(1, 2), (2, 3), (25, 97), (100, 541)])
def test_nth_prime_values(small, n, expected):
    assert small.nth_prime(n) == expected


@given(st.integers(1, ORACLE_PRIMES.size))
def test_nth_prime_inverts_pi(n):
    t = default_table()
    p = t.nth_prime(n)
    assert p == ORACLE_PRIMES[n - 1]
    assert t.pi(p) == n


def test_nth_prime_growth_at_one_million():
    ratio = default_table().nth_prime(10**6) / (10**6 * math.log(10**6))
    assert 1.0 <= ratio <= 1.2


@pytest.mark.parametrize("lo, hi, expected", [(10, 20, 4), (2, 2, 0), (100, 150, 10)])
def test_count_primes_in_interval(small, lo, hi, expected):
    assert small.count_primes_in_interval(lo, hi) == expected


def test_full_table_is_bit_packed():
    assert default_table().nbytes <= 2 * 10**7


def test_table_errors(small):
    with pytest.raises(DomainError):
        build_table(1)
    with pytest.raises(DomainError, match="exceeds sieve bound"):
        small.pi(ORACLE_BOUND + 1)
    with pytest.raises(DomainError):
        small.nth_prime(0)
    with pytest.raises(DomainError):
        small.nth_prime(10**6)
    with pytest.raises(DomainError):
        small.count_primes_in_interval(5, 4)


def test_prime_part_vectorised(small):
    d = np.arange(1, 5000)
    np.testing.assert_array_equal(small.prime_part(d), np.where(ORACLE[1:5000], d, 0))


def test_miller_rabin_against_sieve():
    got = np.array([is_probable_prime(n) for n in range(ORACLE_BOUND + 1)])
    np.testing.assert_array_equal(got, ORACLE)


@pytest.mark.parametrize("n", [2**61 - 1, 2**89 - 1, 1_000_000_007])
def test_miller_rabin_large_primes(n):
    assert is_probable_prime(n)


@pytest.mark.parametrize("n", [561, 41041, 825265, 3215031751, 2**61 + 1, (2**31 - 1) * (2**61 - 1)])
def test_miller_rabin_composites(n):
    assert not is_probable_prime(n)


def test_is_prime_beyond_sieve(small):
    assert small.is_prime(1_000_000_007)
    assert not small.is_prime(1_000_000_007 * 3)


@pytest.mark.parametrize("m, expected", [(1, 1), (12, 4), (4, 2), (97, 96), (100, 40)])
def test_totient_values(m, expected):
    assert totient(m) == expected


@given(st.integers(1, 2000))
def test_totient_counts_coprime_residues(m):
    assert totient(m) == sum(math.gcd(j, m) == 1 for j in range(1, m + 1))


def test_totient_rejects_zero():
    with pytest.raises(DomainError):
        totient(0)


@pytest.mark.parametrize("p, m, expected", [(7, 4, 3), (11, 3, 2), (101, 10, 1)])
def test_residue_of_prime(p, m, expected):
    assert residue_of_prime(p, m) == expected


def test_residue_errors():
    with pytest.raises(DomainError):
        residue_of_prime(3, 4)
    with pytest.raises(DomainError):
        residue_of_prime(9, 4)
    with pytest.raises(DomainError):
        residue_of_prime(7, 1)


def test_residues_mod_four_split_evenly():
    p = build_table(10**6).primes_upto()
    p = p[p > 50]
    share = np.mean(p % 4 == 1)
    assert abs(share - 0.5) < 0.01
    assert set(np.unique(p % 4)) == {1, 3}


def test_digit_classes():
    primes = prime_digit_class(build_table(1000))
    assert 7 in primes and 9 not in primes and 1 not in primes
    assert prime_digit_class().label == "prime"
    semi = almost_prime_class(2)
    assert [n for n in range(1, 16) if n in semi] == [4, 6, 9, 10, 14, 15]
    np.testing.assert_array_equal(semi.mask([4, 5, 6]), [True, False, True])
    with pytest.raises(DomainError):
        almost_prime_class(0)
