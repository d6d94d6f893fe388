"""
Tests for the sieve, factorization and prime sums
"""

import math
import random

import pytest
from sympy import factorint, isprime, primerange

from src.errors import ArgumentError, CapacityError
from src.number_theory.prime_engine import (
    SIEVE_CEILING,
    factorize,
    has_divisor_in,
    mertens_sum,
    prime_count,
    sieve_range,
)


def test_sieve_matches_trial_division():
    sieve = sieve_range(3000, segment_size=64)
    table = sieve.primality
    for n in range(3001):
        assert table[n] == isprime(n)
        assert sieve.is_prime(n) == isprime(n)


def test_sieve_small_examples():
    assert sieve_range(10).primes.tolist() == [2, 3, 5, 7]
    assert sieve_range(2).primes.tolist() == [2]
    assert prime_count(sieve_range(100), 100) == 25


def test_segment_size_does_not_change_result():
    a = sieve_range(10**5, segment_size=8 * 97)
    b = sieve_range(10**5)
    assert a.primes.tolist() == b.primes.tolist()
    assert a.primes.tolist() == list(primerange(0, 10**5 + 1))


def test_sieve_errors():
    with pytest.raises(ArgumentError):
        sieve_range(1)
    with pytest.raises(ArgumentError):
        sieve_range(100, segment_size=12)
    with pytest.raises(CapacityError):
        sieve_range(SIEVE_CEILING + 1)
    with pytest.raises(CapacityError):
        sieve_range(100).primes_up_to(101)


def test_primes_in_is_half_open():
    sieve = sieve_range(100)
    assert sieve.primes_in(3, 10).tolist() == [5, 7]
    assert sieve.primes_in(2.5, 2.8).tolist() == []
    assert sieve.primes_in(7, 7).tolist() == []


def test_factorize_examples():
    assert factorize(1).factors == ()
    assert factorize(1092).factors == ((2, 2), (3, 1), (7, 1), (13, 1))
    assert factorize(1029).factors == ((3, 1), (7, 3))
    with pytest.raises(ArgumentError):
        factorize(0)


def test_factorize_against_sympy():
    for n in [2**61 - 1, 600851475143, 10**12 + 39, 999999000001 * 999983, 2**62 - 57, 97 ** 5 * 89]:
        fac = factorize(n)
        assert dict(fac.factors) == factorint(n)
        assert fac.product() == n


def test_factorize_large_semiprime_is_deterministic():
    n = 1000003 * 1000033
    assert factorize(n).factors == ((1000003, 1), (1000033, 1))
    factorize.cache_clear()
    assert factorize(n).factors == ((1000003, 1), (1000033, 1))


def test_divisors_sorted():
    assert factorize(12).divisors() == [1, 2, 3, 4, 6, 12]


def test_prime_count_progression():
    sieve = sieve_range(100)
    assert prime_count(sieve, 100, 5, 1) == 5   # 11 31 41 61 71
    assert prime_count(sieve, 100, 7, 1) == 3   # 29 43 71


def test_mertens_sum():
    sieve = sieve_range(1000)
    assert mertens_sum(sieve, 3, 10) == pytest.approx(1 / 5 + 1 / 7)
    assert mertens_sum(sieve, 5, 5) == 0
    assert abs(mertens_sum(sieve, 10, 100) - math.log(2)) <= 0.1


def test_has_divisor_in():
    assert has_divisor_in(1092, 6, 7)
    assert not has_divisor_in(1092, 7, 11)
    assert has_divisor_in(1092, 12, 13)
    assert not has_divisor_in(1, 1, 10)
    assert has_divisor_in(1, 0, 1)


def test_has_divisor_in_against_naive_loop():
    rng = random.Random(11)
    for _ in range(400):
        n = rng.randint(1, 10**4)
        y = rng.uniform(0, 120)
        z = y + rng.uniform(0, 60)
        expected = any(n % d == 0 for d in range(math.floor(y) + 1, math.floor(z) + 1))
        assert has_divisor_in(n, y, z) == expected


def test_prime_count_residues_sum_to_pi():
    sieve = sieve_range(5000)
    for x in (100, 1000, 4999):
        pi = prime_count(sieve, x)
        for k in (2, 3, 4, 7, 12, 30):
            assert sum(prime_count(sieve, x, k, a) for a in range(k)) == pi


def test_prime_count_one_mod_four():
    assert prime_count(sieve_range(100), 100, 4, 1) == 11


def test_factorize_multiplies_back():
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randint(1, 10**15)
        fac = factorize(n)
        assert fac.product() == n
        assert all(isprime(p) for p, _ in fac.factors)
        assert [p for p, _ in fac.factors] == sorted({p for p, _ in fac.factors})


def test_mertens_sum_exact_example():
    assert mertens_sum(sieve_range(100), 2, 10) == pytest.approx(71 / 105, rel=1e-15)
