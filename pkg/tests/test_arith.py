import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kurzlab.arith import (big_omega, divisors, factorize, is_probable_prime, mobius_sq, omega,
                           phi_ratio_id_check, primes_in_range, primes_upto,
                           shifted_prime_product, simple_sieve, totient, totient_table)


def brute_totient(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


@pytest.mark.parametrize("n,phi", [(1, 1), (12, 4), (97, 96), (100, 40), (2**10, 2**9)])
def test_totient_values(n, phi):
    assert totient(n) == phi


@given(st.integers(1, 3000))
def test_totient_brute(n):
    assert totient(n) == brute_totient(n)


def test_totient_table_matches():
    tab = totient_table(2000)
    assert all(int(tab[n]) == totient(n) for n in range(1, 2001))


@given(st.integers(2, 10**15))
def test_factorize_reconstructs(n):
    fac = factorize(n)
    assert math.prod(p**e for p, e in fac.items()) == n
    assert all(is_probable_prime(p) for p in fac)


@pytest.mark.parametrize("n,expected", [(18, 0), (30, 1), (1, 1), (49, 0)])
def test_mobius_sq(n, expected):
    assert mobius_sq(n) == expected


def test_omega_counts():
    assert omega(360) == 3 and big_omega(360) == 6


def test_divisors():
    assert divisors(36) == [1, 2, 3, 4, 6, 9, 12, 18, 36]


@given(st.integers(1, 5000))
def test_phi_ratio_identity(n):
    lhs, rhs, diff = phi_ratio_id_check(n)
    assert lhs == Fraction(n, totient(n)) and diff == 0


def test_primality_against_sieve():
    s = simple_sieve(10**5)
    ps = set(int(p) for p in primes_upto(10**5))
    assert all(is_probable_prime(n) == (n in ps) for n in range(10**5))
    assert len(s) == len(ps) == 9592


@pytest.mark.parametrize("n", [2**61 - 1, 1_000_000_007, 998244353])
def test_large_primes(n):
    assert is_probable_prime(n)


@pytest.mark.parametrize("n", [561, 1105, 2**61 + 1, 3215031751])
def test_composites(n):
    assert not is_probable_prime(n)


@given(st.integers(0, 10**7), st.integers(0, 3 * 10**5))
def test_segmented_range(lo, span):
    got = primes_in_range(lo, lo + span)
    ref = primes_upto(lo + span)
    assert np.array_equal(got, ref[(ref >= lo) & (ref < lo + span)])


def test_shifted_prime_product():
    ps = primes_upto(30)
    expect = Fraction(1)
    for p in ps:
        expect *= Fraction(int(p) + 1, int(p))
    assert shifted_prime_product(ps, 1) == expect
