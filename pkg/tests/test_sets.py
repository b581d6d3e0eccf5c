import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kurzlab.arith import factorize
from kurzlab.sets import (ALL_PRIMES, IntegerSetSpec, check_hypothesis_I, count_set, d_k,
                          dyadic_stats, enumerate_set, landau_diagnostic, membership,
                          parse_prime_set, parse_set, sieve_form)


def two_squares_brute(N):
    ok = np.zeros(N + 1, dtype=bool)
    for a in range(math.isqrt(N) + 1):
        b = np.arange(a, math.isqrt(N - a * a) + 1)
        ok[a * a + b * b] = True
    return ok


def loeschian_brute(N):
    ok = np.zeros(N + 1, dtype=bool)
    for k in range(math.isqrt(N) + 1):
        for l in range(k, math.isqrt(N) + 1):
            v = k * k + k * l + l * l
            if v > N:
                break
            ok[v] = True
    return ok


@pytest.mark.parametrize("text,X,Y,expected", [
    ("s2", 1, 11, [1, 2, 4, 5, 8, 9, 10]),
    ("omega:0,2", 2, 16, [6, 10, 12, 14, 15]),
    ("primes", 1, 20, [2, 3, 5, 7, 11, 13, 17, 19]),
    ("loeschian", 1, 14, [1, 3, 4, 7, 9, 12, 13]),
    ("ap:1,4", 1, 14, [1, 5, 9, 13]),
    ("squarefree", 1, 11, [1, 2, 3, 5, 6, 7, 10]),
])
def test_small_enumerations(text, X, Y, expected):
    assert enumerate_set(parse_set(text), X, Y).tolist() == expected


def test_s2_matches_brute():
    N = 20000
    ref = two_squares_brute(N)
    got = enumerate_set(parse_set("s2"), 1, N + 1)
    assert np.array_equal(got, np.flatnonzero(ref[1:]) + 1)


def test_loeschian_matches_brute():
    N = 10000
    ref = loeschian_brute(N)
    got = enumerate_set(parse_set("loeschian"), 1, N + 1)
    assert np.array_equal(got, np.flatnonzero(ref[1:]) + 1)


KINDS = ["primes", "s2", "s2p", "loeschian", "lp", "inter", "ip", "s3", "squarefree",
         "omega:1,3", "bigomega:0,2", "ap:3,7", "all"]


@pytest.mark.parametrize("text", KINDS)
def test_sieve_agrees_with_membership(text):
    spec = parse_set(text)
    X, Y = 10**6, 10**6 + 3000
    got = set(enumerate_set(spec, X, Y).tolist())
    assert got == {n for n in range(X, Y) if membership(spec, n)}


@pytest.mark.parametrize("text", KINDS)
def test_worker_count_invariant(text):
    spec = parse_set(text)
    a = enumerate_set(spec, 1, 5 * 10**6, workers=1)
    b = enumerate_set(spec, 1, 5 * 10**6, workers=3)
    assert np.array_equal(a, b)
    assert count_set(spec, 1, 5 * 10**6, workers=2) == a.size


@given(st.integers(1, 2**34), st.integers(0, 2000), st.sampled_from(KINDS))
def test_count_matches_enumeration(X, span, text):
    spec = parse_set(text)
    assert count_set(spec, X, X + span) == enumerate_set(spec, X, X + span).size


@pytest.mark.parametrize("kind", ["s2p", "lp", "ip"])
def test_sieve_form_matches_factor_form(kind):
    N = 10**5
    mask = sieve_form(kind, N)
    got = set(np.flatnonzero(mask) + 1)
    ref = set(enumerate_set(parse_set(kind), 1, N + 1).tolist())
    assert got == ref


def test_primitive_sets_are_prime_supported():
    for n in enumerate_set(parse_set("s2p"), 1, 5000).tolist():
        assert all(p % 4 == 1 for p in factorize(n)) if n > 1 else True


def test_custom_predicate():
    spec = IntegerSetSpec("custom", predicate=lambda n: n % 5 == 2)
    assert enumerate_set(spec, 1, 20).tolist() == [2, 7, 12, 17]


def test_d_k_small():
    assert d_k(ALL_PRIMES, 2) == 2


def test_dyadic_stats_primes():
    st_ = dyadic_stats(parse_set("primes"), ALL_PRIMES, 2)
    assert st_.mu_k == 2


def test_squarefree_density():
    st_ = dyadic_stats(parse_set("squarefree"), ALL_PRIMES, 20)
    assert abs(st_.mu_k / 2**20 - 6 / math.pi**2) < 1e-3


def test_hypothesis_I():
    good = check_hypothesis_I(parse_set("s2p"), parse_prime_set("mod:3,4"), 0.5, [10])
    bad = check_hypothesis_I(parse_set("all"), ALL_PRIMES, 0.5, [10])
    assert good.holds and not bad.holds


def test_landau_small():
    c, ratio = landau_diagnostic(10**5)
    assert c == int(two_squares_brute(10**5)[1:].sum())
    assert 0.6 < ratio < 0.95


@pytest.mark.parametrize("bad", ["nope", "primes:3", "ap:1,0"])
def test_bad_specs(bad):
    with pytest.raises(ValueError):
        parse_set(bad)
