from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kurzlab.psi import DyadicPsi, f_P, normalize_psi, parse_psi
from kurzlab.sets import ALL_PRIMES, parse_prime_set


@pytest.mark.parametrize("lit,k,value", [
    ("dyadic:2^-k", 3, Fraction(1, 8)),
    ("dyadic:2^-2k", 3, Fraction(1, 64)),
    ("dyadic:2^-k-2", 3, Fraction(1, 32)),
    ("dyadic:2^-(k+2)", 3, Fraction(1, 32)),
    ("const:1/4", 9, Fraction(1, 4)),
    ("zero", 1, Fraction(0)),
    ("dyadic:2^-k", 0, Fraction(1, 2)),
])
def test_parse_values(lit, k, value):
    assert parse_psi(lit).block(k) == value


@pytest.mark.parametrize("lit", ["dyadic:2^-k", "dyadic:2^-2k", "dyadic:2^-k-2", "const:1/4", "zero"])
def test_string_round_trip(lit):
    assert str(parse_psi(lit)) == lit


@given(st.integers(1, 2**40))
def test_call_uses_block(n):
    psi = parse_psi("dyadic:2^-k")
    assert psi(n) == min(Fraction(1, 2), Fraction(1, 2 ** (n.bit_length() - 1)))


def test_json_round_trip():
    psi = DyadicPsi(((1, Fraction(1, 3)), (2, Fraction(1, 5))), "pow:2,0")
    assert DyadicPsi.from_json(psi.to_json()) == psi


def test_rejects_increasing():
    with pytest.raises(ValueError):
        DyadicPsi(((1, Fraction(1, 8)), (2, Fraction(1, 4))))


@pytest.mark.parametrize("n,expected", [(1, Fraction(1)), (2, Fraction(3, 2)), (3, Fraction(2))])
def test_f_P(n, expected):
    assert f_P(ALL_PRIMES, n) == expected


def test_f_P_residue_class():
    assert f_P(parse_prime_set("mod:3,4"), 10) == Fraction(32, 21)


def test_normalize_harmonic():
    psi = normalize_psi(lambda n: Fraction(1, n), 12, ALL_PRIMES)
    for k in range(1, 13):
        assert psi.block(k) == Fraction(1, 2 ** (k + 1))


@given(st.integers(0, 6), st.integers(2, 14))
def test_normalize_bounds(a, K):
    psi = normalize_psi(lambda n: Fraction(1, n ** a) if a else Fraction(1, 2), K, ALL_PRIMES)
    for k in range(K + 1):
        v = psi.block(k)
        assert v <= Fraction(1, 2)
        assert v <= f_P(ALL_PRIMES, 2**k) / 2**k
        assert v >= min(Fraction(1, 4**k), f_P(ALL_PRIMES, 2**k) / 2**k, Fraction(1, 2))
    vals = [psi.block(k) for k in range(K + 4)]
    assert all(b <= a_ for a_, b in zip(vals, vals[1:]))
