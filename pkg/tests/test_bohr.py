from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kurzlab.bohr import (GapTriple, case_label, enumerate_bohr, gap_embedding, gap_members,
                          in_gap, totient_average_over_bohr, verify_inclusion)
from kurzlab.realnum import frac_dist, parse_alpha


def bohr_brute(alpha, ell, t):
    return [n for n in range(1, 2**ell + 1) if frac_dist(alpha, n).value <= t]


def test_rational_example():
    b = enumerate_bohr(parse_alpha("rat:1/4"), 3, Fraction(1, 4))
    assert b.members.tolist() == [1, 3, 4, 5, 7, 8]


@pytest.mark.parametrize("lit", ["golden", "sqrt2", "sqrt3"])
@pytest.mark.parametrize("ell,t", [(10, Fraction(1, 32)), (9, Fraction(1, 7)), (8, Fraction(1, 4))])
def test_scan_matches_exact(lit, ell, t):
    a = parse_alpha(lit)
    b = enumerate_bohr(a, ell, t, workers=2)
    assert b.members.tolist() == bohr_brute(a, ell, t)
    assert b.uncertain == []


def test_large_t_is_everything():
    b = enumerate_bohr(parse_alpha("golden"), 6, Fraction(1, 2))
    assert len(b) == 64


@pytest.mark.parametrize("lit", ["golden", "sqrt2", "sqrt3"])
@pytest.mark.parametrize("ell", [8, 11, 14])
def test_inclusion_with_scan_oracle(lit, ell):
    a = parse_alpha(lit)
    for i in range(2, ell // 2 + 1):
        t = Fraction(1, 2**i)
        g = gap_embedding(a, ell, t)
        members = enumerate_bohr(a, ell, t).members
        assert verify_inclusion(members, g) == []
        # O(z^2) enumeration of the progression as an independent oracle
        if (2 * g.z + 1) ** 2 <= 1 << 22:
            P = set(gap_members(g, 2**ell))
            assert set(members.tolist()) <= P


@given(st.integers(1, 60), st.integers(1, 60), st.integers(0, 12),
       st.lists(st.integers(-3000, 3000), min_size=1, max_size=40))
def test_in_gap_matches_enumeration(x, dy, z, values):
    import math
    y = x + dy
    if math.gcd(x, y) != 1:
        return
    g = GapTriple(x, y, z)
    P = set(gap_members(g, 10**6))
    assert in_gap(g, values).tolist() == [v in P for v in values]


def test_gap_example_golden():
    g = gap_embedding(parse_alpha("golden"), 12, Fraction(1, 64))
    assert (g.x, g.y) == (987, 1597)


@pytest.mark.parametrize("c,ell,t,label", [
    (Fraction(1, 2), 10, Fraction(1, 2**12), "empty"),
    (Fraction(1, 3), 10, Fraction(1, 2**9), "loglog"),
    (Fraction(1, 3), 20, Fraction(1, 2**5), "main"),
])
def test_case_labels(c, ell, t, label):
    assert case_label(c, ell, t) == label


def test_totient_average_golden():
    ta = totient_average_over_bohr(parse_alpha("golden"), 14, Fraction(1, 128))
    assert ta.count == 255
    assert abs(float(ta.normalized) - 3.858) < 1e-3
    assert ta.case_label == "main"


def test_rejects_degenerate():
    with pytest.raises(ValueError):
        gap_embedding(parse_alpha("golden"), 3, Fraction(1, 16))
