import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kurzlab.equi import (discrepancy_fixed, exponent_fit, fit_slope, interval_discrepancy,
                          orbit_points, star_discrepancy, weyl_sum)
from kurzlab.realnum import parse_alpha
from kurzlab.sets import enumerate_set, parse_set


def quadratic_discrepancy(xs):
    """max over closed intervals [a, b] and open gaps (a, b) between points (and 0, 1)."""
    xs = sorted(Fraction(x) for x in xs)
    M = len(xs)
    best = Fraction(0)
    for i in range(M):
        for j in range(i, M):
            cnt = j - i + 1
            best = max(best, cnt - M * (xs[j] - xs[i]))
    ends = [Fraction(0)] + xs + [Fraction(1)]
    for i in range(len(ends)):
        for j in range(i + 1, len(ends)):
            inside = sum(1 for x in xs if ends[i] < x < ends[j])
            best = max(best, M * (ends[j] - ends[i]) - inside)
    return best


@pytest.mark.parametrize("pts,D", [([Fraction(1, 2)], 1), ([Fraction(k, 10) for k in range(10)], 1)])
def test_discrepancy_examples(pts, D):
    assert interval_discrepancy(pts) == D


@given(st.lists(st.fractions(0, 1, max_denominator=50).filter(lambda x: x < 1), min_size=1, max_size=25))
def test_discrepancy_matches_quadratic_oracle(pts):
    assert interval_discrepancy(pts) == quadratic_discrepancy(pts)


@given(st.lists(st.integers(0, 2**12 - 1), min_size=1, max_size=200))
def test_fixed_point_matches_exact(us):
    u = np.array(us, dtype=np.int64)
    assert discrepancy_fixed(u, 12) == interval_discrepancy([Fraction(x, 2**12) for x in us])


def test_orbit_points_close_to_exact():
    a = parse_alpha("golden")
    ns = np.arange(1, 2000)
    u = orbit_points(a, ns, 36)
    v = a.approx(128).value
    for n, x in zip(ns.tolist(), u.tolist()):
        exact = (n * v) % 1 * 2**36
        assert abs(exact - x) <= 2


def test_primes_discrepancy_sublinear():
    a, spec = parse_alpha("golden"), parse_set("primes")
    d1 = star_discrepancy(a, spec, 2**12)
    d2 = star_discrepancy(a, spec, 2**18)
    assert d1.n_pts == 564
    assert d2.D / d1.D < 64


def test_fit_slope_exact_power():
    xs = [2**k for k in range(4, 10)]
    assert abs(fit_slope(xs, [x**0.5 for x in xs]) - 0.5) < 1e-12


def test_exponent_fit_primes():
    s = exponent_fit(parse_alpha("golden"), parse_set("primes"), [2**k for k in range(12, 19, 2)])
    assert 0.2 < s < 0.8


def direct_weyl(alpha, spec, r, N):
    a = alpha.approx(200).value
    tot = 0j
    for n in enumerate_set(spec, 1, N + 1).tolist():
        ph = float((r * n * a) % 1)
        tot += cmath.exp(2j * math.pi * ph)
    return tot


@pytest.mark.parametrize("lit,text,r", [("sqrt2", "squarefree", 1), ("golden", "primes", 3),
                                        ("sqrt3", "all", 2)])
def test_weyl_matches_direct(lit, text, r):
    a, spec = parse_alpha(lit), parse_set(text)
    w = weyl_sum(a, spec, r, 3000)
    ref = direct_weyl(a, spec, r, 3000)
    assert abs(w.value - ref) <= w.error + 1e-9


def test_weyl_rational_half():
    w = weyl_sum(parse_alpha("rat:1/2"), parse_set("all"), 1, 1000)
    assert abs(w.value) <= w.error + 1e-9
