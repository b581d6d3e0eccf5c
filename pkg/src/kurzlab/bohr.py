"""Bohr sets {1 <= N <= 2^l : ||N alpha|| <= t}, their rank-2 GAP embeddings and
averages of N/phi(N) over them."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .arith import totient_table
from .errors import ResourceBudgetError
from .realnum import Irrational, bad_constant, frac_dist

MAX_ELL = 30
GAP_BUDGET = 1 << 26
_CHUNK = 1 << 20
_TWO64 = 1 << 64


@dataclass
class BohrSet:
    alpha: Irrational
    ell: int
    t: Fraction
    members: np.ndarray
    # members whose classification could not be certified
    uncertain: list = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.members.size)


@dataclass(frozen=True)
class GapTriple:
    x: int
    y: int
    z: int


def _scan_chunk(alpha: Irrational, A: np.uint64, t: Fraction, T: int, lo: int, hi: int):
    n = np.arange(lo, hi, dtype=np.uint64)
    with np.errstate(over="ignore"):
        v = n * A
    d = np.minimum(v, np.uint64(0) - v)
    # |n*A - n*alpha*2^64| <= n + 1 (mod 2^64)
    margin = n + np.uint64(1)
    sure_in = d + margin <= np.uint64(T)
    sure_out = d > np.uint64(T) + margin
    members = [n[sure_in].astype(np.int64)]
    unresolved = []
    for m in n[~(sure_in | sure_out)]:
        inside, certified = alpha.dist_le(int(m), t)
        if inside:
            members.append(np.array([int(m)], dtype=np.int64))
        if not certified:
            unresolved.append(int(m))
    out = np.concatenate(members)
    out.sort()
    return out, unresolved


def enumerate_bohr(alpha: Irrational, ell: int, t, workers: int = 1) -> BohrSet:
    """Exact member list of the Bohr set by a direct scan of [1, 2^ell]."""
    t = Fraction(t)
    if ell < 0 or ell > MAX_ELL:
        raise ResourceBudgetError(f"ell={ell} outside the direct-scan budget [0, {MAX_ELL}]")
    if t <= 0:
        raise ValueError("t must be positive")
    top = 1 << ell
    if t >= Fraction(1, 2):
        return BohrSet(alpha, ell, t, np.arange(1, top + 1, dtype=np.int64))
    A = np.uint64(alpha.frac64())
    T = math.floor(t * _TWO64)
    # floor(t 2^64) is within 1 unit of the threshold; the margin absorbs it
    chunks = [(lo, min(lo + _CHUNK, top + 1)) for lo in range(1, top + 1, _CHUNK)]

    def run(c):
        return _scan_chunk(alpha, A, t, T, *c)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    members = np.concatenate([p[0] for p in parts])
    uncertain = [m for p in parts for m in p[1]]
    return BohrSet(alpha, ell, t, members, uncertain)


def _dyadic_ceiling(t: Fraction) -> tuple[int, Fraction]:
    """(i, 2^-i) with 2^-i the smallest power of two that is >= t."""
    i = 0
    while Fraction(1, 1 << (i + 1)) >= t:
        i += 1
    return i, Fraction(1, 1 << i)


def gap_embedding(alpha: Irrational, ell: int, t) -> GapTriple:
    """Rank-2 progression P(x, y, z) containing the Bohr set.

    x = q_r and y = q_r + q_{r-1}, with r the smallest index such that
    q_{r-1} >= 2^((ell + i)/2) = sqrt(2^ell / t') where t' = 2^-i is the
    dyadic ceiling of t. This balances the two terms of z at ~sqrt(2^ell t').
    """
    t = Fraction(t)
    if (1 << ell) * t <= 1:
        raise ValueError("need 2^ell * t > 1")
    if t > Fraction(1, 2):
        t = Fraction(1, 2)
    i, tp = _dyadic_ceiling(t)
    r = 1
    while alpha.convergent(r - 1).q ** 2 < (1 << (ell + i)):
        r += 1
    x = alpha.convergent(r).q
    y = x + alpha.convergent(r - 1).q
    scale = 1 << ell
    zx = scale * frac_dist(alpha, x).hi + tp * x
    zy = scale * frac_dist(alpha, y).hi + tp * y
    z = math.floor(max(zx, zy))
    if math.gcd(x, y) != 1:
        raise AssertionError("consecutive convergent denominators must be coprime")
    return GapTriple(x, y, max(z, 1))


def gap_members(g: GapTriple, bound: int, budget: int = GAP_BUDGET) -> list[int]:
    """Distinct values a*x + b*y in [-bound, bound] with |a|, |b| <= z."""
    side = 2 * g.z + 1
    if side * side > budget:
        raise ResourceBudgetError(f"(2z+1)^2 = {side * side} exceeds the budget {budget}")
    a = np.arange(-g.z, g.z + 1, dtype=np.int64)
    vals = (a[:, None] * g.x + a[None, :] * g.y).ravel()
    vals = vals[np.abs(vals) <= bound]
    return np.unique(vals).tolist()


def in_gap(g: GapTriple, values) -> np.ndarray:
    """Vectorized test of N in P(x, y, z) via a modular inverse.

    a must satisfy a = N x^-1 (mod y) and lie in [-z, z] as well as in
    [(N - z y)/x, (N + z y)/x] so that |b| <= z.
    """
    N = np.asarray(values, dtype=np.int64)
    x, y, z = g.x, g.y, g.z
    if y == 1:
        a0 = np.zeros_like(N)
    else:
        a0 = (N % y) * pow(x, -1, y) % y
    lo = np.maximum(-z, -((-(N - z * y)) // x))
    hi = np.minimum(z, (N + z * y) // x)
    # smallest a >= lo with a = a0 (mod y)
    first = lo + (a0 - lo) % y
    return first <= hi


def verify_inclusion(members, g: GapTriple) -> list[int]:
    """Members not representable in P(x, y, z); empty means inclusion holds."""
    arr = np.asarray(members, dtype=np.int64)
    ok = in_gap(g, arr)
    return arr[~ok].tolist()


@dataclass
class TotientAverage:
    total: Fraction
    normalized: Fraction
    case_label: str
    count: int
    c_alpha: Fraction


def case_label(c_alpha: Fraction, ell: int, t: Fraction, xi: Fraction = Fraction(1, 3)) -> str:
    """Which regime of the Bohr average bound applies.

    'empty' when c(alpha) > Z^2, 'loglog' when Z < (log Y)^xi, 'main' otherwise,
    with Z^2 = 2^l t and Y^2 = 2^l / t. c(alpha) is the finite-scale minimum of
    q ||q alpha|| over q <= 2^l.
    """
    Z2 = (1 << ell) * t
    if c_alpha > Z2:
        return "empty"
    Y = math.sqrt((1 << ell) / t)
    Z = math.sqrt(Z2)
    if Y <= 1 or Z < math.log(Y) ** float(xi):
        return "loglog"
    return "main"


def totient_average_over_bohr(alpha: Irrational, ell: int, t, xi=Fraction(1, 3),
                              bohr: Optional[BohrSet] = None) -> TotientAverage:
    """Exact sum of N/phi(N) over the Bohr set and its normalization by Z^2."""
    t = Fraction(t)
    if ell > MAX_ELL:
        raise ResourceBudgetError(f"ell={ell} exceeds {MAX_ELL}")
    if bohr is None:
        bohr = enumerate_bohr(alpha, ell, t)
    members = bohr.members
    total = Fraction(0)
    if members.size:
        phi = totient_table(int(members.max()))
        for n in members:
            total += Fraction(int(n), int(phi[n]))
    c = bad_constant(alpha, 1 << ell)
    Z2 = (1 << ell) * t
    return TotientAverage(total, total / Z2, case_label(c, ell, t, Fraction(xi)),
                          int(members.size), c)
