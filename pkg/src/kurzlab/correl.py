"""Shifted pair counts in dyadic blocks, overlap second moments and QIA blocks."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from .arcs import coverage, cross_integral, integral_of_square
from .arith import _reduced_fraction, mul_reduced, totient
from .errors import ResourceBudgetError
from .psi import DyadicPsi
from .realnum import Irrational
from .sets import IntegerSetSpec, SievePrimeSet, count_set, d_k, enumerate_set

MAX_BLOCK = 24
# fixed-point bits for arc centres in the overlap sweep
CENTER_BITS = 44


@dataclass
class ShiftedCountRow:
    k: int
    h: int
    count: int
    bound_value: Fraction | float
    ratio: Fraction | float


@lru_cache(maxsize=64)
def _dk_squared(P: SievePrimeSet, k: int):
    dk = d_k(P, k)
    if isinstance(dk, Fraction):
        return _reduced_fraction(dk.numerator ** 2, dk.denominator ** 2)
    return dk * dk


def shifted_count(spec: IntegerSetSpec, P: SievePrimeSet, k: int, h: int,
                  members: np.ndarray | None = None) -> ShiftedCountRow:
    """#{n in D_k : n + h in A} against (h/phi(h)) 2^k / d_k^2."""
    if k < 0 or k > 30:
        raise ResourceBudgetError("k must lie in [0, 30]")
    if h < 1:
        raise ValueError("h must be >= 1")
    lo, hi = 1 << k, 1 << (k + 1)
    if members is None or (members.size and members[-1] < hi + h - 1):
        members = enumerate_set(spec, lo, hi + h)
    block = members[(members >= lo) & (members < hi)]
    count = int(np.count_nonzero(np.isin(block + h, members)))
    dk2 = _dk_squared(P, k)
    phi = totient(h)
    if isinstance(dk2, Fraction):
        inv = _reduced_fraction(dk2.denominator, dk2.numerator)
        bound = mul_reduced(Fraction(h * lo, phi), inv)
        ratio = mul_reduced(Fraction(count * phi, h * lo), dk2)
    else:
        bound = h / phi * lo / dk2
        ratio = count / bound
    return ShiftedCountRow(k, h, count, bound, ratio)


def sieve_bound_sweep(spec: IntegerSetSpec, P: SievePrimeSet, k: int, h_max: int,
                      workers: int = 1):
    """Rows for h = 1..h_max and the largest count/bound ratio."""
    members = enumerate_set(spec, 1 << k, (1 << (k + 1)) + h_max)

    def run(h):
        return shifted_count(spec, P, k, h, members)

    hs = range(1, h_max + 1)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(run, hs))
    else:
        rows = [run(h) for h in hs]
    return rows, max(r.ratio for r in rows)


@dataclass
class OverlapSummary:
    X: int
    Y: int
    numerator: Fraction
    denominator: Fraction
    ratio: Fraction
    n_arcs: int
    # bound on |numerator - exact| from fixed-point arc centres
    error: Fraction = Fraction(0)
    block_matrix: dict = field(default_factory=dict)


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _arc_family(alpha: Irrational, psi: DyadicPsi, spec: IntegerSetSpec, X: int, Y: int,
                bits: int):
    """Integer centres, half-widths, block labels and the unit U = 2^bits * L."""
    members = enumerate_set(spec, 1 << X, 1 << (Y + 1))
    ks = list(range(X, Y + 1))
    vals = [psi.block(k) for k in ks]
    L = 1
    for v in vals:
        den = v.denominator
        while den % 2 == 0:
            den //= 2
        L = _lcm(L, den)
    U = (1 << bits) * L
    half = []
    for v in vals:
        w = v * U
        if w.denominator != 1:
            raise ResourceBudgetError(f"psi value {v} has a power-of-two denominator above 2^{bits}")
        half.append(int(w))
    if U >= 1 << 62:
        raise ResourceBudgetError("psi denominators too large for the fixed-point sweep")
    A = np.uint64(alpha.frac64())
    with np.errstate(over="ignore"):
        v = members.astype(np.uint64) * A
    centres = (v >> np.uint64(64 - bits)).astype(np.int64) * L
    labels = _bitlen(members) - X
    hw = np.array(half, dtype=np.int64)[labels]
    return members, centres, hw, labels, U, vals


def _bitlen(a: np.ndarray) -> np.ndarray:
    out = np.zeros(a.size, dtype=np.int64)
    x = a.copy()
    for s in (32, 16, 8, 4, 2, 1):
        big = x >= (1 << s)
        out[big] += s
        x[big] >>= s
    return out


def overlap_second_moment(alpha: Irrational, psi: DyadicPsi, spec: IntegerSetSpec,
                          X: int, Y: int, bits: int = CENTER_BITS,
                          with_blocks: bool = False) -> OverlapSummary:
    """Sum over i, j of |A_i ∩ A_j| for n in A ∩ [2^X, 2^(Y+1)) and its ratio to (sum |A_i|)^2.

    The double sum equals the integral of the squared covering multiplicity,
    computed by one sort of the arc endpoints.
    """
    if Y > MAX_BLOCK or X > Y or X < 0:
        raise ResourceBudgetError(f"need 0 <= X <= Y <= {MAX_BLOCK}")
    members, centres, hw, labels, U, vals = _arc_family(alpha, psi, spec, X, Y, bits)
    if members.size == 0:
        raise ValueError("no members in the chosen blocks")
    full = 2 * hw >= U
    starts = np.where(full, 0, (centres - hw) % U)
    lengths = np.where(full, U, 2 * hw)
    nb = Y - X + 1
    seg, counts = coverage(starts, lengths, U, labels, nb)
    num = Fraction(integral_of_square(seg, counts), U)
    # sum of 2 psi over all arcs, capped at the full circle
    per_block = np.bincount(labels, minlength=nb)
    total = sum((min(2 * vals[i], Fraction(1)) * int(per_block[i]) for i in range(nb)),
                Fraction(0))
    den = total * total
    M = int(members.size)
    delta = Fraction(int(members[-1]) + 1, 1 << 64) + Fraction(1, 1 << bits)
    err = 2 * delta * M * M
    blocks = {}
    if with_blocks:
        for a in range(nb):
            for b in range(nb):
                blocks[(X + a, X + b)] = Fraction(cross_integral(seg, counts, a, b), U)
    return OverlapSummary(X, Y, num, den, num / den, M, err, blocks)


def choose_blocks(psi: DyadicPsi, spec: IntegerSetSpec, start: int = 1,
                  max_Y: int = MAX_BLOCK) -> tuple[int, int, Fraction]:
    """Greedy block range [X, Y] with sum_{X<=k<=Y} mu_k psi_k in [1, 2].

    Starting from X = start, Y grows until the sum reaches 1; if it jumps past
    2, X moves up by one and the scan restarts.
    """
    mu = {}
    for X in range(start, max_Y + 1):
        s = Fraction(0)
        for Y in range(X, max_Y + 1):
            if Y not in mu:
                mu[Y] = count_set(spec, 1 << Y, 1 << (Y + 1))
            s += mu[Y] * psi.block(Y)
            if s >= 1:
                break
        if 1 <= s <= 2:
            return X, Y, s
        if s < 1:
            break
    raise ValueError(f"no block range with mass in [1, 2] below 2^{max_Y + 1}")
