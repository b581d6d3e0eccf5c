"""Discrepancy of {n alpha} along arithmetic sets, Weyl sums and exponent fits."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ResourceBudgetError
from .realnum import Irrational
from .sets import IntegerSetSpec, enumerate_set

MAX_POINTS = 10**7
DISC_BITS = 36


@dataclass
class DiscrepancyReport:
    x: int
    n_pts: int
    D: Fraction  # interval discrepancy in count units
    normalized: float  # D / n_pts
    bits: int = DISC_BITS


@dataclass
class WeylSumRow:
    r: int
    N: int
    n_pts: int
    value: complex
    error: float  # bound on |computed - exact|


def _discrepancy_from_g(g: np.ndarray, scale: int) -> int:
    """Shared kernel; g[0] and g[-1] are the sentinels for 0 and 1.

    With g(j) = j - M x_j on sorted points, the excess over closed intervals is
    max_{i<=j} g(j) - g(i) + 1 and the deficit over open gaps is
    max_{i<j} g(i) - g(j) + 1 (sentinels included). Values are scaled by ``scale``.
    """
    inner = g[1:-1]
    run_min = np.minimum.accumulate(inner)
    excess = int(np.max(inner - run_min))
    run_max = np.maximum.accumulate(g[:-1])
    deficit = int(np.max(run_max - g[1:]))
    return max(excess, deficit) + scale


def discrepancy_fixed(u: np.ndarray, bits: int) -> Fraction:
    """Interval discrepancy (count units) of the points u / 2^bits, u in [0, 2^bits)."""
    M = int(u.size)
    if M == 0:
        raise ValueError("empty point set")
    if (M + 2).bit_length() + bits + 1 > 63:
        raise ResourceBudgetError("too many points for the fixed-point discrepancy")
    s = np.sort(u.astype(np.int64))
    j = np.arange(1, M + 1, dtype=np.int64)
    g = np.empty(M + 2, dtype=np.int64)
    g[0] = 0
    g[1:-1] = (j << bits) - M * s
    g[-1] = 1 << bits
    return Fraction(_discrepancy_from_g(g, 1 << bits), 1 << bits)


def interval_discrepancy(points: Sequence) -> Fraction:
    """Exact interval discrepancy (count units) of rational points in [0, 1)."""
    xs = sorted(Fraction(p) for p in points)
    M = len(xs)
    if M == 0:
        raise ValueError("empty point set")
    g = [Fraction(0)] + [j + 1 - M * x for j, x in enumerate(xs)] + [Fraction(1)]
    excess, lo = None, None
    for v in g[1:-1]:
        lo = v if lo is None or v < lo else lo
        excess = v - lo if excess is None or v - lo > excess else excess
    deficit, hi = None, g[0]
    for v in g[1:]:
        deficit = hi - v if deficit is None or hi - v > deficit else deficit
        hi = max(hi, v)
    return max(excess, deficit) + 1


def orbit_points(alpha: Irrational, ns: np.ndarray, bits: int = DISC_BITS) -> np.ndarray:
    """floor(frac(n alpha) 2^bits) up to one unit (plus n 2^-64 relative error)."""
    A = np.uint64(alpha.frac64())
    with np.errstate(over="ignore"):
        v = ns.astype(np.uint64) * A
    return (v >> np.uint64(64 - bits)).astype(np.int64)


def star_discrepancy(alpha: Irrational, spec: IntegerSetSpec, x: int,
                     bits: int = DISC_BITS, workers: int = 1) -> DiscrepancyReport:
    """Interval discrepancy of {n alpha : n in A, n <= x} in count units."""
    ns = enumerate_set(spec, 1, x + 1, workers=workers)
    if ns.size > MAX_POINTS:
        raise ResourceBudgetError(f"{ns.size} points exceed the budget {MAX_POINTS}")
    if ns.size == 0:
        raise ValueError("empty point set")
    D = discrepancy_fixed(orbit_points(alpha, ns, bits), bits)
    return DiscrepancyReport(x, int(ns.size), D, float(D) / ns.size, bits)


def fit_slope(xs: Sequence[float], ds: Sequence[float]) -> float:
    """Least-squares slope of log d against log x, skipping zero d."""
    pairs = [(math.log(x), math.log(d)) for x, d in zip(xs, ds) if d > 0]
    if len(pairs) < 2:
        raise ValueError("need at least two non-degenerate scales")
    lx, ld = np.array(pairs).T
    return float(np.polyfit(lx, ld, 1)[0])


def exponent_fit(alpha: Irrational, spec: IntegerSetSpec, scales: Sequence[int],
                 reports: Optional[list] = None) -> float:
    """Slope of log D(x) vs log x; the smallest scale is dropped if D < 10."""
    scales = list(scales)
    if len(scales) < 4 or any(b <= a for a, b in zip(scales, scales[1:])):
        raise ValueError("need at least 4 increasing scales")
    reps = [star_discrepancy(alpha, spec, x) for x in scales]
    if reports is not None:
        reports.extend(reps)
    if reps[0].D < 10:
        reps = reps[1:]
    return fit_slope([r.x for r in reps], [float(r.D) for r in reps])


def weyl_sum(alpha: Irrational, spec: IntegerSetSpec, r: int, N: int,
             workers: int = 1) -> WeylSumRow:
    """sum_{n in A, n <= N} e(r n alpha) with a reported error bound.

    Phases are r n A mod 2^64 with A the 64-bit fractional part of alpha, so
    each phase is off by at most r(n + 1) 2^-64 turns; float64 trig and
    pairwise summation add at most ~2^-51 per term.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    ns = enumerate_set(spec, 1, N + 1, workers=workers)
    A = np.uint64(alpha.frac64())
    with np.errstate(over="ignore"):
        ph = ns.astype(np.uint64) * A * np.uint64(r % (1 << 64))
    # centre the phase in (-1/2, 1/2] turns to keep float rounding small
    signed = ph.view(np.int64).astype(np.float64) * 2.0**-64
    ang = 2 * math.pi * signed
    value = complex(np.cos(ang).sum(), np.sin(ang).sum())
    M = int(ns.size)
    err = M * (2 * math.pi * (r * (N + 1) * 2.0**-64 + 2.0**-53) + 2.0**-51)
    return WeylSumRow(r, N, M, value, err)
