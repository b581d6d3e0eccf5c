"""Arithmetic sets of integers: membership, segmented enumeration, block statistics.

Every set is described by an immutable :class:`IntegerSetSpec`. Membership of a
single integer goes through factorization; range enumeration uses a segmented
factor sieve so that ranges up to ~1e7 are cheap.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from .arith import (big_omega, factorize, is_probable_prime, mobius_sq, omega,
                    primes_in_range, primes_upto, shifted_prime_product)
from .errors import ResourceBudgetError

KINDS = ("all", "primes", "s2", "s2p", "loeschian", "lp", "inter", "ip", "s3",
         "squarefree", "omega", "bigomega", "ap", "custom")

MAX_VALUE = 1 << 40
MAX_SPAN = 1 << 28
SEGMENT = 1 << 21
# d_k is kept as an exact fraction up to this block index
EXACT_DK_LIMIT = 20


@dataclass(frozen=True)
class IntegerSetSpec:
    kind: str
    a: int = 0
    m: int = 1
    predicate: Optional[Callable[[int], bool]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown set kind {self.kind!r}")
        if self.kind in ("omega", "bigomega", "ap") and self.m < 1:
            raise ValueError("modulus must be >= 1")
        if self.kind == "custom" and self.predicate is None:
            raise ValueError("custom sets need a predicate")

    def __str__(self) -> str:
        if self.kind in ("omega", "bigomega", "ap"):
            return f"{self.kind}:{self.a},{self.m}"
        return self.kind

    @property
    def params(self) -> dict:
        if self.kind in ("omega", "bigomega", "ap"):
            return {"a": self.a, "m": self.m}
        return {}


@dataclass(frozen=True)
class SievePrimeSet:
    """All primes, or the primes in given residue classes mod m."""

    residues: Optional[tuple[int, ...]] = None
    m: int = 1

    def __str__(self) -> str:
        if self.residues is None:
            return "all"
        return "mod:" + ",".join(map(str, self.residues)) + f",{self.m}"

    def contains(self, p: int) -> bool:
        if not is_probable_prime(p):
            return False
        return self.residues is None or p % self.m in self.residues

    def primes_upto(self, x: int) -> np.ndarray:
        ps = primes_upto(int(x))
        if self.residues is None:
            return ps
        return ps[np.isin(ps % self.m, self.residues)]


ALL_PRIMES = SievePrimeSet()


def parse_set(text: str) -> IntegerSetSpec:
    s = text.strip().lower()
    head, _, tail = s.partition(":")
    if head in ("omega", "bigomega", "ap"):
        a, m = (int(x) for x in tail.split(","))
        if m < 1:
            raise ValueError("modulus must be >= 1")
        return IntegerSetSpec(head, a % m, m)
    if tail:
        raise ValueError(f"unexpected parameters in {text!r}")
    return IntegerSetSpec(head)


def parse_prime_set(text: str) -> SievePrimeSet:
    """'all' or 'mod:r1,...,rj,m'."""
    s = text.strip().lower()
    if s in ("all", "p", "primes"):
        return ALL_PRIMES
    if s.startswith("mod:"):
        vals = [int(x) for x in s[4:].split(",")]
        if len(vals) < 2:
            raise ValueError("mod: needs at least one residue and a modulus")
        m = vals[-1]
        return SievePrimeSet(tuple(sorted({r % m for r in vals[:-1]})), m)
    raise ValueError(f"unknown prime set {text!r}")


# --------------------------------------------------------------------------
# membership


def _even_exponents(fac: dict[int, int], bad: Callable[[int], bool]) -> bool:
    return all(e % 2 == 0 for p, e in fac.items() if bad(p))


def _s2_bad(p: int) -> bool:
    return p % 4 == 3


def _l_bad(p: int) -> bool:
    return p % 3 == 2


def membership(spec: IntegerSetSpec, n: int) -> bool:
    if n < 1:
        raise ValueError("membership is defined for n >= 1")
    k = spec.kind
    if k == "all":
        return True
    if k == "primes":
        return is_probable_prime(n)
    if k == "s3":
        while n % 4 == 0:
            n //= 4
        return n % 8 != 7
    if k == "ap":
        return (n - spec.a) % spec.m == 0
    if k == "custom":
        return bool(spec.predicate(n))
    if k == "squarefree":
        return bool(mobius_sq(n))
    if k == "omega":
        return omega(n) % spec.m == spec.a % spec.m
    if k == "bigomega":
        return big_omega(n) % spec.m == spec.a % spec.m
    fac = factorize(n)
    if k == "s2":
        return _even_exponents(fac, _s2_bad)
    if k == "loeschian":
        return _even_exponents(fac, _l_bad)
    if k == "inter":
        return _even_exponents(fac, lambda p: _s2_bad(p) or _l_bad(p))
    mod = {"s2p": 4, "lp": 3, "ip": 12}[k]
    return all(p % mod == 1 for p in fac)


# --------------------------------------------------------------------------
# enumeration


def _segment_mask(spec: IntegerSetSpec, lo: int, hi: int) -> np.ndarray:
    """Boolean membership mask for n in [lo, hi), lo >= 1."""
    size = hi - lo
    n = np.arange(lo, hi, dtype=np.int64)
    k = spec.kind
    if k == "all":
        return np.ones(size, dtype=bool)
    if k == "primes":
        mask = np.zeros(size, dtype=bool)
        mask[primes_in_range(lo, hi) - lo] = True
        return mask
    if k == "ap":
        return (n - spec.a) % spec.m == 0
    if k == "s3":
        v = n.copy()
        while True:
            sel = v % 4 == 0
            if not sel.any():
                break
            v[sel] //= 4
        return v % 8 != 7
    if k == "custom":
        return np.fromiter((bool(spec.predicate(int(x))) for x in n), dtype=bool, count=size)

    base = primes_upto(math.isqrt(hi - 1) + 1)
    if k == "squarefree":
        mask = np.ones(size, dtype=bool)
        for p in base:
            p2 = int(p) * int(p)
            if p2 >= hi:
                break
            mask[(-lo) % p2:: p2] = False
        return mask

    rem = n.copy()
    bad = np.zeros(size, dtype=bool)
    count = np.zeros(size, dtype=np.int64) if k in ("omega", "bigomega") else None
    odd = np.zeros(size, dtype=bool) if k in ("s2", "loeschian", "inter") else None
    if k == "s2":
        flag = lambda p: p % 4 == 3
    elif k == "loeschian":
        flag = lambda p: p % 3 == 2
    elif k == "inter":
        flag = lambda p: p % 4 == 3 or p % 3 == 2
    elif k in ("s2p", "lp", "ip"):
        mod = {"s2p": 4, "lp": 3, "ip": 12}[k]
        flag = lambda p: p % mod != 1
    else:
        flag = lambda p: False

    for p in base:
        p = int(p)
        first = (-lo) % p
        if first >= size:
            continue
        flagged = flag(p)
        if k in ("s2p", "lp", "ip") and flagged:
            bad[first::p] = True
        if k == "omega":
            count[first::p] += 1
        pk = p
        while pk < hi:
            s = (-lo) % pk
            if s >= size:
                break
            rem[s::pk] //= p
            if k == "bigomega":
                count[s::pk] += 1
            if odd is not None and flagged:
                odd[s::pk] ^= True
            pk *= p
        if odd is not None and flagged:
            bad[first::p] |= odd[first::p]
            odd[first::p] = False

    big = rem > 1  # a single prime factor above sqrt(hi)
    if k in ("s2", "loeschian", "inter"):
        r = rem[big]
        if k == "s2":
            fb = r % 4 == 3
        elif k == "loeschian":
            fb = r % 3 == 2
        else:
            fb = (r % 4 == 3) | (r % 3 == 2)
        bad[np.flatnonzero(big)[fb]] = True
        return ~bad
    if k in ("s2p", "lp", "ip"):
        bad[np.flatnonzero(big)[rem[big] % mod != 1]] = True
        return ~bad
    count += big
    return count % spec.m == spec.a % spec.m


def _check_range(X: int, Y: int, max_span: int) -> None:
    if X < 1 or Y < X:
        raise ValueError("need 1 <= X <= Y")
    if Y > MAX_VALUE:
        raise ResourceBudgetError(f"Y={Y} exceeds the value ceiling 2^40")
    if Y - X > max_span:
        raise ResourceBudgetError(
            f"range of length {Y - X} exceeds the span budget {max_span}; "
            "split it into smaller segments")


def _segments(X: int, Y: int, seg: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + seg, Y)) for lo in range(X, Y, seg)]


def enumerate_set(spec: IntegerSetSpec, X: int, Y: int, workers: int = 1,
                  max_span: int = MAX_SPAN) -> np.ndarray:
    """Members of ``spec`` in [X, Y), increasing, as an int64 array."""
    _check_range(X, Y, max_span)
    if X == Y:
        return np.array([], dtype=np.int64)

    def run(seg):
        lo, hi = seg
        return np.flatnonzero(_segment_mask(spec, lo, hi)).astype(np.int64) + lo

    segs = _segments(X, Y, SEGMENT)
    if workers > 1 and len(segs) > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, segs))
    else:
        parts = [run(s) for s in segs]
    return np.concatenate(parts)


def count_set(spec: IntegerSetSpec, X: int, Y: int, workers: int = 1,
              max_span: int = MAX_SPAN) -> int:
    """#(spec ∩ [X, Y)) without materializing the members."""
    _check_range(X, Y, max_span)

    def run(seg):
        return int(np.count_nonzero(_segment_mask(spec, *seg)))

    segs = _segments(X, Y, SEGMENT)
    if workers > 1 and len(segs) > 1:
        with ThreadPoolExecutor(workers) as ex:
            return sum(ex.map(run, segs))
    return sum(run(s) for s in segs)


def sieve_form(kind: str, N: int) -> np.ndarray:
    """Sieve characterization of the primitive sets s2p, lp, ip on [1, N].

    n is kept iff n = 1 (mod m) and no prime p <= sqrt(N) from the excluded
    classes divides n. Returns a boolean mask indexed by n - 1.
    """
    m, excluded = {"s2p": (4, (3,)), "lp": (3, (2,)), "ip": (12, (5, 7, 11))}[kind]
    n = np.arange(1, N + 1, dtype=np.int64)
    mask = n % m == 1
    for p in primes_upto(math.isqrt(N)):
        p = int(p)
        if p % m in excluded or (kind == "lp" and p == 2):
            mask[p - 1:: p] = False
    return mask


# --------------------------------------------------------------------------
# block statistics


@dataclass
class DyadicStats:
    kind: str
    params: dict
    k: int
    mu_k: int
    d_k: Fraction | float
    density_ratio: Fraction | float
    d_k_exact: bool = True


def d_k(P: SievePrimeSet, k: int) -> Fraction | float:
    """prod_{p in P, p <= 2^k} (1 + 1/p); exact for k <= EXACT_DK_LIMIT."""
    ps = P.primes_upto(1 << k)
    if k <= EXACT_DK_LIMIT:
        return shifted_prime_product(ps, 1)
    return float(np.exp(np.sum(np.log1p(1.0 / ps.astype(np.float64)))))


def _euler_factor(P: SievePrimeSet, k: int) -> Fraction | float:
    ps = P.primes_upto(1 << k)
    if k <= EXACT_DK_LIMIT:
        return shifted_prime_product(ps, -1)
    return float(np.exp(np.sum(np.log1p(-1.0 / ps.astype(np.float64)))))


def dyadic_stats(spec: IntegerSetSpec, P: SievePrimeSet, k: int, workers: int = 1) -> DyadicStats:
    if k < 0 or k > 34:
        raise ValueError("k must be in [0, 34]")
    mu = count_set(spec, 1 << k, 1 << (k + 1), workers=workers)
    dk = d_k(P, k)
    ef = _euler_factor(P, k)
    exact = k <= EXACT_DK_LIMIT
    if exact:
        ratio = Fraction(mu) / ((1 << k) * ef)
    else:
        ratio = mu / ((1 << k) * ef)
    return DyadicStats(spec.kind, spec.params, k, mu, dk, ratio, exact)


@dataclass
class HypothesisIReport:
    kind: str
    rho: Fraction
    rows: list = field(default_factory=list)  # (k, members scanned, violation count)
    violations: list = field(default_factory=list)  # first few (k, n, p)

    @property
    def holds(self) -> bool:
        return all(r[2] == 0 for r in self.rows)


def check_hypothesis_I(spec: IntegerSetSpec, P: SievePrimeSet, rho: Fraction,
                       k_range: Iterable[int], keep: int = 20) -> HypothesisIReport:
    """Look for members of a dyadic block divisible by a small prime of P."""
    rho = Fraction(rho)
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    rep = HypothesisIReport(spec.kind, rho)
    for k in k_range:
        members = enumerate_set(spec, 1 << k, 1 << (k + 1))
        # p <= 2^(rho k)  <=>  p^den <= 2^(num k)
        target = 1 << (rho.numerator * k)
        bound = int(2.0 ** (rho.numerator * k / rho.denominator))
        while bound ** rho.denominator > target:
            bound -= 1
        while (bound + 1) ** rho.denominator <= target:
            bound += 1
        hit = np.zeros(members.size, dtype=bool)
        for p in P.primes_upto(bound):
            div = members % int(p) == 0
            if div.any():
                for n in members[div & ~hit][: max(0, keep - len(rep.violations))]:
                    rep.violations.append((k, int(n), int(p)))
                hit |= div
        rep.rows.append((k, int(members.size), int(hit.sum())))
    return rep


def landau_diagnostic(X: int, workers: int = 1) -> tuple[int, float]:
    """#{n <= X in S2} and the normalized ratio count*sqrt(ln X)/X."""
    if X < 100:
        raise ValueError("X must be >= 100")
    c = count_set(IntegerSetSpec("s2"), 1, X + 1, workers=workers)
    return c, c * math.sqrt(math.log(X)) / X
