"""Twisted hit counts, Monte-Carlo measure estimates and explicit constructions.

Two constructions live here:

* ``build_counterexample_psi`` takes a well-approximable alpha and produces a
  step function psi with divergent sum along the set whose target arcs still
  have summable union measures;
* ``construct_alpha_crt`` builds partial quotients level by level so that
  selected convergent denominators are divisible by every small prime.
"""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .arcs import ArcSet, arc_union_measure
from .arith import is_probable_prime, primes_upto
from .errors import ResourceBudgetError, VerificationError
from .psi import DyadicPsi, f_P, normalize_psi, parse_psi
from .realnum import (BoundedReal, CFExpansion, InsufficientQuotients, Irrational,
                      parse_alpha)
from .serial import decode_fraction, decode_int, encode
from .sets import IntegerSetSpec, count_set, enumerate_set, parse_set

__all__ = [
    "ArcSet", "arc_union_measure", "DyadicPsi", "parse_psi", "normalize_psi", "f_P",
    "gamma_sample", "hit_count", "estimate_measure", "three_gap", "range_union_measure",
    "enumerated_union_measure", "f_value",
    "NoQualifyingConvergent", "CounterexampleArtifact", "build_counterexample_psi",
    "construct_alpha_crt", "verify_crt", "smooth_phi_ratio",
]

_TWO64 = 1 << 64
MAX_HIT_N = 1 << 28


# --------------------------------------------------------------------------
# hit counting


def gamma_sample(seed: int, index: int) -> int:
    """64-bit shift numerator from a counter-based hash of (seed, index)."""
    h = hashlib.blake2b(f"{seed}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(h, "little")


@dataclass
class HitResult:
    count: int
    first_hits: list
    uncertain: int = 0


def _thresholds(psi: DyadicPsi, ns: np.ndarray) -> np.ndarray:
    ks = np.zeros(ns.size, dtype=np.int64)
    x = ns.copy()
    for s in (32, 16, 8, 4, 2, 1):
        big = x >= (1 << s)
        ks[big] += s
        x[big] >>= s
    table = {}
    for k in np.unique(ks):
        v = psi.block(int(k))
        table[int(k)] = min(math.floor(v * _TWO64), _TWO64 // 2)
    T = np.empty(ns.size, dtype=np.uint64)
    for k, t in table.items():
        T[ks == k] = np.uint64(t)
    return T


class _HitKernel:
    """Vectorized ||n alpha + gamma|| <= psi(n) over a fixed member array."""

    def __init__(self, alpha: Irrational, psi: DyadicPsi, ns: np.ndarray):
        self.alpha, self.psi, self.ns = alpha, psi, ns
        A = np.uint64(alpha.frac64())
        with np.errstate(over="ignore"):
            self.base = ns.astype(np.uint64) * A
        self.T = _thresholds(psi, ns)
        self.margin = ns.astype(np.uint64) + np.uint64(2)
        self.full = self.T >= np.uint64(_TWO64 // 2)

    def hits(self, G: int, limit: Optional[int] = None) -> tuple[np.ndarray, int]:
        with np.errstate(over="ignore"):
            v = self.base + np.uint64(G)
        d = np.minimum(v, np.uint64(0) - v)
        sure = (d + self.margin <= self.T) | self.full
        maybe = ~sure & (d <= self.T + self.margin)
        idx = np.flatnonzero(sure)
        extra = []
        n_unc = 0
        gamma = Fraction(G, _TWO64)
        for i in np.flatnonzero(maybe):
            n = int(self.ns[i])
            inside, cert = self.alpha.shifted_dist_le(n, gamma, self.psi(n))
            n_unc += not cert
            if inside:
                extra.append(i)
        if extra:
            idx = np.sort(np.concatenate([idx, np.array(extra, dtype=np.int64)]))
        return idx, n_unc


def hit_count(alpha: Irrational, gamma: Fraction, psi: DyadicPsi, spec: IntegerSetSpec,
              N: int, N0: int = 1, keep: int = 32) -> HitResult:
    """#{n in A ∩ [N0, N] : ||n alpha + gamma|| <= psi(n)} and the first hits.

    gamma must be a dyadic rational with denominator dividing 2^64.
    """
    gamma = Fraction(gamma) % 1
    G = gamma * _TWO64
    if G.denominator != 1:
        raise ValueError("gamma must be a multiple of 2^-64")
    if N > MAX_HIT_N:
        raise ResourceBudgetError(f"N={N} exceeds the scan budget {MAX_HIT_N}")
    ns = enumerate_set(spec, N0, N + 1)
    idx, unc = _HitKernel(alpha, psi, ns).hits(int(G))
    return HitResult(int(idx.size), ns[idx[:keep]].tolist(), unc)


@dataclass
class MeasureEstimate:
    fraction: Fraction
    ci_halfwidth: float
    fraction_min3: Fraction
    samples: int
    mean_hits: float
    uncertain: int


def estimate_measure(alpha: Irrational, psi: DyadicPsi, spec: IntegerSetSpec, N0: int,
                     N: int, samples: int, min_hits: int = 1, seed: int = 0,
                     workers: int = 1) -> MeasureEstimate:
    """Share of sampled shifts gamma hit at least ``min_hits`` times by n in A ∩ [N0, N].

    Shifts come from ``gamma_sample(seed, i)``; the per-sample hit counts do
    not depend on the worker count, so neither does the result.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not 1 <= N0 < N:
        raise ValueError("need 1 <= N0 < N")
    if N > MAX_HIT_N:
        raise ResourceBudgetError(f"N={N} exceeds the scan budget {MAX_HIT_N}")
    ns = enumerate_set(spec, N0, N + 1)
    kern = _HitKernel(alpha, psi, ns)

    def run(i):
        idx, unc = kern.hits(gamma_sample(seed, i))
        return int(idx.size), unc

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            res = list(ex.map(run, range(samples), chunksize=max(1, samples // (4 * workers))))
    else:
        res = [run(i) for i in range(samples)]
    counts = np.array([r[0] for r in res])
    good = int(np.count_nonzero(counts >= min_hits))
    good3 = int(np.count_nonzero(counts >= 3))
    p = good / samples
    ci = 1.96 * math.sqrt(p * (1 - p) / samples)
    return MeasureEstimate(Fraction(good, samples), ci, Fraction(good3, samples), samples,
                           float(counts.mean()), sum(r[1] for r in res))


# --------------------------------------------------------------------------
# three-gap union measures


def _eta(alpha: Irrational, j: int, a: BoundedReal) -> BoundedReal:
    """|q_j alpha - p_j| as a bounded real, with q_{-1} = 0, p_{-1} = 1."""
    if j < 0:
        return BoundedReal(Fraction(1))
    c = alpha.convergent(j)
    v = c.q * a - c.p
    return BoundedReal(abs(v.value), v.error)


def three_gap(alpha: Irrational, L: int, bits: Optional[int] = None) -> list:
    """Gap lengths and multiplicities of the L points {n alpha}, n = 1..L.

    With q_k + q_{k-1} <= L < q_{k+1} + q_k and L = r q_k + q_{k-1} + s the gaps
    are eta_k (L - q_k times), eta_{k-1} - r eta_k (s times) and
    eta_{k-1} - (r - 1) eta_k (q_k - s times).
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if bits is None:
        bits = 3 * L.bit_length() + 64
    a = alpha.approx(bits)
    k = 0
    while True:
        qk = alpha.convergent(k).q
        qkm1 = alpha.convergent(k - 1).q if k >= 1 else 0
        qk1 = alpha.convergent(k + 1).q
        if qk + qkm1 <= L < qk1 + qk:
            break
        k += 1
    r, s = divmod(L - qkm1, qk)
    ek, ekm1 = _eta(alpha, k, a), _eta(alpha, k - 1, a)
    out = [(ek, L - qk), (ekm1 - r * ek, s), (ekm1 - (r - 1) * ek, qk - s)]
    return [(g, m) for g, m in out if m > 0]


def range_union_measure(alpha: Irrational, L: int, width: Fraction,
                        bits: Optional[int] = None) -> BoundedReal:
    """Measure of the union of L arcs of length ``width`` centred at n alpha, n = 1..L.

    Translation invariance makes this the measure for any L consecutive n.
    """
    width = Fraction(width)
    if width >= 1:
        return BoundedReal(Fraction(1))
    total, err = Fraction(0), Fraction(0)
    for g, m in three_gap(alpha, L, bits):
        total += m * min(g.value, width)
        err += m * g.error
    return BoundedReal(total, err)


def enumerated_union_measure(alpha: Irrational, ns, half: Fraction,
                             bits: int = 64) -> BoundedReal:
    """Union measure of arcs [n alpha - half, n alpha + half] over the given n.

    Centres are fixed-point integers in units of 2^-B / den(half), B = bits + log2(max n).
    """
    ns = [int(n) for n in ns]
    half = Fraction(half)
    if not ns:
        return BoundedReal(Fraction(0))
    top = max(ns)
    B = bits + top.bit_length()
    if 2 * half >= 1:
        return BoundedReal(Fraction(1))
    D = half.denominator
    mod = 1 << B
    U = mod * D
    A = alpha.fixed(B) % mod
    h = half.numerator << B
    starts = sorted(((n * A) % mod * D - h) % U for n in ns)
    # merge on the circle, cutting at the first start
    total = 0
    cur_lo, cur_hi = starts[0], starts[0] + 2 * h
    for st in starts[1:]:
        if st <= cur_hi:
            cur_hi = max(cur_hi, st + 2 * h)
        else:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = st, st + 2 * h
    # the last run may wrap onto the first
    total += min(cur_hi, starts[0] + U) - cur_lo
    err = Fraction(2 * len(ns) * (top + 1), mod)
    return BoundedReal(Fraction(min(total, U), U), err)


# --------------------------------------------------------------------------
# counterexample psi for well-approximable alpha


F_KINDS: dict[str, Callable[[float], float]] = {
    "one": lambda lx: 1.0,
    "log": lambda lx: lx,
    "sqrt_log": lambda lx: math.sqrt(lx),
    "log34": lambda lx: lx ** 0.75,
}


def f_value(kind: str, x: int) -> Fraction:
    """f(x) as an exact binary fraction of its float64 value (x >= 2)."""
    if kind not in F_KINDS:
        raise ValueError(f"unknown f kind {kind!r}; choose from {sorted(F_KINDS)}")
    if x < 2:
        return Fraction(1)
    return Fraction(F_KINDS[kind](math.log(x)))


def _enc(v):
    # every int as a string so the level records have a uniform shape
    if isinstance(v, int) and not isinstance(v, bool):
        return encode(v) if isinstance(encode(v), str) else str(v)
    return encode(v)


class NoQualifyingConvergent(Exception):
    """No convergent denominator meets the level's approximation target.

    This is the expected outcome for badly approximable alpha.
    """

    def __init__(self, level: int, searched: int):
        super().__init__(f"no qualifying convergent at level {level} "
                         f"(searched convergent indices up to {searched})")
        self.level = level
        self.searched = searched


@dataclass
class CounterexampleLevel:
    k: int
    n_k: int
    q: int
    lo: int  # S_k = [lo, hi]
    hi: int
    psi: Fraction
    count: int  # #(S_k ∩ A)
    increment: Fraction  # psi_k * count
    union_measure: Fraction
    union_error: Fraction


@dataclass
class CounterexampleArtifact:
    alpha_desc: str
    spec: str
    f_kind: str
    K: int
    levels: list = field(default_factory=list)
    certificate: str = "partial"

    @property
    def per_k_union_measure(self) -> list:
        return [lv.union_measure for lv in self.levels]

    @property
    def partial_sums(self) -> list:
        out, s = [], Fraction(0)
        for lv in self.levels:
            s += lv.increment
            out.append(s)
        return out

    @property
    def decay_ratios(self) -> list:
        m = self.per_k_union_measure
        return [b / a for a, b in zip(m, m[1:])]

    def psi_function(self) -> Callable[[int], Fraction]:
        def psi(n: int) -> Fraction:
            for lv in self.levels:
                if lv.lo <= n <= lv.hi:
                    return lv.psi
            return Fraction(0)
        return psi

    def to_json(self) -> str:
        d = {"alpha": self.alpha_desc, "spec": self.spec, "f_kind": self.f_kind, "K": self.K,
             "certificate": self.certificate,
             "levels": [{k: _enc(v) for k, v in asdict(lv).items()} for lv in self.levels],
             "decay_ratios": [float(r) for r in self.decay_ratios]}
        return json.dumps(d, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CounterexampleArtifact":
        d = json.loads(text)
        levels = []
        for lv in d["levels"]:
            levels.append(CounterexampleLevel(
                int(lv["k"]), int(lv["n_k"]), decode_int(lv["q"]), decode_int(lv["lo"]),
                decode_int(lv["hi"]), decode_fraction(lv["psi"]), decode_int(lv["count"]),
                decode_fraction(lv["increment"]), decode_fraction(lv["union_measure"]),
                decode_fraction(lv["union_error"])))
        return cls(d["alpha"], d["spec"], d["f_kind"], int(d["K"]), levels, d["certificate"])

    def verify(self, recompute_measures: bool = True) -> list[str]:
        """Re-check the artifact from scratch; returns a list of problems."""
        alpha = parse_alpha(self.alpha_desc)
        spec = parse_set(self.spec)
        problems = []
        prev_hi, prev_psi = 0, None
        for lv in self.levels:
            c = alpha.convergent(lv.n_k)
            if c.q != lv.q:
                problems.append(f"level {lv.k}: q mismatch")
            if not _qualifies(alpha, lv.n_k, lv.k, self.f_kind):
                problems.append(f"level {lv.k}: approximation condition fails")
            if lv.q <= (1 << lv.k) or lv.q <= prev_hi ** 2:
                problems.append(f"level {lv.k}: sparsity rule violated")
            if lv.lo != prev_hi + 1:
                problems.append(f"level {lv.k}: segments do not partition")
            if lv.hi != math.floor((1 << lv.k) * lv.q * f_value(self.f_kind, lv.q)):
                problems.append(f"level {lv.k}: segment end mismatch")
            if lv.psi != Fraction(1, (1 << lv.k) * lv.q):
                problems.append(f"level {lv.k}: psi value mismatch")
            if prev_psi is not None and lv.psi > prev_psi:
                problems.append(f"level {lv.k}: psi increases")
            if lv.increment != lv.psi * lv.count:
                problems.append(f"level {lv.k}: increment mismatch")
            if recompute_measures:
                m = _level_union(alpha, spec, lv.lo, lv.hi, lv.psi)
                if m.value != lv.union_measure:
                    problems.append(f"level {lv.k}: union measure mismatch")
            prev_hi, prev_psi = lv.hi, lv.psi
        return problems


def _qualifies(alpha: Irrational, n: int, k: int, f_kind: str) -> bool:
    """Certified test of ||q_n alpha|| <= 4^-k / (q_n f(q_n))."""
    q = alpha.convergent(n).q
    q1 = alpha.convergent(n + 1).q
    thr = Fraction(1, 4 ** k * q) / f_value(f_kind, q)
    # 1/(q_{n+1} + q_n) < ||q_n alpha|| < 1/q_{n+1}
    if Fraction(1, q1 + q) >= thr:
        return False
    if Fraction(1, q1) <= thr:
        return True
    inside, cert = alpha.dist_le(q, thr)
    if not cert:
        return False
    return inside


def _level_union(alpha: Irrational, spec: IntegerSetSpec, lo: int, hi: int,
                 psi: Fraction) -> BoundedReal:
    if spec.kind == "all":
        return range_union_measure(alpha, hi - lo + 1, 2 * psi)
    if hi - lo > 1 << 22:
        raise ResourceBudgetError("segment too long to enumerate for this set")
    return enumerated_union_measure(alpha, enumerate_set(spec, lo, hi + 1), psi)


def _segment_count(spec: IntegerSetSpec, lo: int, hi: int) -> int:
    if spec.kind == "all":
        return hi - lo + 1
    return count_set(spec, lo, hi + 1)


def build_counterexample_psi(alpha: Irrational, spec: IntegerSetSpec, f_kind: str, K: int,
                             sparsity_rule: str = "default",
                             max_index: int = 400) -> CounterexampleArtifact:
    """Levels k = 1..K of the step function psi_k = 2^-k / q_{n_k} on segments S_k.

    ``default`` sparsity: the smallest convergent index with q > 2^k,
    q > (max S_{k-1})^2 and ||q alpha|| <= 4^-k / (q f(q)); an index whose
    segment fails #(S_k ∩ A) > max S_k / (2 f(max S_k)) is skipped.
    Raises ``NoQualifyingConvergent`` when the search is exhausted.
    """
    if sparsity_rule != "default":
        raise ValueError(f"unknown sparsity rule {sparsity_rule!r}")
    art = CounterexampleArtifact(str(alpha), str(spec), f_kind, K)
    prev_hi, n = 0, 0
    for k in range(1, K + 1):
        while True:
            if n > max_index:
                raise NoQualifyingConvergent(k, max_index)
            try:
                q = alpha.convergent(n).q
                ok = q > (1 << k) and q > prev_hi ** 2 and _qualifies(alpha, n, k, f_kind)
            except InsufficientQuotients as exc:
                raise NoQualifyingConvergent(k, n) from exc
            if ok:
                hi = math.floor((1 << k) * q * f_value(f_kind, q))
                lo = prev_hi + 1
                count = _segment_count(spec, lo, hi)
                if count * 2 * f_value(f_kind, hi) > hi:
                    break
            n += 1
        psi = Fraction(1, (1 << k) * q)
        um = _level_union(alpha, spec, lo, hi, psi)
        art.levels.append(CounterexampleLevel(k, n, q, lo, hi, psi, count, psi * count,
                                              um.value, um.error))
        prev_hi = hi
        n += 1
    return art


# --------------------------------------------------------------------------
# CRT construction along the primes


_SMALL_PRIMORIAL_BOUND = 1 << 16


def _small_primorial() -> int:
    p = 1
    for x in primes_upto(_SMALL_PRIMORIAL_BOUND):
        p *= int(x)
    return p


_PRIMORIAL = None


def smooth_phi_ratio(q: int) -> tuple[Fraction, bool]:
    """phi(q)/q from the prime factors below 2^16, plus an exactness flag.

    If the remaining cofactor is 1 or a probable prime the value is exact;
    otherwise it is an upper bound.
    """
    global _PRIMORIAL
    if _PRIMORIAL is None:
        _PRIMORIAL = _small_primorial()
    g = math.gcd(q, _PRIMORIAL)
    ratio = Fraction(1)
    cof = q
    for p in primes_upto(_SMALL_PRIMORIAL_BOUND):
        p = int(p)
        if p > g:
            break
        if g % p == 0:
            ratio *= Fraction(p - 1, p)
            while cof % p == 0:
                cof //= p
    if cof == 1:
        return ratio, True
    if is_probable_prime(cof):
        return ratio * Fraction(cof - 1, cof), True
    return ratio, False


def _small_primes_set(q: int) -> list[int]:
    """{p prime : p <= (log log q)/2}."""
    if q < 3:
        return []
    ll = math.log(math.log(q))
    if ll <= 0:
        return []
    return [int(p) for p in primes_upto(int(ll / 2))]


def _crt(residues: list[tuple[int, int]]) -> tuple[int, int]:
    r, m = 0, 1
    for a, p in residues:
        # r + m t = a (mod p)
        t = (a - r) * pow(m, -1, p) % p
        r, m = r + m * t, m * p
    return r % m, m


@dataclass
class CRTLevel:
    k: int
    j: int
    n_k: int
    primes: list
    a0: int
    b0: int
    c0: int
    size_floor: int
    q_j: int
    q_nk: int
    phi_ratio: Fraction
    phi_exact: bool
    descent_search: int  # candidates tried for b0
    descent_ok: bool
    quality: Optional[float] = None


def _ones_to(prefix: list, qs: list, target: int) -> None:
    while qs[-1] <= target:
        prefix.append(1)
        qs.append(qs[-1] + qs[-2])


def construct_alpha_crt(K: int, sparsity_rule: str = "default", seed: int = 0,
                        eps: Fraction = Fraction(1, 2),
                        window: int = 1 << 14) -> tuple[CFExpansion, list]:
    """Partial quotients built from two congruence systems per level.

    At level k, 1's are appended until q_j > max(2^k, q_prev^2). Then

    * a0 >= floor is the smallest solution of a q_j + q_{j-1} != 0 (mod p),
    * b0 >= floor solves b q_{j+1} + q_j = 0 (mod p); within that residue class
      the smallest b whose q_{j+2} has a smaller phi(q)/q than the previous
      level is used (searching ``window`` candidates),
    * c0 in [floor, 2 floor) is drawn from a hash of (seed, k),

    for all p <= (log log q_j)/2, with floor = max(2, floor(log2 q_j)).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if sparsity_rule != "default":
        raise ValueError(f"unknown sparsity rule {sparsity_rule!r}")
    prefix, qs = [0, 1], [1, 1]
    trace: list[CRTLevel] = []
    prev_ratio = None
    for k in range(1, K + 1):
        _ones_to(prefix, qs, max(1 << k, qs[-1] ** 2 if trace else 0))
        j = len(qs) - 1
        qj, qjm1 = qs[j], qs[j - 1]
        floor = max(2, qj.bit_length() - 1)
        P = _small_primes_set(qj)
        a = floor
        while any((a * qj + qjm1) % p == 0 for p in P):
            a += 1
        q1 = a * qj + qjm1
        for p in P:
            if q1 % p == 0:
                raise VerificationError(f"level {k}: q_(j+1) divisible by {p}")
        r, M = _crt([(-qj * pow(q1, -1, p) % p, p) for p in P])
        base = floor + (r - floor) % M
        chosen, tried, ok = None, 0, prev_ratio is None
        for t in range(window):
            b = base + t * M
            tried += 1
            ratio, _ = smooth_phi_ratio(b * q1 + qj)
            if prev_ratio is None or ratio < prev_ratio:
                chosen, ok = b, True
                break
        if chosen is None:
            chosen = base
        b = chosen
        q2 = b * q1 + qj
        h = hashlib.blake2b(f"{seed}:{k}".encode(), digest_size=8).digest()
        c = floor + int.from_bytes(h, "little") % floor
        q3 = c * q2 + q1
        prefix += [a, b, c]
        qs += [q1, q2, q3]
        ratio, exact = smooth_phi_ratio(q2)
        trace.append(CRTLevel(k, j, j + 2, P, a, b, c, floor, qj, q2, ratio, exact,
                              tried, ok))
        prev_ratio = ratio
    literal = "cf:[0;" + ",".join(map(str, prefix[1:])) + "]"
    alpha = CFExpansion(prefix, literal=literal)
    for lv in trace:
        lv.quality = _crt_quality(alpha, lv.q_nk, eps)
    verify_crt(alpha, trace)
    return alpha, trace


def _crt_quality(alpha: Irrational, q: int, eps: Fraction) -> Optional[float]:
    """||q alpha|| q log q / (log log log q)^(1 - eps), None when undefined."""
    lq = math.log(q)
    if lq <= 1 or math.log(lq) <= 1:
        return None
    lll = math.log(math.log(lq))
    d = alpha.approx(2 * q.bit_length() + 64)
    dist = abs(q * d.value - round(q * d.value))
    return float(dist * q) * lq / lll ** float(1 - eps)


def verify_crt(alpha: Irrational, trace: list) -> None:
    """Direct modular re-check of every level; raises VerificationError."""
    last = max(lv.n_k + 1 for lv in trace)
    for n in range(1, last + 1):
        if math.gcd(alpha.convergent(n).q, alpha.convergent(n - 1).q) != 1:
            raise VerificationError(f"q_{n} and q_{n - 1} are not coprime")
    for lv in trace:
        qj = alpha.convergent(lv.j).q
        qjm1 = alpha.convergent(lv.j - 1).q
        q1 = alpha.convergent(lv.j + 1).q
        q2 = alpha.convergent(lv.j + 2).q
        if (alpha.quotient(lv.j + 1), alpha.quotient(lv.j + 2), alpha.quotient(lv.j + 3)) != \
                (lv.a0, lv.b0, lv.c0):
            raise VerificationError(f"level {lv.k}: quotients do not match the trace")
        if q1 != lv.a0 * qj + qjm1 or q2 != lv.b0 * q1 + qj or q2 != lv.q_nk:
            raise VerificationError(f"level {lv.k}: recurrence mismatch")
        for p in lv.primes:
            if q1 % p == 0:
                raise VerificationError(f"level {lv.k}: first system fails at p={p}")
            if q2 % p != 0:
                raise VerificationError(f"level {lv.k}: second system fails at p={p}")
        if lv.primes != _small_primes_set(qj):
            raise VerificationError(f"level {lv.k}: wrong small-prime set")
