"""Acceptance criteria; each test prints one PASS/FAIL line with its measurements."""
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from kurzlab.arith import phi_ratio_id_check
from kurzlab.bohr import enumerate_bohr, gap_embedding, verify_inclusion
from kurzlab.correl import choose_blocks, overlap_second_moment, sieve_bound_sweep
from kurzlab.equi import exponent_fit
from kurzlab.exper import (NoQualifyingConvergent, build_counterexample_psi, construct_alpha_crt,
                           estimate_measure, verify_crt)
from kurzlab.psi import parse_psi
from kurzlab.realnum import CFExpansion, engineered_alpha, parse_alpha
from kurzlab.sets import ALL_PRIMES, enumerate_set, landau_diagnostic, parse_set, sieve_form


@pytest.fixture
def report(capsys):
    def emit(num, ok, detail, elapsed, limit):
        ok = ok and elapsed < limit
        line = f"CRITERION {num:2d}: {'PASS' if ok else 'FAIL'}  ({elapsed:.1f}s of {limit}s)  {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def test_c01_cf_invariants(report):
    t0 = time.perf_counter()
    rng = random.Random(1)
    failures = 0
    for _ in range(1000):
        alpha = CFExpansion([rng.randrange(0, 10)] + [rng.randrange(1, 10**6) for _ in range(50)])
        prev = alpha.convergent(0)
        for n in range(1, 51):
            c = alpha.convergent(n)
            if c.p * prev.q - prev.p * c.q != (-1) ** (n - 1) or math.gcd(c.p, c.q) != 1:
                failures += 1
            prev = c
    el = time.perf_counter() - t0
    report(1, failures == 0, f"failures={failures} over 1000 streams x depth 50", el, 5)


def _brute_forms(N, form):
    ok = np.zeros(N + 1, dtype=bool)
    r = math.isqrt(N)
    for a in range(r + 1):
        b = np.arange(a, r + 1)
        v = form(a, b)
        ok[v[v <= N]] = True
    return np.flatnonzero(ok[1:]) + 1


def test_c02_dual_characterizations(report):
    t0 = time.perf_counter()
    s2_ref = _brute_forms(10**5, lambda a, b: a * a + b * b)
    s2 = enumerate_set(parse_set("s2"), 1, 10**5 + 1)
    l_ref = _brute_forms(5 * 10**4, lambda a, b: a * a + a * b + b * b)
    lo = enumerate_set(parse_set("loeschian"), 1, 5 * 10**4 + 1)
    mis_s2 = len(set(s2_ref.tolist()) ^ set(s2.tolist()))
    mis_l = len(set(l_ref.tolist()) ^ set(lo.tolist()))
    el = time.perf_counter() - t0
    report(2, mis_s2 == 0 and mis_l == 0, f"mismatches s2={mis_s2} loeschian={mis_l}", el, 10)


def test_c03_sieve_forms(report):
    t0 = time.perf_counter()
    N = 10**6
    mism = {}
    for kind in ("s2p", "lp", "ip"):
        sieve = np.flatnonzero(sieve_form(kind, N)) + 1
        fac = enumerate_set(parse_set(kind), 1, N + 1)
        mism[kind] = len(set(sieve.tolist()) ^ set(fac.tolist()))
    el = time.perf_counter() - t0
    report(3, not any(mism.values()), f"mismatches {mism}", el, 60)


def test_c04_landau(report):
    t0 = time.perf_counter()
    count, ratio = landau_diagnostic(10**7, workers=2)
    el = time.perf_counter() - t0
    report(4, 0.61 <= ratio <= 0.92, f"count={count} ratio={ratio:.4f} band=[0.61,0.92]", el, 120)


def test_c05_bohr_gap(report):
    t0 = time.perf_counter()
    exceptions = 0
    spreads = {}
    for lit in ("golden", "sqrt2", "sqrt3"):
        alpha = parse_alpha(lit)
        cz, cn = [], []
        for ell in range(6, 21):
            best_z = best_n = 0.0
            for i in range(2, ell // 2 + 1):
                t = Fraction(1, 2**i)
                members = enumerate_bohr(alpha, ell, t).members
                g = gap_embedding(alpha, ell, t)
                exceptions += len(verify_inclusion(members, g))
                scale = float((1 << ell) * t)
                best_z = max(best_z, g.z / math.sqrt(scale))
                best_n = max(best_n, members.size / scale)
            cz.append(best_z)
            cn.append(best_n)
        spreads[lit] = (max(cz) / min(cz), max(cn) / min(cn), max(cz), max(cn))
    el = time.perf_counter() - t0
    stable = all(sz <= 4 and sn <= 4 for sz, sn, _, _ in spreads.values())
    detail = "exceptions=%d " % exceptions + " ".join(
        f"{k}:Cz={v[2]:.2f}(spread {v[0]:.2f}),Cn={v[3]:.2f}(spread {v[1]:.2f})"
        for k, v in spreads.items())
    report(5, exceptions == 0 and stable, detail, el, 300)


def test_c06_totient_identity(report):
    t0 = time.perf_counter()
    bad = [n for n in range(1, 10**4 + 1) if phi_ratio_id_check(n)[2] != 0]
    el = time.perf_counter() - t0
    report(6, not bad, f"failures={len(bad)} for n<=10^4", el, 5)


def test_c07_sieve_bound(report):
    t0 = time.perf_counter()
    spec = parse_set("primes")
    maxima = {}
    for k in (12, 14, 16, 18):
        _, mx = sieve_bound_sweep(spec, ALL_PRIMES, k, 64)
        maxima[k] = float(mx)
    el = time.perf_counter() - t0
    growth = maxima[18] / maxima[12]
    ok = all(v <= 1.5 * maxima[12] for v in maxima.values())
    detail = " ".join(f"k{k}={v:.4f}" for k, v in maxima.items()) + f" growth={growth:.3f}"
    report(7, ok, detail, el, 120)


def test_c08_qia_contrast(report):
    t0 = time.perf_counter()
    psi, spec = parse_psi("dyadic:2^-k-2"), parse_set("primes")
    X, Y, mass = choose_blocks(psi, spec)
    # big quotient placed where q_(pos-1) is nearest 2^((Y+1)/4)
    target = 2 ** ((Y + 1) / 4)
    golden = parse_alpha("golden")
    pos = min(range(2, 40), key=lambda p: abs(math.log(golden.convergent(p - 1).q / target)))
    r_g = overlap_second_moment(golden, psi, spec, X, Y).ratio
    r_e = overlap_second_moment(engineered_alpha(pos), psi, spec, X, Y).ratio
    el = time.perf_counter() - t0
    detail = (f"blocks=[{X},{Y}] mass={float(mass):.3f} golden={float(r_g):.4f} "
              f"engineered(pos {pos})={float(r_e):.4f} factor={float(r_e / r_g):.2f}")
    report(8, 10 * r_g <= r_e, detail, el, 300)


def test_c09_prime_discrepancy(report):
    t0 = time.perf_counter()
    alpha, spec = parse_alpha("golden"), parse_set("primes")
    reps = []
    slope = exponent_fit(alpha, spec, [2**k for k in range(12, 23, 2)], reports=reps)
    d12, d22 = reps[0].D, reps[-1].D
    ratio = float(d22 / d12)
    limit = (2**10) ** 0.95
    el = time.perf_counter() - t0
    report(9, ratio <= limit and slope < 0.95,
           f"D(2^22)/D(2^12)={ratio:.2f} limit={limit:.1f} slope={slope:.3f}", el, 600)


def test_c10_counterexample(report):
    t0 = time.perf_counter()
    art = build_counterexample_psi(parse_alpha("liouville"), parse_set("all"), "one", 6)
    ratios = [float(r) for r in art.decay_ratios]
    incs = [lv.increment for lv in art.levels]
    problems = art.verify()
    try:
        build_counterexample_psi(parse_alpha("golden"), parse_set("all"), "one", 6)
        golden_level = None
    except NoQualifyingConvergent as e:
        golden_level = e.level
    el = time.perf_counter() - t0
    ok = (len(art.levels) == 6 and all(r <= 0.75 for r in ratios) and min(incs) >= Fraction(1, 2)
          and not problems and golden_level == 1)
    detail = (f"decay={[round(r, 3) for r in ratios]} min_increment={float(min(incs)):.3f} "
              f"verify_problems={len(problems)} golden_level={golden_level}")
    report(10, ok, detail, el, 120)


def test_c11_crt_alpha(report):
    t0 = time.perf_counter()
    alpha, trace = construct_alpha_crt(8)
    verified = True
    try:
        verify_crt(alpha, trace)
    except AssertionError:
        verified = False
    last = max(lv.n_k for lv in trace) + 1
    coprime = all(math.gcd(alpha.convergent(n).q, alpha.convergent(n - 1).q) == 1
                  for n in range(1, last + 1))
    r = [lv.phi_ratio for lv in trace[-3:]]
    decreasing = r[0] > r[1] > r[2]
    el = time.perf_counter() - t0
    detail = (f"verified={verified} coprime={coprime} "
              f"last3_phi={[round(float(x), 4) for x in r]}")
    report(11, verified and coprime and decreasing, detail, el, 60)


def test_c12_monte_carlo(report):
    t0 = time.perf_counter()
    alpha, spec = parse_alpha("golden"), parse_set("primes")
    div = estimate_measure(alpha, parse_psi("dyadic:2^-k"), spec, 128, 10**6, 1000, seed=7)
    conv = estimate_measure(alpha, parse_psi("dyadic:2^-2k"), spec, 128, 10**6, 1000, seed=7)
    div4 = estimate_measure(alpha, parse_psi("dyadic:2^-k"), spec, 128, 10**6, 1000, seed=7,
                            workers=4)
    el = time.perf_counter() - t0
    ok = div.fraction >= Fraction(9, 10) and conv.fraction <= Fraction(1, 5) and div == div4
    detail = (f"divergent={float(div.fraction):.3f} convergent={float(conv.fraction):.3f} "
              f"threads_identical={div == div4}")
    report(12, ok, detail, el, 600)
