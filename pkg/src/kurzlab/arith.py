"""Prime sieves, factorization and the multiplicative functions used elsewhere."""
from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import lru_cache

import numpy as np

TRIAL_LIMIT = 1 << 20


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p:: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@lru_cache(maxsize=None)
def _small_primes() -> tuple[int, ...]:
    return tuple(int(p) for p in simple_sieve(TRIAL_LIMIT))


@lru_cache(maxsize=8)
def primes_upto(limit: int) -> np.ndarray:
    """Cached variant of simple_sieve; do not mutate the result."""
    arr = simple_sieve(limit)
    arr.setflags(write=False)
    return arr


def primes_in_range(lo: int, hi: int) -> np.ndarray:
    """Primes in [lo, hi) by a segmented sieve of Eratosthenes."""
    lo = max(lo, 2)
    if hi <= lo:
        return np.array([], dtype=np.int64)
    base = primes_upto(math.isqrt(hi - 1) + 1)
    mark = np.ones(hi - lo, dtype=bool)
    for p in base:
        p = int(p)
        start = max(p * p, -(-lo // p) * p)
        if start >= hi:
            continue
        mark[start - lo:: p] = False
    return np.flatnonzero(mark).astype(np.int64) + lo


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic for n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, seed: int = 1) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(seed)
    while True:
        c = rng.randrange(1, n)
        y, m, g, r, q = rng.randrange(0, n), 128, 1, 1, 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> dict[int, int]:
    """Prime factorization {p: e}: trial division below 2^20, then Pollard rho."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out: dict[int, int] = {}
    for p in _small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m < TRIAL_LIMIT * TRIAL_LIMIT or is_probable_prime(m):
            # below 2^40 the trial division above already removed every small factor
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend([d, m // d])
    return out


def totient(n: int) -> int:
    r = n
    for p in factorize(n):
        r -= r // p
    return r


def mobius_sq(n: int) -> int:
    return int(all(e == 1 for e in factorize(n).values()))


def omega(n: int) -> int:
    return len(factorize(n))


def big_omega(n: int) -> int:
    return sum(factorize(n).values())


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).items():
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def phi_ratio_id_check(n: int) -> tuple[Fraction, Fraction, Fraction]:
    """Both sides of n/phi(n) = sum_{d|n} mu^2(d)/phi(d), and their difference."""
    lhs = Fraction(n, totient(n))
    rhs = sum((Fraction(1, totient(d)) for d in divisors(n) if mobius_sq(d)), Fraction(0))
    return lhs, rhs, lhs - rhs


def totient_table(limit: int) -> np.ndarray:
    """phi(n) for 0 <= n <= limit (phi(0) = 0)."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in primes_upto(limit):
        p = int(p)
        phi[p::p] -= phi[p::p] // p
    return phi


def prod_tree(values) -> int:
    vals = [int(v) for v in values]
    if not vals:
        return 1
    while len(vals) > 1:
        nxt = [vals[i] * vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def shifted_prime_product(primes: np.ndarray, shift: int) -> Fraction:
    """Exact prod (p + shift)/p over the given primes, reduced via exponent vectors.

    Avoids a gcd of two enormous integers: every p + shift is factored with a
    smallest-prime-factor table and the exponents cancel directly.
    """
    primes = np.asarray(primes, dtype=np.int64)
    if primes.size == 0:
        return Fraction(1)
    top = int(primes.max()) + abs(shift) + 1
    spf = smallest_factor_table(top)
    expo = np.zeros(top + 1, dtype=np.int64)
    np.subtract.at(expo, primes, 1)
    vals = primes + shift
    vals = vals[vals > 1]
    rem = vals.copy()
    while rem.size:
        f = spf[rem]
        np.add.at(expo, f, 1)
        rem = rem // f
        rem = rem[rem > 1]
    pos = np.flatnonzero(expo > 0)
    neg = np.flatnonzero(expo < 0)
    num = prod_tree(int(r) ** int(expo[r]) for r in pos)
    den = prod_tree(int(r) ** int(-expo[r]) for r in neg)
    return _reduced_fraction(num, den)


def _reduced_fraction(num: int, den: int) -> Fraction:
    # num/den is already in lowest terms; skip the quadratic-time gcd
    f = Fraction.__new__(Fraction)
    f._numerator, f._denominator = num, den
    return f


def mul_reduced(small: Fraction, big: Fraction) -> Fraction:
    """small * big for reduced fractions, with gcds taken only against ``small``.

    Cheap when ``big`` has huge numerator and denominator.
    """
    a, b = small.numerator, small.denominator
    N, D = big.numerator, big.denominator
    g1, g2 = math.gcd(a, D), math.gcd(N, b)
    num, den = (a // g1) * (N // g2), (b // g2) * (D // g1)
    if den < 0:
        num, den = -num, -den
    return _reduced_fraction(num, den)


@lru_cache(maxsize=4)
def smallest_factor_table(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[1] = 1
    for p in primes_upto(math.isqrt(limit) + 1):
        p = int(p)
        block = spf[p * p:: p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[0] = 0
    spf.setflags(write=False)
    return spf
