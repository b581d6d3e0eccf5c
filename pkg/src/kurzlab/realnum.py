"""Exact real numbers: continued fractions, convergents and certified ||n alpha||.

Three kinds of sources are supported:

* quadratic surds ``(a + b*sqrt(d))/c``, handled with exact integer arithmetic,
* continued-fraction expansions given by a finite prefix plus a quotient rule
  (unlisted quotients default to 1),
* rationals, mostly useful as exact test inputs.

All objects are immutable from the caller's point of view; quotient and
convergent caches are internal.
"""
from __future__ import annotations

import math
import re
import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional

__all__ = [
    "InsufficientQuotients",
    "Convergent",
    "BoundedReal",
    "Irrational",
    "QuadraticSurd",
    "CFExpansion",
    "RationalNumber",
    "parse_alpha",
    "convergents",
    "frac_dist",
    "bad_constant",
    "engineered_alpha",
    "liouville_alpha",
    "DIAGNOSTICS",
]

# counters for near-threshold comparisons that could not be certified
DIAGNOSTICS: Counter = Counter()
_diag_lock = threading.Lock()


def _bump(key: str, by: int = 1) -> None:
    with _diag_lock:
        DIAGNOSTICS[key] += by


class InsufficientQuotients(ValueError):
    """The expansion ran out of partial quotients before the requested depth."""


@dataclass(frozen=True)
class Convergent:
    index: int
    p: int
    q: int

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class BoundedReal:
    """A rational value with a sound absolute error bound."""

    value: Fraction
    error: Fraction = Fraction(0)

    @property
    def lo(self) -> Fraction:
        return self.value - self.error

    @property
    def hi(self) -> Fraction:
        return self.value + self.error

    def __add__(self, other):
        if not isinstance(other, BoundedReal):
            other = BoundedReal(Fraction(other))
        return BoundedReal(self.value + other.value, self.error + other.error)

    __radd__ = __add__

    def __neg__(self):
        return BoundedReal(-self.value, self.error)

    def __sub__(self, other):
        if not isinstance(other, BoundedReal):
            other = BoundedReal(Fraction(other))
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, BoundedReal):
            other = BoundedReal(Fraction(other))
        v = self.value * other.value
        e = (abs(self.value) * other.error + abs(other.value) * self.error
             + self.error * other.error)
        return BoundedReal(v, e)

    __rmul__ = __mul__

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __float__(self) -> float:
        return float(self.value)


def _dist_to_int(x: Fraction) -> Fraction:
    f = x - math.floor(x)
    return min(f, 1 - f)


class Irrational:
    """Base class for exactly evaluable reals.

    Subclasses implement ``_quotient(i)`` (or raise ``InsufficientQuotients``)
    and ``approx(bits)``. ``dist_le`` may be overridden with an exact test.
    """

    literal: str

    def __init__(self):
        self._quotients: list[int] = []
        self._conv: list[tuple[int, int]] = []  # (p_n, q_n) for n = 0, 1, ...
        self._lock = threading.Lock()

    # -- continued fraction ---------------------------------------------
    def _quotient(self, i: int) -> int:  # pragma: no cover - abstract
        raise NotImplementedError

    def quotient(self, i: int) -> int:
        with self._lock:
            while len(self._quotients) <= i:
                self._quotients.append(self._quotient(len(self._quotients)))
            return self._quotients[i]

    def quotients(self, n: int) -> list[int]:
        return [self.quotient(i) for i in range(n)]

    def convergent(self, n: int) -> Convergent:
        while len(self._conv) <= n:
            m = len(self._conv)
            a = self.quotient(m)
            if m == 0:
                pq = (a, 1)
            elif m == 1:
                p0, q0 = self._conv[0]
                pq = (a * p0 + 1, a * q0)
            else:
                (p1, q1), (p2, q2) = self._conv[m - 1], self._conv[m - 2]
                pq = (a * p1 + p2, a * q1 + q2)
            with self._lock:
                if len(self._conv) == m:
                    self._conv.append(pq)
        p, q = self._conv[n]
        return Convergent(n, p, q)

    def iter_convergents(self) -> Iterator[Convergent]:
        n = 0
        while True:
            try:
                yield self.convergent(n)
            except InsufficientQuotients:
                return
            n += 1

    # -- evaluation -----------------------------------------------------
    def approx(self, bits: int) -> BoundedReal:
        """Rational approximation with error at most ``2**-bits``."""
        raise NotImplementedError  # pragma: no cover

    def fixed(self, bits: int) -> int:
        """Integer A with ``|alpha * 2**bits - A| <= 1``."""
        b = self.approx(bits + 2)
        return math.floor(b.value * (1 << bits))

    def frac64(self) -> int:
        """Fractional part of alpha as a 64-bit fixed-point integer."""
        return self.fixed(64) % (1 << 64)

    def is_rational(self) -> bool:
        return False

    def dist_le(self, n: int, t: Fraction, max_doublings: int = 4) -> tuple[bool, bool]:
        """Decide ``||n alpha|| <= t``; returns (result, certified)."""
        return self.shifted_dist_le(n, Fraction(0), t, max_doublings)

    def shifted_dist_le(self, n: int, gamma: Fraction, t: Fraction,
                        max_doublings: int = 4) -> tuple[bool, bool]:
        """Decide ``||n alpha + gamma|| <= t`` by refining precision.

        After ``max_doublings`` refinements the midpoint decides and the
        comparison is counted in ``DIAGNOSTICS["uncertain_comparison"]``.
        """
        bits = n.bit_length() + 64
        for _ in range(max_doublings + 1):
            a = self.approx(bits)
            v = _dist_to_int(n * a.value + gamma)
            e = n * a.error
            if v + e <= t:
                return True, True
            if v - e > t:
                return False, True
            bits *= 2
        _bump("uncertain_comparison")
        return v <= t, False

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.literal!r})"

    def __str__(self) -> str:
        return self.literal


# --------------------------------------------------------------------------
# quadratic surds


def _floor_surd(P: int, D: int, Q: int) -> int:
    """floor((P + sqrt(D)) / Q) for non-square D > 0 and Q != 0."""
    s = math.isqrt(D)
    if Q > 0:
        return (P + s) // Q
    return -((P + s) // (-Q)) - 1


class QuadraticSurd(Irrational):
    """``(a + b*sqrt(d)) / c`` with d > 0 non-square and b != 0."""

    def __init__(self, a: int, b: int, d: int, c: int, literal: Optional[str] = None):
        super().__init__()
        if d <= 0 or math.isqrt(d) ** 2 == d:
            raise ValueError(f"d={d} must be a positive non-square")
        if b == 0 or c == 0:
            raise ValueError("b and c must be non-zero")
        if c < 0:
            a, b, c = -a, -b, -c
        self.a, self.b, self.d, self.c = a, b, d, c
        self.literal = literal or f"surd:({a}{'+' if b >= 0 else '-'}{abs(b)}*sqrt({d}))/{c}"
        # state for the (P + sqrt(D))/Q expansion
        if b > 0:
            self._P, self._D, self._Q = a * c, b * b * d * c * c, c * c
        else:
            # (a - |b| sqrt d)/c = (-a + |b| sqrt d)/(-c)
            self._P, self._D, self._Q = -a * c, b * b * d * c * c, -c * c
        self._states: list[tuple[int, int]] = []

    def _quotient(self, i: int) -> int:
        # called sequentially under the lock by Irrational.quotient
        P, Q = (self._P, self._Q) if not self._states else self._states[-1]
        a = _floor_surd(P, self._D, Q)
        P2 = a * Q - P
        Q2 = (self._D - P2 * P2) // Q
        self._states.append((P2, Q2))
        return a

    def period_start(self, limit: int = 200) -> Optional[tuple[int, int]]:
        """(start, period) of the quotient stream within ``limit`` terms, if seen."""
        self.quotient(limit)
        seen: dict[tuple[int, int], int] = {}
        states = [(self._P, self._Q)] + self._states
        for i, st in enumerate(states[: limit + 1]):
            if st in seen:
                return seen[st], i - seen[st]
            seen[st] = i
        return None

    def floor_scaled(self, bits: int) -> int:
        """Exact floor(alpha * 2**bits)."""
        a, b, d, c = self.a, self.b, self.d, self.c
        s = math.isqrt(b * b * d << (2 * bits))  # floor(|b| sqrt(d) 2^bits)
        m = (a << bits) + s if b > 0 else (a << bits) - s - 1
        return m // c

    def approx(self, bits: int) -> BoundedReal:
        return BoundedReal(Fraction(self.floor_scaled(bits), 1 << bits), Fraction(1, 1 << bits))

    def fixed(self, bits: int) -> int:
        return self.floor_scaled(bits)

    def sign_minus(self, r: Fraction, n: int = 1) -> int:
        """Exact sign of ``n*alpha - r``."""
        # n(a + b sqrt d)/c - r  ~  (n a - r c) + n b sqrt d
        u = n * self.a - r * self.c
        v = n * self.b
        if u >= 0 and v > 0:
            return 1
        if u <= 0 and v < 0:
            return -1
        lhs, rhs = u * u, v * v * self.d
        if u > 0:
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1

    def floor_n(self, n: int) -> int:
        """Exact floor(n * alpha)."""
        b = self.approx(n.bit_length() + 8)
        m = math.floor(n * b.value)
        # correct the guess by exact comparisons
        while self.sign_minus(Fraction(m), n) < 0:
            m -= 1
        while self.sign_minus(Fraction(m + 1), n) >= 0:
            m += 1
        return m

    def shifted_dist_le(self, n: int, gamma: Fraction, t: Fraction,
                        max_doublings: int = 4) -> tuple[bool, bool]:
        t, gamma = Fraction(t), Fraction(gamma)
        if t >= Fraction(1, 2):
            return True, True
        if t < 0:
            return False, True
        b = self.approx(n.bit_length() + 8)
        m = math.floor(n * b.value + gamma)
        # m = floor(n alpha + gamma), fixed up by exact comparisons
        while self.sign_minus(m - gamma, n) < 0:
            m -= 1
        while self.sign_minus(m + 1 - gamma, n) >= 0:
            m += 1
        # u = n alpha + gamma - m in [0, 1); ||.|| <= t iff u <= t or u >= 1 - t
        if self.sign_minus(m - gamma + t, n) <= 0:
            return True, True
        return self.sign_minus(m + 1 - gamma - t, n) >= 0, True


# --------------------------------------------------------------------------
# continued fraction expansions


class CFExpansion(Irrational):
    """``[a0; a1, a2, ...]`` from a prefix and an optional stateless rule.

    Quotients past the prefix come from ``rule(i)`` or default to 1.
    """

    def __init__(self, prefix: list[int], rule: Optional[Callable[[int], int]] = None,
                 literal: Optional[str] = None, max_index: Optional[int] = None):
        super().__init__()
        if not prefix and rule is None:
            raise ValueError("empty expansion")
        for i, a in enumerate(prefix):
            if i > 0 and a < 1:
                raise ValueError(f"partial quotient a_{i}={a} must be >= 1")
        self.prefix = tuple(int(a) for a in prefix)
        self.rule = rule
        self.max_index = max_index
        self.literal = literal or "cf:[" + (
            f"{self.prefix[0]};" + ",".join(map(str, self.prefix[1:])) if self.prefix else ""
        ) + "]"

    def _quotient(self, i: int) -> int:
        if self.max_index is not None and i > self.max_index:
            raise InsufficientQuotients(f"no partial quotient a_{i}")
        if i < len(self.prefix):
            return self.prefix[i]
        if self.rule is not None:
            a = int(self.rule(i))
            if i > 0 and a < 1:
                raise ValueError(f"rule produced a_{i}={a} < 1")
            return a
        return 1

    def approx(self, bits: int) -> BoundedReal:
        target = 1 << bits
        n = 0
        while True:
            c = self.convergent(n)
            c1 = self.convergent(n + 1)
            if c.q * c1.q >= target:
                return BoundedReal(Fraction(c.p, c.q), Fraction(1, c.q * c1.q))
            n += 1


class RationalNumber(Irrational):
    """An exact rational p/q, exposed through the same interface."""

    def __init__(self, value: Fraction, literal: Optional[str] = None):
        super().__init__()
        self.value = Fraction(value)
        self.literal = literal or f"rat:{self.value.numerator}/{self.value.denominator}"
        x = self.value
        self._cf: list[int] = []
        while True:
            a = math.floor(x)
            self._cf.append(a)
            x -= a
            if x == 0:
                break
            x = 1 / x

    def _quotient(self, i: int) -> int:
        if i >= len(self._cf):
            raise InsufficientQuotients(f"rational {self.value} has only {len(self._cf)} quotients")
        return self._cf[i]

    def is_rational(self) -> bool:
        return True

    def approx(self, bits: int) -> BoundedReal:
        return BoundedReal(self.value)

    def fixed(self, bits: int) -> int:
        return math.floor(self.value * (1 << bits))

    def shifted_dist_le(self, n: int, gamma: Fraction, t: Fraction,
                        max_doublings: int = 4) -> tuple[bool, bool]:
        return _dist_to_int(n * self.value + Fraction(gamma)) <= t, True


# --------------------------------------------------------------------------
# named constructors and parsing


def _liouville_rule(i: int) -> int:
    return 0 if i == 0 else 1 << (1 << (i - 1))


def liouville_alpha() -> CFExpansion:
    """[0; 2, 2^2, 2^4, 2^8, ...]: a_n = 2^(2^(n-1))."""
    return CFExpansion([0], _liouville_rule, literal="liouville")


def engineered_alpha(position: int, big: int = 10**6) -> CFExpansion:
    """[0; 1, ..., 1, big, 1, 1, ...] with ``big`` at index ``position``."""
    prefix = [0] + [1] * (position - 1) + [big]
    literal = f"bigq:{position}" if big == 10**6 else f"bigq:{position},{big}"
    return CFExpansion(prefix, literal=literal)


_SURD_RE = re.compile(
    r"^surd:\(\s*(-?\d+)\s*([+-])\s*(\d*)\s*\*?\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*(-?\d+)$")


def parse_alpha(text: str) -> Irrational:
    """Parse an alpha literal.

    Accepted forms: ``golden``, ``sqrt2``, ``sqrt3``, ``liouville``,
    ``surd:(a+b*sqrt(d))/c``, ``cf:[a0;a1,a2,...]``, ``rat:p/q``,
    ``bigq:pos[,big]``.
    """
    s = text.strip()
    if s == "golden":
        return QuadraticSurd(-1, 1, 5, 2, literal="golden")
    if s == "sqrt2":
        return QuadraticSurd(0, 1, 2, 1, literal="sqrt2")
    if s == "sqrt3":
        return QuadraticSurd(0, 1, 3, 1, literal="sqrt3")
    if s == "liouville":
        return liouville_alpha()
    if s.startswith("surd:"):
        m = _SURD_RE.match(s.replace(" ", ""))
        if not m:
            raise ValueError(f"bad surd literal {text!r}")
        a, sign, b, d, c = m.groups()
        b = int(b) if b else 1
        if sign == "-":
            b = -b
        return QuadraticSurd(int(a), b, int(d), int(c), literal=s)
    if s.startswith("cf:"):
        body = s[3:].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"bad cf literal {text!r}")
        body = body[1:-1]
        head, _, tail = body.partition(";")
        prefix = [int(head)] + [int(x) for x in tail.split(",") if x.strip()]
        return CFExpansion(prefix, literal=s)
    if s.startswith("rat:"):
        return RationalNumber(Fraction(s[4:]), literal=s)
    if s.startswith("bigq:"):
        parts = [int(x) for x in s[5:].split(",")]
        return engineered_alpha(*parts)
    raise ValueError(f"unknown alpha literal {text!r}")


# --------------------------------------------------------------------------
# operations


def convergents(alpha: Irrational, depth: int) -> list[Convergent]:
    """Convergents p_n/q_n for n = 0..depth."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return [alpha.convergent(n) for n in range(depth + 1)]


def frac_dist(alpha: Irrational, n: int, bits: Optional[int] = None) -> BoundedReal:
    """||n alpha|| with error at most ``n * 2**-bits``."""
    if bits is None:
        bits = n.bit_length() + 64
    if bits < 1:
        raise ValueError("bits must be >= 1")
    a = alpha.approx(bits)
    return BoundedReal(_dist_to_int(n * a.value), n * a.error)


def bad_constant(alpha: Irrational, Q: int, bits: int = 128) -> Fraction:
    """min_{1 <= q <= Q} q ||q alpha||, scanned over convergent denominators.

    For irrational alpha the returned value is accurate to ``Q**2 * 2**-bits``.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    best = None
    for c in alpha.iter_convergents():
        if c.q > Q:
            break
        if c.q == 0:
            continue
        v = c.q * frac_dist(alpha, c.q, bits + Q.bit_length()).value
        if best is None or v < best:
            best = v
        if v == 0:
            break
    return best
