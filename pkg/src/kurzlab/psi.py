"""Approximation functions that are constant on dyadic blocks [2^k, 2^(k+1))."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

from .arith import shifted_prime_product
from .errors import ResourceBudgetError
from .sets import SievePrimeSet

HALF = Fraction(1, 2)
_POW_RE = re.compile(r"^2\^-\(?(\d*)k([+-]\d+)?\)?$")


@dataclass(frozen=True)
class DyadicPsi:
    """psi(n) = psi_k for 2^k <= n < 2^(k+1).

    ``blocks`` overrides individual k; every other k uses ``rule``:
    ``zero``, ``const:p/q`` or ``pow:a,b`` (meaning 2^-(a k + b)). Values are
    capped at 1/2.
    """

    blocks: tuple = ()
    rule: str = "zero"
    _lookup: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        blocks = tuple(sorted((int(k), Fraction(v)) for k, v in dict(self.blocks).items()))
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_lookup", dict(blocks))
        _rule_value(self.rule, 0)  # validates the rule
        for k, v in blocks:
            if v < 0 or v > HALF:
                raise ValueError(f"psi_{k}={v} outside [0, 1/2]")
        top = (blocks[-1][0] if blocks else 0) + 2
        vals = [self.block(k) for k in range(top + 1)]
        if any(b > a for a, b in zip(vals, vals[1:])):
            raise ValueError("psi must be non-increasing in k")

    def block(self, k: int) -> Fraction:
        v = self._lookup.get(k)
        if v is None:
            v = _rule_value(self.rule, k)
        return v

    def __call__(self, n: int) -> Fraction:
        return self.block(int(n).bit_length() - 1)

    def to_json(self) -> dict:
        return {"rule": self.rule,
                "blocks": {str(k): f"{v.numerator}/{v.denominator}" for k, v in self.blocks}}

    @classmethod
    def from_json(cls, d: dict) -> "DyadicPsi":
        return cls(tuple((int(k), Fraction(v)) for k, v in d["blocks"].items()), d["rule"])

    def __str__(self) -> str:
        if not self.blocks:
            return _rule_literal(self.rule)
        return f"blocks({len(self.blocks)})+{_rule_literal(self.rule)}"


def _rule_value(rule: str, k: int) -> Fraction:
    if rule == "zero":
        return Fraction(0)
    if rule.startswith("const:"):
        v = Fraction(rule[6:])
        if not 0 <= v <= HALF:
            raise ValueError("constant psi must lie in [0, 1/2]")
        return v
    if rule.startswith("pow:"):
        a, b = (int(x) for x in rule[4:].split(","))
        if a < 0:
            raise ValueError("pow rule needs a >= 0")
        e = a * k + b
        return min(HALF, Fraction(1, 1 << e) if e >= 0 else Fraction(1 << -e))
    raise ValueError(f"unknown psi rule {rule!r}")


def _rule_literal(rule: str) -> str:
    if rule.startswith("pow:"):
        a, b = (int(x) for x in rule[4:].split(","))
        ak = "k" if a == 1 else f"{a}k"
        tail = f"-{b}" if b > 0 else (f"+{-b}" if b < 0 else "")
        return f"dyadic:2^-{ak}{tail}"
    return rule


def parse_psi(text: str) -> DyadicPsi:
    """``dyadic:2^-k``, ``dyadic:2^-2k``, ``dyadic:2^-k-2``, ``const:1/4``, ``zero``."""
    s = text.strip().replace(" ", "")
    if s in ("zero", "0"):
        return DyadicPsi()
    if s.startswith("const:"):
        return DyadicPsi(rule=s)
    if s.startswith("dyadic:"):
        body = s[7:]
        m = _POW_RE.match(body)
        if not m:
            raise ValueError(f"bad dyadic psi {text!r}")
        a = int(m.group(1)) if m.group(1) else 1
        # 2^-k-2 means 2^-(k+2)
        off = m.group(2)
        b = -int(off) if off else 0
        if "(" in body:
            b = -b
        return DyadicPsi(rule=f"pow:{a},{b}")
    raise ValueError(f"unknown psi literal {text!r}")


def f_P(P: SievePrimeSet, n: int) -> Fraction:
    """prod_{p <= n, p in P} (1 + 1/p), exact."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 1 << 26:
        raise ResourceBudgetError("f_P is computed exactly only for n <= 2^26")
    return shifted_prime_product(P.primes_upto(n), 1)


def normalize_psi(theta: Union[DyadicPsi, Callable[[int], Fraction]], K: int,
                  P: Optional[SievePrimeSet] = None, eta=Fraction(1),
                  positive_density: bool = False) -> DyadicPsi:
    """Normalized step function on blocks k = 0..K.

    psi_k = min(max(theta(2^(k+1)), 2^-2k), cap_k, 1/2) with
    cap_k = eta * f_P(2^k) / 2^k, or eta / 2^k in positive-density mode.
    The value theta(2^(k+1)) flattens theta on the block.
    """
    eta = Fraction(eta)
    samples = [Fraction(theta(1 << (k + 1))) for k in range(K + 2)]
    if any(b > a for a, b in zip(samples, samples[1:])):
        raise ValueError("theta must be non-increasing")
    if not positive_density and P is None:
        raise ValueError("a prime set P is required unless positive_density is set")
    blocks = {}
    for k in range(K + 1):
        floor = Fraction(1, 1 << (2 * k))
        if positive_density:
            cap = eta / (1 << k)
        else:
            cap = eta * f_P(P, 1 << k) / (1 << k)
        blocks[k] = min(max(samples[k], floor), cap, HALF)
    # past K fall back to the floor when that keeps psi non-increasing
    tail = "pow:2,0" if blocks[K] >= Fraction(1, 1 << (2 * K + 2)) else "zero"
    return DyadicPsi(tuple(blocks.items()), rule=tail)
