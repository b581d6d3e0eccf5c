"""JSON-friendly encoding of exact values (huge ints and rationals as strings)."""
from __future__ import annotations

import contextlib
import dataclasses
import sys
from fractions import Fraction

import numpy as np


@contextlib.contextmanager
def unlimited_digits():
    """Lift the int <-> str digit cap for the duration of the block."""
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def encode(v, with_float: bool = False):
    """Fractions become "p/q", ints beyond 2^53 become decimal strings."""
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, Fraction):
        with unlimited_digits():
            s = f"{v.numerator}/{v.denominator}"
        return {"value": s, "float": float(v)} if with_float else s
    if isinstance(v, (np.integer,)):
        v = int(v)
    if isinstance(v, int):
        if abs(v) < 1 << 53:
            return v
        with unlimited_digits():
            return str(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, np.ndarray):
        return [encode(x, with_float) for x in v.tolist()]
    if dataclasses.is_dataclass(v) and not isinstance(v, type):
        return {f.name: encode(getattr(v, f.name), with_float) for f in dataclasses.fields(v)}
    if isinstance(v, dict):
        return {str(k): encode(x, with_float) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode(x, with_float) for x in v]
    return v


def decode_int(s) -> int:
    with unlimited_digits():
        return int(s)


def decode_fraction(s) -> Fraction:
    with unlimited_digits():
        return Fraction(s)
