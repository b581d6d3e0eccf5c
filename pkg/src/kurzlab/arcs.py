"""Arcs on the circle R/Z: exact rational unions and an integer coverage sweep."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

ONE = Fraction(1)


@dataclass(frozen=True)
class ArcSet:
    """Disjoint, sorted closed arcs inside [0, 1), built from raw arcs.

    A raw arc (lo, hi) with hi < lo wraps through 0; hi - lo >= 1 is the whole
    circle.
    """

    arcs: tuple

    @classmethod
    def from_raw(cls, raw: Iterable[Sequence]) -> "ArcSet":
        pieces = []
        for lo, hi in raw:
            lo, hi = Fraction(lo), Fraction(hi)
            if hi < lo:
                hi += 1
            if hi - lo >= 1:
                return cls(((Fraction(0), ONE),))
            shift = math.floor(lo)
            lo, hi = lo - shift, hi - shift
            if hi > 1:
                pieces.append((lo, ONE))
                pieces.append((Fraction(0), hi - 1))
            else:
                pieces.append((lo, hi))
        pieces.sort()
        merged: list[list[Fraction]] = []
        for lo, hi in pieces:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1][1] = hi
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    @property
    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.arcs), Fraction(0))

    def contains(self, x) -> bool:
        x = Fraction(x) % 1
        return any(lo <= x <= hi for lo, hi in self.arcs) or (
            x == 0 and bool(self.arcs) and self.arcs[-1][1] == 1)


def arc_union_measure(raw: Iterable[Sequence]) -> Fraction:
    """Exact Lebesgue measure of a union of arcs on R/Z."""
    return ArcSet.from_raw(raw).measure


def coverage(starts: np.ndarray, lengths: np.ndarray, U: int,
             labels: np.ndarray | None = None, n_labels: int = 1):
    """Elementary segments of the circle [0, U) with per-label multiplicities.

    ``starts`` in [0, U) and ``lengths`` in [0, U] are integer arrays. Returns
    (seg_len, counts) where counts has shape (n_segments, n_labels).
    """
    starts = np.asarray(starts, dtype=np.int64)
    lengths = np.minimum(np.asarray(lengths, dtype=np.int64), U)
    if labels is None:
        labels = np.zeros(starts.size, dtype=np.int64)
    ends = starts + lengths
    wrap = ends > U
    # split wrapping arcs into [s, U) and [0, e - U)
    s_all = np.concatenate([starts, np.zeros(int(wrap.sum()), dtype=np.int64)])
    e_all = np.concatenate([np.where(wrap, U, ends), ends[wrap] - U])
    lab = np.concatenate([labels, labels[wrap]])
    pos = np.concatenate([s_all, e_all, [0, U]])
    delta = np.concatenate([np.ones(s_all.size, np.int64), -np.ones(e_all.size, np.int64), [0, 0]])
    lab_ev = np.concatenate([lab, lab, [0, 0]])
    order = np.argsort(pos, kind="stable")
    pos, delta, lab_ev = pos[order], delta[order], lab_ev[order]
    onehot = np.zeros((pos.size, n_labels), dtype=np.int64)
    onehot[np.arange(pos.size), lab_ev] = delta
    counts = np.cumsum(onehot, axis=0)[:-1]
    seg_len = np.diff(pos)
    keep = seg_len > 0
    return seg_len[keep], counts[keep]


def weighted_sum(seg_len: np.ndarray, key: np.ndarray) -> dict[int, int]:
    """{key value: total segment length}, accumulated exactly in int64."""
    uniq, inv = np.unique(key, return_inverse=True)
    tot = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(tot, inv, seg_len)
    return {int(u): int(t) for u, t in zip(uniq, tot)}


def integral_of_square(seg_len: np.ndarray, counts: np.ndarray) -> int:
    """Integral of m(x)^2 over the circle in length units, m = total multiplicity."""
    m = counts.sum(axis=1)
    return sum(k * k * v for k, v in weighted_sum(seg_len, m).items())


def cross_integral(seg_len: np.ndarray, counts: np.ndarray, a: int, b: int) -> int:
    """Integral of m_a(x) m_b(x) for two label classes."""
    ca, cb = counts[:, a], counts[:, b]
    width = int(cb.max(initial=0)) + 1
    tot = weighted_sum(seg_len, ca * width + cb)
    return sum((k // width) * (k % width) * v for k, v in tot.items())


def union_length(seg_len: np.ndarray, counts: np.ndarray) -> int:
    return int(seg_len[counts.sum(axis=1) > 0].sum())
