"""Bohr-set sizes and progression parameters over a grid of (ell, t); CSV to stdout."""
import argparse
import csv
import math
import sys
from fractions import Fraction

from kurzlab.bohr import enumerate_bohr, gap_embedding, verify_inclusion
from kurzlab.realnum import parse_alpha


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", nargs="+", default=["golden", "sqrt2", "sqrt3"])
    ap.add_argument("--ell-min", type=int, default=6)
    ap.add_argument("--ell-max", type=int, default=20)
    args = ap.parse_args()
    w = csv.writer(sys.stdout)
    w.writerow(["alpha", "ell", "t", "members", "x", "y", "z", "C_z", "C_N", "failures"])
    for lit in args.alpha:
        alpha = parse_alpha(lit)
        for ell in range(args.ell_min, args.ell_max + 1):
            for i in range(2, ell // 2 + 1):
                t = Fraction(1, 2**i)
                members = enumerate_bohr(alpha, ell, t).members
                g = gap_embedding(alpha, ell, t)
                scale = float((1 << ell) * t)
                w.writerow([lit, ell, str(t), members.size, g.x, g.y, g.z,
                            f"{g.z / math.sqrt(scale):.4f}", f"{members.size / scale:.4f}",
                            len(verify_inclusion(members, g))])


if __name__ == "__main__":
    main()
