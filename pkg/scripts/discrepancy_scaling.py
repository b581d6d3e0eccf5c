"""Count-unit discrepancy of {n alpha} along a set at dyadic scales, with the fitted slope."""
import argparse
import csv
import sys

from kurzlab.equi import exponent_fit
from kurzlab.realnum import parse_alpha
from kurzlab.sets import parse_set


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", default="golden")
    ap.add_argument("--sets", default="primes,s2,squarefree,all")
    ap.add_argument("--kmin", type=int, default=12)
    ap.add_argument("--kmax", type=int, default=22)
    args = ap.parse_args()
    alpha = parse_alpha(args.alpha)
    w = csv.writer(sys.stdout)
    w.writerow(["set", "scale", "n_pts", "D_count", "D_normalized", "slope"])
    for text in args.sets.split(","):
        reps = []
        slope = exponent_fit(alpha, parse_set(text), [2**k for k in range(args.kmin, args.kmax + 1, 2)],
                             reports=reps)
        for r in reps:
            w.writerow([text, r.x, r.n_pts, f"{float(r.D):.3f}", f"{r.normalized:.6f}", f"{slope:.4f}"])


if __name__ == "__main__":
    main()
