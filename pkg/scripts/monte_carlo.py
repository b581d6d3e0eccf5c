"""Share of random shifts hit along a set, for a divergent and a convergent psi, as N grows."""
import argparse
import csv
import sys

from kurzlab.exper import estimate_measure
from kurzlab.psi import parse_psi
from kurzlab.realnum import parse_alpha
from kurzlab.sets import parse_set


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", default="golden")
    ap.add_argument("--set", default="primes")
    ap.add_argument("--psi", nargs="+", default=["dyadic:2^-k", "dyadic:2^-2k"])
    ap.add_argument("--N0", type=int, default=128)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    alpha, spec = parse_alpha(args.alpha), parse_set(args.set)
    w = csv.writer(sys.stdout)
    w.writerow(["psi", "N", "fraction", "ci95", "fraction_min3", "mean_hits"])
    for lit in args.psi:
        for e in range(3, 8):
            m = estimate_measure(alpha, parse_psi(lit), spec, args.N0, 10**e, args.samples,
                                 seed=args.seed, workers=args.threads)
            w.writerow([lit, 10**e, f"{float(m.fraction):.4f}", f"{m.ci_halfwidth:.4f}",
                        f"{float(m.fraction_min3):.4f}", f"{m.mean_hits:.3f}"])


if __name__ == "__main__":
    main()
