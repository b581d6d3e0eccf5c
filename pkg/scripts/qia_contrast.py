"""Overlap ratio for golden alpha and for alphas with one huge partial quotient."""
import argparse
import csv
import sys

from kurzlab.correl import choose_blocks, overlap_second_moment
from kurzlab.psi import parse_psi
from kurzlab.realnum import engineered_alpha, parse_alpha
from kurzlab.sets import parse_set


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--psi", default="dyadic:2^-k-2")
    ap.add_argument("--set", default="primes")
    ap.add_argument("--positions", default="3,5,7,9,12,14,16")
    args = ap.parse_args()
    psi, spec = parse_psi(args.psi), parse_set(args.set)
    X, Y, mass = choose_blocks(psi, spec)
    w = csv.writer(sys.stdout)
    w.writerow(["alpha", "X", "Y", "mass", "n_arcs", "ratio"])
    alphas = [parse_alpha("golden")] + [engineered_alpha(int(p)) for p in args.positions.split(",")]
    for a in alphas:
        s = overlap_second_moment(a, psi, spec, X, Y)
        w.writerow([str(a), X, Y, f"{float(mass):.4f}", s.n_arcs, f"{float(s.ratio):.5f}"])


if __name__ == "__main__":
    main()
