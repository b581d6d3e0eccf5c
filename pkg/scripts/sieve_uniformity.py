"""Largest shifted-pair count relative to the sieve bound, per dyadic block."""
import argparse
import csv
import sys

from kurzlab.correl import sieve_bound_sweep
from kurzlab.sets import parse_prime_set, parse_set


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--set", default="primes")
    ap.add_argument("--P", default="all")
    ap.add_argument("--ks", default="10,12,14,16,18")
    ap.add_argument("--hmax", type=int, default=64)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    spec, P = parse_set(args.set), parse_prime_set(args.P)
    w = csv.writer(sys.stdout)
    w.writerow(["k", "argmax_h", "max_ratio"])
    for k in map(int, args.ks.split(",")):
        rows, mx = sieve_bound_sweep(spec, P, k, args.hmax, workers=args.threads)
        h = max(rows, key=lambda r: r.ratio).h
        w.writerow([k, h, f"{float(mx):.5f}"])


if __name__ == "__main__":
    main()
