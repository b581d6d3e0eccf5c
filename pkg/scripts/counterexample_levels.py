"""Per-level summary of the step-function construction for each choice of f."""
import argparse
import csv
import sys

from kurzlab.exper import NoQualifyingConvergent, build_counterexample_psi
from kurzlab.realnum import parse_alpha
from kurzlab.sets import parse_set


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", default="liouville")
    ap.add_argument("--set", default="all")
    ap.add_argument("--K", type=int, default=6)
    args = ap.parse_args()
    w = csv.writer(sys.stdout)
    w.writerow(["f", "k", "n_k", "q_bits", "segment_bits", "union_measure", "increment"])
    for f in ("one", "log", "sqrt_log", "log34"):
        try:
            art = build_counterexample_psi(parse_alpha(args.alpha), parse_set(args.set), f, args.K)
        except NoQualifyingConvergent as e:
            w.writerow([f, e.level, "none", "", "", "", ""])
            continue
        for lv in art.levels:
            w.writerow([f, lv.k, lv.n_k, lv.q.bit_length(), lv.hi.bit_length(),
                        f"{float(lv.union_measure):.6g}", f"{float(lv.increment):.6g}"])


if __name__ == "__main__":
    main()
