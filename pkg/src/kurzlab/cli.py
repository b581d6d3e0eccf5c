"""Command-line front end: ``kurzlab <module> <op> [flags]``.

Exit codes: 0 ok, 2 usage, 3 resource budget exceeded, 4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import platform
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .errors import ResourceBudgetError, VerificationError
from .realnum import DIAGNOSTICS, parse_alpha
from .serial import encode, unlimited_digits
from .sets import parse_prime_set, parse_set

EXIT_OK, EXIT_USAGE, EXIT_RESOURCES, EXIT_VERIFY = 0, 2, 3, 4
THREADS_ENV = "KURZLAB_THREADS"


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    """A check ran to completion and reported failure; the report is still written."""

    def __init__(self, message: str, result: dict):
        super().__init__(message)
        self.result = result


@dataclass
class RunManifest:
    argv: list
    config: dict
    seed: int
    versions: dict
    wall_time: float = 0.0
    diagnostics: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# argument types


def int_arg(s: str) -> int:
    """Integers written as 1000000, 1e6, 2^20 or 10**7."""
    s = s.strip().replace("_", "")
    try:
        if "^" in s or "**" in s:
            b, e = s.replace("**", "^").split("^")
            return int(b) ** int(e)
        if "e" in s.lower():
            m, e = s.lower().split("e")
            v = Fraction(m) * 10 ** int(e)
            if v.denominator != 1:
                raise ValueError
            return int(v)
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None


def frac_arg(s: str) -> Fraction:
    try:
        s = s.strip()
        if s.startswith("2^"):
            return Fraction(2) ** int(s[2:])
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {s!r}") from None


def int_list(s: str) -> list[int]:
    return [int_arg(x) for x in s.split(",") if x.strip()]


def read_config(path: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    cfg = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{ln}: expected key=value")
            k, v = (x.strip() for x in line.split("=", 1))
            cfg[k.replace("-", "_")] = v
    return cfg


# --------------------------------------------------------------------------
# handlers; each returns (result dict, csv rows or None)


def _need(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"missing required option --{n.replace('_', '-')}")


def _alpha(args):
    _need(args, "alpha")
    return parse_alpha(args.alpha)


def _set(args, name="set"):
    _need(args, name)
    return parse_set(getattr(args, name))


def cmd_sets(args):
    from . import sets

    if args.op == "member":
        _need(args, "n")
        spec = _set(args)
        return {"set": str(spec), "n": args.n, "member": sets.membership(spec, args.n)}, None
    if args.op == "enum":
        _need(args, "X", "Y")
        spec = _set(args)
        ns = sets.enumerate_set(spec, args.X, args.Y, workers=args.threads)
        rows = [{"n": int(n)} for n in ns]
        return {"set": str(spec), "X": args.X, "Y": args.Y, "count": int(ns.size),
                "sample": ns[:20].tolist()}, rows
    if args.op == "stats":
        _need(args, "k")
        spec = _set(args)
        st = sets.dyadic_stats(spec, parse_prime_set(args.P), args.k, workers=args.threads)
        res = encode(st, with_float=True)
        res["violations"] = []
        return res, None
    if args.op == "hyp1":
        spec = _set(args)
        rep = sets.check_hypothesis_I(spec, parse_prime_set(args.P), args.rho,
                                      range(args.k_min, args.k_max + 1))
        rows = [{"k": k, "members": m, "violations": v} for k, m, v in rep.rows]
        return {"set": str(spec), "rho": encode(args.rho), "holds": rep.holds,
                "rows": rows, "violations": [list(v) for v in rep.violations]}, rows
    if args.op == "landau":
        c, ratio = sets.landau_diagnostic(args.X or 10**7, workers=args.threads)
        return {"X": args.X or 10**7, "count": c, "ratio": ratio}, None
    raise UsageError(f"unknown sets op {args.op!r}")


def cmd_bohr(args):
    from . import bohr

    alpha = _alpha(args)
    _need(args, "ell", "t")
    b = bohr.enumerate_bohr(alpha, args.ell, args.t, workers=args.threads)
    res = {"alpha": str(alpha), "ell": args.ell, "t": encode(args.t, with_float=True),
           "members_count": len(b), "sample": b.members[:20].tolist(),
           "uncertain": len(b.uncertain)}
    rows = [{"n": int(n)} for n in b.members]
    if args.embed:
        g = bohr.gap_embedding(alpha, args.ell, args.t)
        bad = bohr.verify_inclusion(b.members, g)
        res.update(gap={"x": g.x, "y": g.y, "z": g.z}, inclusion_ok=not bad,
                   inclusion_failures=bad[:20])
        if bad:
            raise VerificationFailed(f"{len(bad)} Bohr members outside the progression", res)
    if args.totient_avg:
        ta = bohr.totient_average_over_bohr(alpha, args.ell, args.t, bohr=b)
        res.update(sum=encode(ta.total, with_float=True),
                   normalized=encode(ta.normalized, with_float=True),
                   case=ta.case_label, c_alpha=encode(ta.c_alpha, with_float=True))
    return res, rows


def cmd_correl(args):
    from . import correl
    from .psi import parse_psi

    spec = _set(args)
    if args.op == "shifted":
        _need(args, "k")
        rows, mx = correl.sieve_bound_sweep(spec, parse_prime_set(args.P), args.k, args.hmax,
                                            workers=args.threads)
        out = [{"k": r.k, "h": r.h, "count": r.count, "bound": encode(r.bound_value),
                "bound_float": float(r.bound_value), "ratio": encode(r.ratio),
                "ratio_float": float(r.ratio)} for r in rows]
        return {"set": str(spec), "k": args.k, "hmax": args.hmax,
                "max_ratio": encode(mx, with_float=True), "rows": out}, out
    if args.op == "qia":
        alpha = _alpha(args)
        _need(args, "psi")
        psi = parse_psi(args.psi)
        if args.X is None or args.Y is None:
            X, Y, mass = correl.choose_blocks(psi, spec)
        else:
            X, Y, mass = args.X, args.Y, None
        s = correl.overlap_second_moment(alpha, psi, spec, X, Y, with_blocks=args.blocks)
        res = {"alpha": str(alpha), "set": str(spec), "psi": str(psi), "X": X, "Y": Y,
               "mass": encode(mass, with_float=True) if mass is not None else None,
               "numerator": encode(s.numerator, with_float=True),
               "denominator": encode(s.denominator, with_float=True),
               "ratio": encode(s.ratio, with_float=True), "n_arcs": s.n_arcs,
               "error": encode(s.error, with_float=True)}
        if args.blocks:
            res["block_matrix"] = [[i, j, encode(v, with_float=True)]
                                   for (i, j), v in sorted(s.block_matrix.items())]
        row = {k: res[k] for k in ("alpha", "set", "X", "Y", "n_arcs")}
        row.update(ratio=res["ratio"]["value"], ratio_float=res["ratio"]["float"])
        return res, [row]
    raise UsageError(f"unknown correl op {args.op!r}")


def cmd_equi(args):
    from . import equi

    alpha, spec = _alpha(args), _set(args)
    if args.op == "disc":
        _need(args, "x")
        r = equi.star_discrepancy(alpha, spec, args.x, workers=args.threads)
        row = {"scale": r.x, "n_pts": r.n_pts, "D_count": encode(r.D),
               "D_count_float": float(r.D), "D_normalized": r.normalized}
        return {"alpha": str(alpha), "set": str(spec), **row}, [row]
    if args.op == "weyl":
        _need(args, "N")
        w = equi.weyl_sum(alpha, spec, args.r, args.N, workers=args.threads)
        row = {"r": w.r, "N": w.N, "n_pts": w.n_pts, "re": w.value.real, "im": w.value.imag,
               "abs": abs(w.value), "error": w.error}
        return {"alpha": str(alpha), "set": str(spec), **row}, [row]
    if args.op == "fit":
        scales = args.scales or [1 << k for k in range(12, 23, 2)]
        reps = []
        slope = equi.exponent_fit(alpha, spec, scales, reports=reps)
        rows = [{"scale": r.x, "n_pts": r.n_pts, "D_count": encode(r.D),
                 "D_count_float": float(r.D), "D_normalized": r.normalized} for r in reps]
        return {"alpha": str(alpha), "set": str(spec), "slope": slope, "rows": rows}, rows
    raise UsageError(f"unknown equi op {args.op!r}")


def cmd_exper(args):
    from . import exper
    from .psi import parse_psi

    if args.op == "measure":
        alpha, spec = _alpha(args), _set(args)
        _need(args, "psi", "N")
        psi = parse_psi(args.psi)
        m = exper.estimate_measure(alpha, psi, spec, args.N0, args.N, args.samples,
                                   min_hits=args.min_hits, seed=args.seed, workers=args.threads)
        res = {"alpha": str(alpha), "set": str(spec), "psi": str(psi), "N0": args.N0,
               "N": args.N, "samples": m.samples, "seed": args.seed, "min_hits": args.min_hits,
               "fraction": encode(m.fraction, with_float=True), "ci95": m.ci_halfwidth,
               "fraction_min3": encode(m.fraction_min3, with_float=True),
               "mean_hits": m.mean_hits, "uncertain": m.uncertain}
        return res, None
    if args.op == "counterexample":
        if args.alpha_file:
            with open(args.alpha_file) as fh:
                args.alpha = fh.read().strip()
        alpha, spec = _alpha(args), _set(args)
        try:
            art = exper.build_counterexample_psi(alpha, spec, args.f, args.K)
        except exper.NoQualifyingConvergent as e:
            res = {"alpha": str(alpha), "set": str(spec), "f": args.f, "K": args.K,
                   "status": "no qualifying convergent", "level": e.level}
            return res, None
        problems = art.verify()
        res = json.loads(art.to_json())
        res["status"] = "ok" if not problems else "verification failed"
        res["problems"] = problems
        if problems:
            raise VerificationFailed("; ".join(problems), res)
        return res, None
    if args.op == "verify-artifact":
        _need(args, "artifact")
        with open(args.artifact) as fh, unlimited_digits():
            art = exper.CounterexampleArtifact.from_json(fh.read())
        problems = art.verify()
        res = {"artifact": args.artifact, "levels": len(art.levels), "problems": problems,
               "ok": not problems}
        if problems:
            raise VerificationFailed("; ".join(problems), res)
        return res, None
    if args.op == "crt-alpha":
        _need(args, "K")
        alpha, trace = exper.construct_alpha_crt(args.K, seed=args.seed, eps=args.eps)
        rows = []
        for lv in trace:
            rows.append({"k": lv.k, "j": lv.j, "n_k": lv.n_k,
                         "primes": " ".join(map(str, lv.primes)), "a0": lv.a0, "b0": lv.b0,
                         "c0": lv.c0, "size_floor": lv.size_floor,
                         "q_nk_bits": lv.q_nk.bit_length(),
                         "phi_ratio": encode(lv.phi_ratio), "phi_ratio_float": float(lv.phi_ratio),
                         "phi_exact": lv.phi_exact, "descent_ok": lv.descent_ok,
                         "quality": lv.quality})
        res = {"alpha": str(alpha), "K": args.K, "seed": args.seed, "eps": encode(args.eps),
               "verified": True, "levels": rows,
               "note": "decay checks skip convergent indices 0 and 1"}
        return res, rows
    raise UsageError(f"unknown exper op {args.op!r}")


# --------------------------------------------------------------------------
# parser


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default: ${THREADS_ENV} or 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output file (written atomically)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--config", default=None, help="key=value file supplying defaults")

    p = argparse.ArgumentParser(prog="kurzlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    top = p.add_subparsers(dest="module", required=True)
    leaves = {}

    def leaf(sub, name, mod, **kw):
        q = sub.add_parser(name, parents=[common], **kw)
        leaves[(mod, name)] = q
        q.set_defaults(op=name)
        return q

    # sets
    s = top.add_parser("sets", help="integer sets and sieve statistics")
    ss = s.add_subparsers(dest="op", required=True)
    q = leaf(ss, "member", "sets")
    q.add_argument("--set")
    q.add_argument("--n", type=int_arg)
    q = leaf(ss, "enum", "sets")
    q.add_argument("--set")
    q.add_argument("--X", type=int_arg)
    q.add_argument("--Y", type=int_arg)
    q = leaf(ss, "stats", "sets")
    q.add_argument("--set")
    q.add_argument("--P", default="all")
    q.add_argument("--k", type=int)
    q = leaf(ss, "hyp1", "sets")
    q.add_argument("--set")
    q.add_argument("--P", default="all")
    q.add_argument("--rho", type=frac_arg, default=Fraction(1, 2))
    q.add_argument("--k-min", type=int, default=8)
    q.add_argument("--k-max", type=int, default=14)
    q = leaf(ss, "landau", "sets")
    q.add_argument("--X", type=int_arg)

    # bohr has no op level
    q = top.add_parser("bohr", parents=[common], help="Bohr sets and progressions")
    leaves[("bohr", None)] = q
    q.set_defaults(op=None)
    q.add_argument("--alpha")
    q.add_argument("--ell", type=int)
    q.add_argument("--t", type=frac_arg)
    q.add_argument("--embed", action="store_true")
    q.add_argument("--totient-avg", action="store_true")

    c = top.add_parser("correl", help="shifted counts and overlap second moments")
    cs = c.add_subparsers(dest="op", required=True)
    q = leaf(cs, "shifted", "correl")
    q.add_argument("--set")
    q.add_argument("--P", default="all")
    q.add_argument("--k", type=int)
    q.add_argument("--hmax", type=int, default=64)
    q = leaf(cs, "qia", "correl")
    q.add_argument("--alpha")
    q.add_argument("--set")
    q.add_argument("--psi")
    q.add_argument("--X", type=int)
    q.add_argument("--Y", type=int)
    q.add_argument("--blocks", action="store_true", help="include the block matrix")

    e = top.add_parser("equi", help="discrepancy and Weyl sums")
    es = e.add_subparsers(dest="op", required=True)
    for name in ("disc", "weyl", "fit"):
        q = leaf(es, name, "equi")
        q.add_argument("--alpha")
        q.add_argument("--set")
        if name == "disc":
            q.add_argument("--x", type=int_arg)
        elif name == "weyl":
            q.add_argument("--r", type=int, default=1)
            q.add_argument("--N", type=int_arg)
        else:
            q.add_argument("--scales", type=int_list)

    x = top.add_parser("exper", help="measure estimates and constructions")
    xs = x.add_subparsers(dest="op", required=True)
    q = leaf(xs, "measure", "exper")
    q.add_argument("--alpha")
    q.add_argument("--set")
    q.add_argument("--psi")
    q.add_argument("--N", type=int_arg)
    q.add_argument("--N0", type=int_arg, default=1)
    q.add_argument("--samples", type=int_arg, default=1000)
    q.add_argument("--min-hits", type=int, default=1)
    q = leaf(xs, "counterexample", "exper")
    q.add_argument("--alpha")
    q.add_argument("--alpha-file")
    q.add_argument("--set", default="all")
    q.add_argument("--f", choices=("one", "log", "sqrt_log", "log34"), default="one")
    q.add_argument("--K", type=int, default=6)
    q = leaf(xs, "verify-artifact", "exper")
    q.add_argument("--artifact")
    q = leaf(xs, "crt-alpha", "exper")
    q.add_argument("--K", type=int)
    q.add_argument("--eps", type=frac_arg, default=Fraction(1, 2))
    return p, leaves


HANDLERS = {"sets": cmd_sets, "bohr": cmd_bohr, "correl": cmd_correl, "equi": cmd_equi,
            "exper": cmd_exper}


# --------------------------------------------------------------------------
# output


def atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (json.dumps(v) if isinstance(v, (dict, list)) else v)
                        for k, v in r.items()})
    return buf.getvalue()


def render(result: dict, rows: Optional[list], fmt: str) -> str:
    with unlimited_digits():
        if fmt == "csv":
            return to_csv(rows if rows is not None else [_flat(result)])
        return json.dumps(encode(result), indent=1) + "\n"


def _flat(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, dict) and set(v) == {"value", "float"}:
            out[k], out[k + "_float"] = v["value"], v["float"]
        elif not isinstance(v, (dict, list)):
            out[k] = v
    return out


def summary(result: dict) -> str:
    lines = []
    for k, v in result.items():
        if isinstance(v, dict) and set(v) == {"value", "float"}:
            v = f"{v['float']:.6g}"
        elif isinstance(v, (list, dict)):
            v = f"<{len(v)} items>"
        s = str(v)
        lines.append(f"{k:>16}  {s if len(s) <= 60 else s[:57] + '...'}")
    return "\n".join(lines)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def main(argv: Optional[list] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, leaves = build_parser()
    args = parser.parse_args(argv)
    cfg = {}
    if args.config:
        try:
            cfg = read_config(args.config)
        except (OSError, UsageError) as e:
            parser.error(str(e))
        leaf_parser = leaves[(args.module, args.op)]
        known = {a.dest for a in leaf_parser._actions}
        unknown = sorted(set(cfg) - known)
        if unknown:
            parser.error(f"unknown config keys: {', '.join(unknown)}")
        leaf_parser.set_defaults(**cfg)
        args = parser.parse_args(argv)
    args.threads = _threads(args)
    manifest = RunManifest(argv, cfg, args.seed,
                           {"kurzlab": __version__, "numpy": np.__version__,
                            "python": platform.python_version()})
    DIAGNOSTICS.clear()
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        result, rows = HANDLERS[args.module](args)
    except UsageError as e:
        parser.error(str(e))
    except ResourceBudgetError as e:
        print(f"kurzlab: resource budget exceeded: {e}\n"
              "advice: lower the scale (ell, k, N, x) or use a sparser set", file=sys.stderr)
        return EXIT_RESOURCES
    except VerificationError as e:
        print(f"kurzlab: verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except VerificationFailed as e:
        print(f"kurzlab: verification failed: {e}", file=sys.stderr)
        result, rows, code = e.result, None, EXIT_VERIFY
    except ValueError as e:
        parser.error(str(e))
    manifest.wall_time = time.perf_counter() - t0
    manifest.diagnostics = dict(DIAGNOSTICS)
    if args.out:
        man_path = args.out + ".manifest.json"
        if args.format == "json":
            result = {**result, "manifest": os.path.basename(man_path)}
        atomic_write(args.out, render(result, rows, args.format))
        atomic_write(man_path, json.dumps(encode(manifest), indent=1) + "\n")
        print(summary(result))
    else:
        sys.stdout.write(render(result, rows, args.format))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
