"""Command-line front end: build, generate, analyze, verify."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import checks
from .constructions.acwindow import AcParams, ac_ratio, ac_window
from .constructions.counterexample import counterexample_window
from .constructions.entropy import entropy_window
from .constructions.paths import blend, path_window, properify
from .metrics import (
    ac_estimate,
    ac_toeplitz_upper_bound,
    ball_profile,
    besicovitch_estimate,
    count_patterns,
    entropy_word_count,
    weyl_estimate,
)
from .modelset import generate_array, period_report, regularity_constant, write_array
from .odometer import OdometerSpec
from .report import dumps, envelope
from .window import (
    boundary_mass,
    check_properties,
    from_json,
    measure,
    pseudo_D,
    pseudo_Dbar,
    to_json,
)

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class Inconclusive(Exception):
    pass


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"range must look like LO..HI, got {text!r}")
    return int(lo), int(hi)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _load_window(path: str):
    with open(path) as fh:
        return from_json(json.load(fh))


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _config(args) -> dict:
    skip = {"func"}
    return {k: (list(v) if isinstance(v, tuple) else v)
            for k, v in sorted(vars(args).items()) if k not in skip}


# build --------------------------------------------------------------------

def cmd_build(args):
    log = None
    kind = args.construction
    if kind == "counterexample":
        w = counterexample_window(args.depth or 3)
    elif kind == "acwindow":
        a = ac_window(AcParams(args.p, args.s, Fraction(args.t or 0), args.depth or 6))
        w = a.tree
    elif kind == "path":
        if args.scales is None:
            raise ValueError("path construction needs --scales")
        spec = OdometerSpec(args.scales)
        w, trace = path_window(spec, Fraction(args.t or 0), args.depth)
        log = trace.to_json()
    else:
        res = entropy_window(Fraction(args.gamma), args.stages)
        if args.variant == "zero":
            w = res.w_zero
        elif args.t is not None:
            w = properify(blend(res.w_zero, res.w_gamma, Fraction(args.t)))
        else:
            w = res.w_gamma
        log = res.log_json()
    _emit(json.dumps(to_json(w), indent=2, sort_keys=True) + "\n", args.out)
    if args.log_out and log is not None:
        _emit(dumps(envelope("build", _config(args), log)), args.log_out)
    return EXIT_OK


# generate -----------------------------------------------------------------

def cmd_generate(args):
    w = _load_window(args.window)
    x = generate_array(w, *args.range)
    text = write_array(x, args.format)
    _emit(text if text.endswith("\n") else text + "\n", args.out)
    return EXIT_OK


# analyze ------------------------------------------------------------------

def _analyze_toeplitz(args):
    w = _load_window(args.window)
    max_n = args.max_n or w.depth
    reports = [period_report(w, n).to_json() for n in range(1, max_n + 1)]
    reg = regularity_constant(w, max_n)
    props = check_properties(w, args.range or (-w.spec.index(w.depth), w.spec.index(w.depth)))
    if args.strict and props.irredundant_certificate != "yes":
        raise Inconclusive("irredundancy certificate inconclusive")
    return {
        "period_reports": reports,
        "densities": reg.densities,
        "one_minus_boundary": reg.limit_estimate,
        "boundary_mass": boundary_mass(w),
        "properties": {
            "proper": props.proper,
            "generic_on_range": props.generic_on_range,
            "frontier_hits": list(props.frontier_hits[:50]),
            "regular_certificate": props.regular_certificate,
            "irredundant_certificate": props.irredundant_certificate,
            "certified_depth": props.certified_depth,
        },
    }


def _analyze_ac(args):
    if args.window:
        w = _load_window(args.window)
        depth = args.depth or w.depth
        profile = ball_profile(w, depth)
        extra = {}
    else:
        a = ac_window(AcParams(args.p, args.s, Fraction(args.t or 0), (args.depth or 6) + 1))
        w = a.tree
        depth = args.depth or 6
        radii = [a.params.epsilon(n) for n in range(1, depth + 1)]
        profile = ball_profile(w, depth, radii, distance=a.d_t_coset, closed=True)
        extra = {"formula_ratios": [ac_ratio(a.params, n) for n in range(1, depth + 1)]}
    if args.format == "csv":
        return profile.to_csv()
    slope = ac_estimate(profile)
    return {
        "profile": [{"epsilon": e, "ball": m} for e, m in profile.points],
        "ratios": [list(r) for r in slope.ratios],
        "upper": slope.upper,
        "lower": slope.lower,
        "toeplitz_upper_bound": ac_toeplitz_upper_bound(w, min(depth, w.spec.max_depth - 1)),
        **extra,
    }


def _analyze_entropy(args):
    w = _load_window(args.window)
    x = generate_array(w, *args.range)
    if args.offsets:
        return {"offsets": list(args.offsets), "patterns": count_patterns(x, args.offsets),
                "undecided": x.undecided_count()}
    count, h = entropy_word_count(x, args.n)
    return {"n": args.n, "word_count": count, "h_n": h}


def _analyze_metric(args):
    a, b = _load_window(args.window), _load_window(args.window2)
    lengths = args.lengths or (a.spec.index(a.depth),)
    x = generate_array(a, 0, max(lengths))
    y = generate_array(b, 0, max(lengths))
    est = besicovitch_estimate(x, y, lengths)
    out = {
        "lengths": list(est.lengths),
        "besicovitch": list(est.values),
        "excluded": list(est.excluded),
        "pseudo_D": pseudo_D(a, b),
        "pseudo_Dbar": pseudo_Dbar(a, b),
    }
    if args.weyl_window:
        out["weyl_lower_bound"] = weyl_estimate(x, y, args.weyl_window)
    return out


def _analyze_path(args):
    if args.scales is None:
        raise ValueError("path analysis needs --scales")
    spec = OdometerSpec(args.scales)
    ts = [Fraction(args.t)] if args.t is not None else [
        Fraction(i, args.grid) for i in range(args.grid + 1)]
    rows = []
    for t in ts:
        w, trace = path_window(spec, t, args.depth)
        rows.append({"t": t, "measure": measure(w), "trace": trace.to_json()})
    return {"points": rows}


ANALYSES = {
    "toeplitz": _analyze_toeplitz,
    "ac": _analyze_ac,
    "entropy": _analyze_entropy,
    "metric": _analyze_metric,
    "path": _analyze_path,
}


def cmd_analyze(args):
    result = ANALYSES[args.kind](args)
    if isinstance(result, str):
        _emit(result, args.out)
    else:
        _emit(dumps(envelope(f"analyze {args.kind}", _config(args), result)), args.out)
    return EXIT_OK


# verify -------------------------------------------------------------------

def cmd_verify(args):
    names = list(checks.SUITES) if args.suite == "all" else [args.suite]
    rows = []
    for name in names:
        fn = checks.SUITES[name]
        got = fn(seed=args.seed) if name in ("odometer", "window") else fn()
        rows += [{"check": c, "passed": bool(ok), "detail": d} for c, ok, d in got]
    _emit(dumps(envelope("verify", _config(args), rows)), args.out)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symwin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--parallel", action="store_true",
                       help="accepted for compatibility; runs are single-process")

    b = sub.add_parser("build", help="write a window JSON")
    b.add_argument("--construction", required=True,
                   choices=["counterexample", "acwindow", "path", "entropy"])
    b.add_argument("--depth", type=int)
    b.add_argument("--scales", type=_ints)
    b.add_argument("--p", type=int, default=5)
    b.add_argument("--s", type=int, default=1)
    b.add_argument("--t", type=Fraction)
    b.add_argument("--gamma", type=Fraction, default=Fraction(1, 2))
    b.add_argument("--stages", type=int, default=2)
    b.add_argument("--variant", choices=["gamma", "zero"], default="gamma")
    b.add_argument("--log-out", help="construction log JSON")
    common(b)
    b.set_defaults(func=cmd_build)

    g = sub.add_parser("generate", help="sample x_W on a range")
    g.add_argument("--window", required=True)
    g.add_argument("--range", type=_range, required=True)
    g.add_argument("--format", choices=["text", "csv", "json"], default="text")
    common(g)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="run an analysis and emit a report")
    a.add_argument("kind", choices=sorted(ANALYSES))
    a.add_argument("--window")
    a.add_argument("--window2")
    a.add_argument("--max-n", type=int)
    a.add_argument("--depth", type=int)
    a.add_argument("--range", type=_range)
    a.add_argument("--lengths", type=_ints)
    a.add_argument("--weyl-window", type=int)
    a.add_argument("--n", type=int, default=4)
    a.add_argument("--offsets", type=_ints)
    a.add_argument("--scales", type=_ints)
    a.add_argument("--p", type=int, default=5)
    a.add_argument("--s", type=int, default=1)
    a.add_argument("--t", type=Fraction)
    a.add_argument("--grid", type=int, default=8)
    a.add_argument("--format", choices=["json", "csv"], default="json")
    a.add_argument("--strict", action="store_true",
                   help="exit 3 when a certificate is inconclusive")
    common(a)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("--suite", choices=["all"] + list(checks.SUITES), default="all")
    common(v)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
