"""Command-line front end: ``nharm <subcommand> [options]``.

Every run writes one result document (JSON or CSV) and one run manifest.
The manifest goes to ``--manifest PATH``; otherwise next to ``--output`` as
``PATH.manifest.json``; otherwise to standard error as a single JSON line.

Exit codes: 0 success, 2 domain or parse error, 3 not-found under --strict.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, is_dataclass

import mpmath
import numpy as np

from . import __version__, _backend
from . import convergence as cv
from . import diophantine as dio
from . import expsums as es
from . import phasecore as pc
from . import sequences as sq
from .errors import NharmError

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_NOT_FOUND = 3

# options that never change the result document
_RUN_KEYS = ("threads", "out", "output", "manifest", "config", "strict")


# ---------------------------------------------------------------------------
# serialization

def format_float(x: float) -> str:
    """17 significant digits, '.' as decimal separator; inf and nan as names."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def to_plain(obj):
    """Dataclasses, numpy scalars and arrays, complex numbers -> JSON-ready values."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: to_plain(v) for k, v in asdict(obj).items() if not k.startswith("_")}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits; non-finite floats become strings."""
    def emit(v, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {emit(x, level + 1)}" for k, x in v.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(v, list):
            if not v:
                return "[]"
            if all(not isinstance(x, (dict, list)) for x in v):
                return "[" + ", ".join(emit(x, level + 1) for x in v) + "]"
            return "[\n" + ",\n".join(pad + emit(x, level + 1) for x in v) + "\n" + end + "]"
        if isinstance(v, bool):
            return "true" if v else "false"
        if v is None:
            return "null"
        if isinstance(v, int):
            return str(v)
        if isinstance(v, float):
            s = format_float(v)
            return s if math.isfinite(v) else json.dumps(s)
        return json.dumps(v)

    return emit(to_plain(obj), 0) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else
                    ("true" if v is True else "false" if v is False else v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument helpers

def _real(text: str) -> str:
    """Keep real inputs as text so decimals are read exactly downstream."""
    text = text.strip()
    try:
        with mpmath.workdps(20):
            pc.to_mpf(text)
    except NharmError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _pair(text: str) -> tuple[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    return _real(parts[0]), _real(parts[1])


def _int_list(text: str) -> list[int]:
    try:
        out = [int(float(p)) if "e" in p.lower() else int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty integer list")
    return out


def _real_list(text: str) -> list[str]:
    return [_real(p) for p in text.split(";" if ";" in text else ",") if p.strip()]


def _positive_int(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _precision(text: str) -> int:
    v = _positive_int(text)
    if v < 16:
        raise argparse.ArgumentTypeError("precision must be at least 16 digits")
    return v


def _exp(args, alpha: str) -> pc.HarmonicExponent:
    return pc.HarmonicExponent(alpha, precision_digits=args.precision)


def _float(text: str) -> float:
    with mpmath.workdps(20):
        return float(pc.to_mpf(text))


# ---------------------------------------------------------------------------
# subcommands; each returns (document, (header, rows), status)

def cmd_sum(args):
    exp = _exp(args, args.alpha)
    if (args.t is None) == (args.x is None):
        raise argparse.ArgumentTypeError("exactly one of --x and --t is required")
    angle = args.t is not None
    value = args.t if angle else args.x
    if args.trace_step:
        ks = list(range(args.start + args.trace_step - 1, args.k, args.trace_step)) + [args.k]
    else:
        ks = [args.k]
    if angle:
        res = es.sine_sum(exp, value, args.start, args.k)
        sums, _ = pc.partial_sums(exp, value, args.start, args.k - args.start + 1, angle=True,
                                  checkpoints=[k - args.start + 1 for k in ks])
        result = {"value": res.value, "convention": "sum sin(n^alpha t)"}
    else:
        res = es.exp_sum(exp, value, args.k, args.start)
        sums, _ = es.exp_sum_trace(exp, value, ks, args.start)
        result = {"value": res.value, "convention": "sum e(n^alpha x)"}
    result.update(start=res.start, count=res.count, alpha=res.alpha, x=res.x, max_phase_error=res.max_phase_error,
                  abs=abs(res.value))
    rows = [(int(k), res.x, float(s.real), float(s.imag), float(abs(s))) for k, s in zip(ks, sums)]
    doc = {"result": result, "trace": [{"k": r[0], "re": r[2], "im": r[3], "abs": r[4]} for r in rows]}
    return doc, (("k", "t" if angle else "x", "re", "im", "abs"), rows), EXIT_OK


def cmd_scan(args):
    exp = _exp(args, args.alpha)
    if args.target == "exponent":
        r = es.empirical_exponent(exp, args.interval, args.grid, args.kmax, mode=args.mode, fit_from=args.fit_from,
                                  refine=not args.no_refine, block=args.block, threads=args.threads)
        c_alpha = None if exp.is_integer else es.c_exponent(exp)
        doc = {"result": r, "proven_exponent": None if c_alpha is None else 1 - c_alpha}
        fit = set(r.fit_levels)
        rows = [(k, math.log(k), s, math.log(s) if s > 0 else float("-inf"), x, k in fit, d)
                for k, s, x, d in zip(r.k_grid, r.sup_values, r.argsup_x, r.density_levels)]
        return doc, (("k", "log_k", "sup_abs", "log_sup", "x_at_sup", "in_fit", "density_ok"), rows), EXIT_OK
    seq = sq.parse_sequence_spec(args.seq)
    q = cv.TailQuery(args.l, args.L, args.interval, args.kind, args.points, args.spacing)
    r = cv.series_tail(seq, exp, q, threads=args.threads)
    doc = {"result": {"l": r.l, "L": r.L, "series_kind": r.series_kind, "sup_abs": r.sup_abs, "arg_sup": r.arg_sup,
                      "value_at_sup": r.value_at_sup, "phase_error": r.phase_error, "sequence": seq.name},
           "trace": [{"x": x, "value": v} for x, v in zip(r.grid.tolist(), r.trace.tolist())]}
    rows = list(zip(r.grid.tolist(), r.trace.tolist()))
    return doc, (("x", "value"), rows), EXIT_OK


def cmd_classify(args):
    seq = sq.parse_sequence_spec(args.seq)
    r = sq.estimate_class_constants(seq, (args.l_min, args.l_max), args.kmax)
    doc = {"result": r}
    header = ("sequence", "l_min", "l_max", "K_max", "A_min", "B_min", "V_min", "V_diverging", "is_monotone")
    rows = [(r.sequence, r.range_l[0], r.range_l[1], r.K_max, r.A_min, r.B_min, r.V_min, r.V_diverging, r.is_monotone)]
    return doc, (header, rows), EXIT_OK


def cmd_verdict(args):
    exp = _exp(args, args.alpha)
    seq = sq.parse_sequence_spec(args.seq)
    domain = args.grid_values if args.grid_values else args.domain
    r = cv.uniform_convergence_verdict(seq, exp, domain, args.schedule, args.L_factor, points=args.points,
                                       spacing=args.spacing, series_kind=args.kind, threads=args.threads)
    rows = [(row.l, row.L, row.x_at_sup, row.sup_abs, row.precondition_stat) for row in r.rows]
    return {"result": r}, (("l", "L", "x_at_sup", "sup_abs", "precondition_stat"), rows), EXIT_OK


def cmd_badpoint(args):
    status = EXIT_OK
    if args.mode == "approx":
        if not args.alphas:
            raise argparse.ArgumentTypeError("--alphas is required in approx mode")
        betas = args.betas if args.betas else ["0"] * len(args.alphas)
        q = dio.DiophantineQuery(args.alphas, betas, _float(args.delta), args.search_bound)
        r = dio.simultaneous_approx_search(q, threads=args.threads, precision_digits=args.precision)
        if not r.found and args.strict:
            status = EXIT_NOT_FOUND
        rows = [(r.x, j + 1, v) for j, v in enumerate(r.norms)]
        return {"result": r}, (("x", "j", "norm"), rows), status
    exp = _exp(args, args.alpha)
    if args.mode == "alignment":
        r = dio.bad_point_search_alignment(exp, args.L, args.threshold, args.x_range or (0.0, 20000.0),
                                           args.grid or 400_000, threads=args.threads)
        rows = [(n, s, ok) for n, s, ok in r.certificates]
        header = ("n", "sine", "ok")
    else:
        r = dio.bad_point_search_partial_sum(exp, args.L, args.x_range or (0.0, 2 * math.pi),
                                             args.grid or 200_000, threads=args.threads)
        rows = [(k, s, b, ok) for k, s, b, ok in r.certificates]
        header = ("k", "S_k", "bound", "ok")
    doc = {"result": r}
    if args.seq and args.mode == "partial_sum" and r.success:
        seq = sq.parse_sequence_spec(args.seq)
        lo = args.l if args.l else 1
        hi = args.bound_L if args.bound_L else args.L
        doc["divergence"] = dio.divergence_lower_bound(seq, r, lo, hi)
    if not r.success and args.strict:
        status = EXIT_NOT_FOUND
    return doc, (header, rows), status


def cmd_sieve(args):
    if args.load:
        t = dio.load_sieve(args.load)
    else:
        if not args.N:
            raise argparse.ArgumentTypeError("--N or --load is required")
        t = dio.squarefree_sieve(args.N)
    if args.dump:
        t.dump(args.dump)
    count = t.count()
    target = 6 / math.pi ** 2
    dens = count / t.N
    result = {"N": t.N, "count": count, "density": dens, "six_over_pi_squared": target,
              "deviation": dens - target, "allowed_deviation": 2 / math.sqrt(t.N),
              "within_bound": abs(dens - target) <= 2 / math.sqrt(t.N)}
    if args.list:
        result["numbers"] = t.numbers(args.list).tolist()
    rows = [(t.N, count, dens, dens - target)]
    return {"result": result}, (("N", "count", "density", "deviation"), rows), EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--precision", type=_precision, default=None,
                   help="phase precision in decimal digits (default: $HARMONIC_PRECISION or 30)")
    g.add_argument("--threads", type=_positive_int, default=1, help="worker threads for grid scans (default: 1)")
    g.add_argument("--out", choices=("json", "csv"), default="json", help="output format (default: json)")
    g.add_argument("--output", metavar="PATH", help="write the result here instead of standard output")
    g.add_argument("--manifest", metavar="PATH", help="write the run manifest here")
    g.add_argument("--config", metavar="PATH", help="key=value file supplying option defaults")
    g.add_argument("--strict", action="store_true", help="exit with status 3 when a search finds nothing")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="nharm",
        description="Sums, tail diagnostics and bad points for series sum c_k sin(k^alpha x).",
        epilog="Angles t are raw radians (t = 2 pi x); x is in cycles for e(y) = exp(2 pi i y).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("sum", parents=[common], help="exponential or sine sum over n = start..k",
                       description="Exponential sum sum e(n^alpha x) (--x) or sine sum sum sin(n^alpha t) (--t).")
    p.add_argument("--alpha", type=_real, required=True, help="exponent alpha > 0, e.g. 0.5 or 2/3")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--x", type=_real, help="frequency in cycles")
    which.add_argument("--t", type=_real, help="raw angle in radians; accepts forms like pi/2")
    p.add_argument("--k", type=_positive_int, required=True, help="last summation index")
    p.add_argument("--start", type=_positive_int, default=1, help="first summation index (default: 1)")
    p.add_argument("--trace-step", type=_positive_int, default=None,
                   help="also report partial sums every STEP terms")
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("scan", parents=[common], help="empirical exponent fit or series tail sup",
                       description="--target exponent: fit log sup|V_k| against log k on dyadic k. "
                                   "--target tail: sup over a grid of |sum_{k=l}^{L} c_k sin(k^alpha t)|.")
    p.add_argument("--target", choices=("exponent", "tail"), default="exponent", help="what to scan (default: exponent)")
    p.add_argument("--alpha", type=_real, required=True, help="exponent alpha > 0")
    p.add_argument("--interval", type=_pair, default=("0.05", "0.5"),
                   help="x interval a,b in cycles (exponent) or t interval in radians (tail); default 0.05,0.5")
    p.add_argument("--grid", type=_positive_int, default=10_000, help="grid points for the exponent scan (default: 10000)")
    p.add_argument("--kmax", type=_positive_int, default=1 << 16, help="largest dyadic k (default: 65536)")
    p.add_argument("--mode", choices=("heuristic", "exact"), default="heuristic", help="grid policy (default: heuristic)")
    p.add_argument("--fit-from", type=int, default=None, help="fit k >= 2^FIT_FROM (default: upper half of the levels)")
    p.add_argument("--no-refine", action="store_true", help="skip golden-section refinement of each sup")
    p.add_argument("--block", action="store_true", help="sum over dyadic blocks k <= n < 2k")
    p.add_argument("--seq", default="power:1", help="coefficients for the tail scan (default: power:1)")
    p.add_argument("--l", type=_positive_int, default=100, help="tail start index (default: 100)")
    p.add_argument("--L", type=_positive_int, default=1000, help="tail end index (default: 1000)")
    p.add_argument("--points", type=_positive_int, default=1001, help="tail grid points (default: 1001)")
    p.add_argument("--spacing", choices=("linear", "log"), default="linear", help="tail grid spacing (default: linear)")
    p.add_argument("--kind", choices=("sine", "cosine"), default="sine", help="tail series kind (default: sine)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("classify", parents=[common], help="class constants A, B, V of a coefficient sequence",
                       description="Estimate the constants A, B and V over l in [l_min, l_max], truncated at K_max.")
    p.add_argument("--seq", required=True,
                   help="power:B, power_log:B,G, oscillating:B, constant:C or file:PATH")
    p.add_argument("--l-min", type=_positive_int, default=1, help="smallest l (default: 1)")
    p.add_argument("--l-max", type=_positive_int, default=100, help="largest l (default: 100)")
    p.add_argument("--kmax", type=_positive_int, default=10_000, help="truncation index K_max (default: 10000)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verdict", parents=[common], help="tail trend along an l schedule",
                       description="Tail sup-norms along a schedule of l with the precondition statistics.")
    p.add_argument("--seq", required=True, help="coefficient sequence spec, as for classify")
    p.add_argument("--alpha", type=_real, required=True, help="exponent alpha > 0")
    p.add_argument("--domain", type=_pair, default=("1", "2"), help="angle interval a,b in radians (default: 1,2)")
    p.add_argument("--grid-values", type=_real_list, default=None, help="explicit angles, comma separated")
    p.add_argument("--schedule", type=_int_list, default=[100, 1000, 10000], help="increasing l values (default: 100,1000,10000)")
    p.add_argument("--L-factor", type=float, default=None, help="L = ceil(L_FACTOR l) (default: 2^(1/alpha))")
    p.add_argument("--points", type=_positive_int, default=1001, help="grid points (default: 1001)")
    p.add_argument("--spacing", choices=("linear", "log"), default="linear", help="grid spacing (default: linear)")
    p.add_argument("--kind", choices=("sine", "cosine"), default="sine", help="series kind (default: sine)")
    p.set_defaults(func=cmd_verdict)

    p = sub.add_parser("badpoint", parents=[common], help="bad-point searches and simultaneous approximation",
                       description="alignment: sin(n^alpha x0) >= threshold for square-free n <= L. "
                                   "partial_sum: S_k(x0) > 0.1 k for k <= L. "
                                   "approx: smallest integer x with ||x a_j + b_j|| < delta.")
    p.add_argument("--mode", choices=("alignment", "partial_sum", "approx"), default="partial_sum",
                   help="search kind (default: partial_sum)")
    p.add_argument("--alpha", type=_real, default="0.5", help="exponent alpha > 0 (default: 0.5)")
    p.add_argument("--L", type=_positive_int, default=50, help="length L (default: 50)")
    p.add_argument("--threshold", type=float, default=0.8, help="alignment threshold (default: 0.8)")
    p.add_argument("--x-range", type=_pair, default=None,
                   help="search interval a,b (default: 0,20000 for alignment, 0,2pi for partial_sum)")
    p.add_argument("--grid", type=_positive_int, default=None,
                   help="coarse grid points (default: 400000 alignment, 200000 partial_sum)")
    p.add_argument("--seq", default=None, help="with partial_sum: also evaluate the divergence lower bound for this sequence")
    p.add_argument("--l", type=_positive_int, default=None, help="divergence bound start index (default: 1)")
    p.add_argument("--bound-L", type=_positive_int, default=None, help="divergence bound end index (default: L)")
    p.add_argument("--alphas", type=_real_list, default=None,
                   help="approx mode: a_1,...,a_nu (expressions such as sqrt(2)-1 allowed; ';' separates when needed)")
    p.add_argument("--betas", type=_real_list, default=None, help="approx mode: b_1,...,b_nu (default: zeros); write --betas=-1/4,... when the list starts with a minus sign")
    p.add_argument("--delta", type=_real, default="0.05", help="approx mode: delta in (0, 1/2) (default: 0.05)")
    p.add_argument("--search-bound", type=_positive_int, default=1_000_000, help="approx mode: largest x (default: 1000000)")
    p.set_defaults(func=cmd_badpoint)

    p = sub.add_parser("sieve", parents=[common], help="square-free sieve, optional bitset dump/load",
                       description="Count square-free integers up to N and compare the density with 6/pi^2.")
    p.add_argument("--N", type=_positive_int, default=None, help="sieve bound")
    p.add_argument("--dump", metavar="PATH", help="write the bitset file")
    p.add_argument("--load", metavar="PATH", help="read a bitset file instead of sieving")
    p.add_argument("--list", type=_positive_int, default=None, metavar="M", help="include the square-free numbers up to M")
    p.set_defaults(func=cmd_sieve)
    return parser


# ---------------------------------------------------------------------------
# config files and manifests

def read_config(path) -> dict:
    """key=value lines; '#' starts a comment; keys use option names with - or _."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            if "=" not in s:
                raise ValueError(f"{path}:{i}: expected key=value")
            k, v = s.split("=", 1)
            out[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return out


def _scan_argv(argv, commands):
    """(command, config path) found without a full parse, so required options may come from the config."""
    command = next((a for a in argv if a in commands), None)
    config = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            config = argv[i + 1]
        elif a.startswith("--config="):
            config = a.split("=", 1)[1]
    return command, config


def _apply_config(parser, command, cfg: dict):
    subparser = parser._subparsers._group_actions[0].choices[command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in cfg.items():
        if key not in actions or key in ("help", "config", "func"):
            raise ValueError(f"config key {key!r} is not an option of {command!r}")
        act = actions[key]
        if isinstance(act, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = raw  # converted by argparse like a command-line string
        act.required = False
        for group in subparser._mutually_exclusive_groups:
            if act in group._group_actions:
                group.required = False
    subparser.set_defaults(**defaults)


def _precision_info(args):
    """Resolve --precision against HARMONIC_PRECISION; records where the value came from."""
    if args.precision is not None:
        source = "flag"
    elif os.environ.get("HARMONIC_PRECISION", "").strip():
        source = "environment"
    else:
        source = "default"
    digits = args.precision if args.precision is not None else pc.default_precision()
    return {"digits": digits, "source": source, "route": "double-double" if digits <= pc.DD_DIGITS else "mpmath"}


def _params(args) -> dict:
    return {k: to_plain(v) for k, v in sorted(vars(args).items())
            if k not in ("func", "command") and k not in _RUN_KEYS}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    t0 = time.perf_counter()
    try:
        choices = parser._subparsers._group_actions[0].choices
        command, config = _scan_argv(argv, choices)
        if config and command:
            _apply_config(parser, command, read_config(config))
        args = parser.parse_args(argv)
    except (ValueError, OSError) as exc:
        print(f"nharm: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        precision = _precision_info(args)
        args.precision = precision["digits"]
        doc, (header, rows), status = args.func(args)
    except (NharmError, argparse.ArgumentTypeError, ValueError, OSError) as exc:
        print(f"nharm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    body = {"command": args.command, "version": __version__, "params": _params(args)}
    body.update(doc)
    text = dumps(body) if args.out == "json" else csv_text(header, rows)
    data = text.encode("utf-8")
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    manifest = {
        "command_line": ["nharm"] + argv,
        "parameters": _params(args),
        "version": __version__,
        "precision": precision,
        "backend": _backend.NAME,
        "threads": args.threads,
        "format": args.out,
        "wall_time_s": time.perf_counter() - t0,
        "outputs": {args.output or "<stdout>": hashlib.sha256(data).hexdigest()},
        "exit_status": status,
    }
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(dumps(manifest))
    elif args.output:
        with open(args.output + ".manifest.json", "w", encoding="utf-8") as fh:
            fh.write(dumps(manifest))
    else:
        sys.stderr.write(json.dumps(to_plain(manifest), sort_keys=False) + "\n")
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
