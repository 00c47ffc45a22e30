"""``reslab`` command line.

Exit codes: 0 success, 1 a verification failed, 2 parse or usage error,
3 unknown vertex, 4 solver iteration limit (value still printed),
5 dimension mismatch, 6 Orlicz size cap exceeded, 7 checker precondition
violated.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import os
import sys
import warnings
from dataclasses import replace

from . import verify as V
from .errors import (
    DimensionMismatch, ParseError, PreconditionError, ReslabError, SolverWarning, TooLarge,
    UnknownVertex,
)
from .io import dumps_json, encode_ext, format_scalar, load_network, load_vector, write_atomic
from .resistance import (
    conjugate, elementary_resistance, luxemburg, orlicz, approximating_form, resistance_matrix,
    resistance_to_infinity, t_resistance, t_resistance_to_infinity,
)
from .solvers import DEFAULT_CONFIG

EXIT_FAILED, EXIT_PARSE, EXIT_VERTEX, EXIT_MAXITERS = 1, 2, 3, 4
EXIT_DIMENSION, EXIT_TOO_LARGE, EXIT_PRECONDITION = 5, 6, 7

CHECKERS = ("contraction", "triangle", "homogeneous", "fundamental", "delta2",
            "p-contraction", "sup-approx", "additivity-identify", "additivity-resistor")


class _UsageError(ReslabError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _pair(text: str) -> tuple[str, str]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected A,B, got {text!r}")
    return parts[0], parts[1]


def _config(args):
    cfg = DEFAULT_CONFIG
    if args.tol is not None:
        cfg = replace(cfg, tol_rel=args.tol)
    env = os.environ.get("RESLAB_MAX_ITERS")
    if env:
        try:
            cfg = replace(cfg, max_iters=int(env))
        except ValueError:
            raise _UsageError(f"RESLAB_MAX_ITERS must be an integer, got {env!r}") from None
    return cfg


def _single_t(args) -> float:
    if not args.t or len(args.t) != 1:
        raise _UsageError("this command needs exactly one --t value")
    return args.t[0]


def _emit(args, text: str):
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _value_text(args, v) -> str:
    if args.format != "json":
        return format_scalar(v) + "\n"
    return dumps_json(encode_ext(v))


def _matrix_text(args, M) -> str:
    if args.format == "json":
        return dumps_json({"kind": M.kind, "t": M.t, "labels": list(M.labels),
                           "entries": [[float(v) for v in row] for row in M.entries]})
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + list(M.labels))
    for label, row in zip(M.labels, M.entries):
        w.writerow([label] + ["0" if v == 0 else format_scalar(v) for v in row])
    return buf.getvalue()


def cmd_resistance(args) -> int:
    form = load_network(args.file)
    cfg = _config(args)
    if args.kind == "t":
        t = _single_t(args)
    if args.pair is not None:
        x, y = args.pair
        if args.kind == "elementary":
            v = (resistance_to_infinity(form, x, cfg) if y == "inf"
                 else elementary_resistance(form, x, y, cfg))
        else:
            v = (t_resistance_to_infinity(form, x, t, cfg) if y == "inf"
                 else t_resistance(form, x, y, t, cfg))
        _emit(args, _value_text(args, v))
    else:
        M = resistance_matrix(form, args.kind, t if args.kind == "t" else None, cfg)
        _emit(args, _matrix_text(args, M))
    return 0


def cmd_functional(args) -> int:
    form = load_network(args.file)
    cfg = _config(args)
    if args.vector is None:
        raise _UsageError(f"{args.op} needs a vector file")
    f = load_vector(args.vector, form)
    if args.op == "eval":
        v = form.evaluate(f)
    elif args.op == "luxemburg":
        v = luxemburg(form, f, cfg)
    elif args.op == "orlicz":
        v = orlicz(form, f, cfg)
    elif args.op == "conjugate":
        v = conjugate(form, f, cfg)
    else:
        if args.alpha is None:
            raise _UsageError("approx needs --alpha")
        K = args.K.split(",") if args.K else form.vertices
        v = approximating_form(form, args.alpha, K, args.p_pen, f, cfg)
    _emit(args, _value_text(args, v))
    return 0


def _run_checker(name, forms, args, cfg):
    seed = args.seed
    tol = {} if args.check_tol is None else {"tol": args.check_tol}
    t_values = args.t or [0.25, 1.0, 4.0]
    if name.startswith("additivity"):
        if len(forms) != 2 or args.glue is None or args.pair is None:
            raise _UsageError(f"{name} needs two files, --glue XI1,XI2 and --pair X1,X2")
        (xi1, xi2), (x1, x2) = args.glue, args.pair
        out = []
        for t in t_values:
            if name == "additivity-identify":
                out.append(V.check_additivity_identify(forms[0], xi1, forms[1], xi2,
                                                       x1, x2, t, cfg, **tol))
            else:
                if args.eps is None:
                    raise _UsageError("additivity-resistor needs --eps")
                out.append(V.check_additivity_resistor(forms[0], xi1, forms[1], xi2,
                                                       x1, x2, t, args.eps, cfg, **tol))
        return out
    out = []
    for form in forms:
        if name == "contraction":
            out.append(V.check_contraction_compatibility(form, seed=seed, **tol))
        elif name == "triangle":
            out += [V.check_triangle(form, t, cfg=cfg, **tol) for t in t_values]
        elif name == "homogeneous":
            out.append(V.check_homogeneous_identity(form, t_list=t_values, cfg=cfg, **tol))
        elif name == "fundamental":
            out.append(V.check_fundamental_inequalities(form, 20, seed, cfg, **tol))
        elif name == "delta2":
            out.append(V.estimate_delta2_nabla2(form, seed=seed))
        elif name == "p-contraction":
            out.append(V.check_p_contraction_map(form, seed=seed, **tol))
        elif name == "sup-approx":
            out.append(V.check_sup_approximation(form, 10, seed, cfg=cfg, **tol))
    return out


def cmd_verify(args) -> int:
    forms = [load_network(p) for p in args.files]
    cfg = _config(args)
    reports = []
    for name in args.check:
        reports += _run_checker(name, forms, args, cfg)
    _emit(args, dumps_json([r.to_dict() for r in reports]))
    failed = [r for r in reports if isinstance(r, V.VerifyReport) and not r.passed]
    return EXIT_FAILED if failed else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--t", type=_floats, default=None,
                        help="t value (comma-separated list for verify)")
    common.add_argument("--pair", type=_pair, help="vertex pair A,B (B may be 'inf')")
    common.add_argument("--alpha", type=float)
    common.add_argument("--K", help="comma-separated penalty vertices (default: all)")
    common.add_argument("--p-pen", type=float, default=2.0, help="penalty exponent")
    common.add_argument("--eps", type=float)
    common.add_argument("--glue", type=_pair, help="gluing vertices XI1,XI2")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, help="solver relative tolerance")
    common.add_argument("--check-tol", type=float, help="checker tolerance override")
    common.add_argument("--format", choices=("json", "csv"),
                        help="output format (default: csv, json for verify)")
    common.add_argument("--out", metavar="PATH")

    parser = argparse.ArgumentParser(prog="reslab",
                                     description="Resistances of nonlinear network energies.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("resistance", parents=[common], help="R or R_t for a pair or matrix")
    p.add_argument("file")
    p.add_argument("--kind", choices=("elementary", "t"), default="elementary")
    p.set_defaults(func=cmd_resistance)
    p = sub.add_parser("functional", parents=[common], help="energy, gauges and conjugate")
    p.add_argument("file")
    p.add_argument("op", choices=("eval", "luxemburg", "orlicz", "conjugate", "approx"))
    p.add_argument("vector", nargs="?")
    p.set_defaults(func=cmd_functional)
    p = sub.add_parser("verify", parents=[common], help="run property checkers")
    p.add_argument("files", nargs="+")
    p.add_argument("--check", action="append", choices=CHECKERS, required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", SolverWarning)
            code = args.func(args)
        if any(issubclass(w.category, SolverWarning) for w in caught):
            print("warning: solver stopped at its iteration limit (MaxIters)", file=sys.stderr)
            return EXIT_MAXITERS if code == 0 else code
        return code
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnknownVertex as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERTEX
    except DimensionMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ReslabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
