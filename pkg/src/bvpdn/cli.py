"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 quadrature accuracy warning escalated by ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds, problems, solver, verify
from .quadrature import QuadConfig

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ACCURACY = 0, 1, 2, 3
T_SAMPLES = (0.0, 0.25, 0.5, 0.75, 1.0)


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit code 2."""


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v >= 0.0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a finite nonnegative number, got {text}")
    return v


def _positive(text: str) -> float:
    v = _nonneg(text)
    if v == 0.0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _text_table(pairs) -> str:
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k:<{width}}  {_fmt(v) if isinstance(v, float) else v}\n" for k, v in pairs)


def _params(args) -> bounds.BoundParams:
    return bounds.BoundParams(args.l1, args.l2, args.l3, args.c_abs)


def _config(args) -> QuadConfig:
    if getattr(args, "tol", None) is None or args.command not in ("eval", "verify"):
        return QuadConfig()
    return QuadConfig(adaptive_tol=args.tol)


def cmd_bounds(args) -> int:
    p = _params(args)
    try:
        L4, L5 = bounds.l4(p), bounds.l5(p)
    except ValueError as exc:
        raise UsageError(str(exc))
    try:
        res = bounds.landau_radius(p, args.tol or 1e-12)
        r0, R0, note = res.r0, res.R0_lower, None
    except ValueError as exc:
        r0, R0, note = None, None, str(exc)
    data = {
        "params": p.as_dict(),
        "t": list(T_SAMPLES),
        "N1": [bounds.n1(t) for t in T_SAMPLES],
        "N2": [bounds.n2(t) for t in T_SAMPLES],
        "N3": [bounds.n3(t) for t in T_SAMPLES],
        "N4": [bounds.n4(t) for t in T_SAMPLES],
        "M1": bounds.m1(),
        "M2": bounds.m2(),
        "L4": L4,
        "L5": L5,
        "r0": r0,
        "R0_lower": R0,
    }
    if note:
        data["landau_note"] = note
    if args.format == "json":
        _emit(_json(data), args.out)
    elif args.format == "text":
        rows = [(k, v) for k, v in data.items() if isinstance(v, float) or k == "landau_note"]
        for name in ("N1", "N2", "N3", "N4"):
            rows += [(f"{name}({t:g})", v) for t, v in zip(T_SAMPLES, data[name])]
        _emit(_text_table(rows), args.out)
    else:
        raise UsageError("bounds supports --format json or text")
    return EXIT_OK


def _load(args):
    if not args.problem:
        raise UsageError("--problem is required")
    try:
        return problems.load_problem(args.problem)
    except OSError as exc:
        raise UsageError(f"cannot read problem file: {exc}")
    except ValueError as exc:
        raise UsageError(f"invalid problem file: {exc}")


def cmd_eval(args) -> int:
    prob = _load(args)
    try:
        zs = solver.polar_eval_grid(args.grid, args.grid, args.rmax)
    except ValueError as exc:
        raise UsageError(str(exc))
    samples = solver.evaluate_many(prob, zs, _config(args))
    warnings = sorted({s.metadata["g2"]["warning"] for s in samples if s.metadata.get("g2", {}).get("warning")})
    fmt = args.format or "csv"
    if fmt == "csv":
        text = solver.write_csv(samples)
    elif fmt == "json":
        rows = [
            dict(zip(solver.CSV_COLUMNS, (s.z.real, s.z.imag, s.w.real, s.w.imag, abs(s.w), s.wz.real, s.wz.imag, s.wzbar.real, s.wzbar.imag)))
            for s in samples
        ]
        text = _json({"grid": [args.grid, args.grid, args.rmax], "warnings": warnings, "rows": rows})
    else:
        raise UsageError("eval supports --format csv or json")
    _emit(text, args.out)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_ACCURACY if warnings and args.strict else EXIT_OK


def cmd_verify(args) -> int:
    try:
        report = verify.run_suite(args.suite, args.seed, _config(args))
    except ValueError as exc:
        raise UsageError(str(exc))
    fmt = args.format or "text"
    if fmt == "json":
        _emit(report.dumps(), args.out)
    elif fmt == "text":
        _emit(report.to_text(), args.out)
    else:
        raise UsageError("verify supports --format json or text")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_landau(args) -> int:
    tol = args.tol or 1e-12
    given = any(v is not None for v in (args.l1, args.l2, args.l3, args.c_abs))
    if args.problem:
        prob = _load(args)
        if given:
            p = bounds.BoundParams(args.l1 or 0.0, args.l2 or 0.0, args.l3 or 0.0, args.c_abs or 0.0)
        else:
            p = verify.DataNorms.of(prob).params()
        try:
            rec = verify.check_landau(prob, p, QuadConfig(), tol=tol)
        except ValueError as exc:
            raise UsageError(str(exc))
        data = {"passed": rec.passed, "worst_slack": rec.worst_slack, **rec.metadata}
        status = EXIT_OK if rec.passed else EXIT_FAIL
    else:
        p = bounds.BoundParams(args.l1 or 0.0, args.l2 or 0.0, args.l3 or 0.0, args.c_abs or 0.0)
        try:
            data = {"params": p.as_dict(), **bounds.landau_radius(p, tol).as_dict()}
        except ValueError as exc:
            raise UsageError(str(exc))
        status = EXIT_OK
    fmt = args.format or "text"
    if fmt == "json":
        _emit(_json(verify._jsonable(data)), args.out)
    elif fmt == "text":
        rows = [(k, v) for k, v in data.items() if isinstance(v, (float, int, bool))]
        if "landau" in data:
            rows = [(k, v) for k, v in data["landau"].items() if isinstance(v, float)] + rows
        _emit(_text_table(rows), args.out)
    else:
        raise UsageError("landau supports --format json or text")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bvpdn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats, default):
        p.add_argument("--format", choices=formats, default=default, help=f"output format (default {default})")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--tol", type=_positive, help="tolerance override")

    b = sub.add_parser("bounds", help="constants, L4, L5, Landau radius and R0 lower bound")
    for flag in ("--l1", "--l2", "--l3", "--c-abs"):
        b.add_argument(flag, type=_nonneg, default=0.0, help="data majorant (default 0)")
    common(b, ("json", "text"), "text")

    e = sub.add_parser("eval", help="evaluate w and its derivatives on a polar grid")
    e.add_argument("--problem", required=True, help="problem JSON file")
    e.add_argument("--grid", type=int, default=20, help="N radii times N angles (default 20)")
    e.add_argument("--rmax", type=float, default=0.9, help="largest radius, in (0, 1) (default 0.9)")
    e.add_argument("--strict", action="store_true", help="exit 3 on quadrature accuracy warnings")
    common(e, ("csv", "json"), "csv")

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", default="all", choices=verify.SUITES + ("all",), help="suite (default all)")
    v.add_argument("--seed", type=int, default=7, help="random seed (default 7)")
    common(v, ("json", "text"), "text")

    la = sub.add_parser("landau", help="Landau radius, optionally checked on a normalized problem")
    la.add_argument("--problem", help="problem JSON file with w(0) = 0 and J_w(0) = 1")
    for flag in ("--l1", "--l2", "--l3", "--c-abs"):
        la.add_argument(flag, type=_nonneg, default=None, help="data majorant (default: sampled from the problem, else 0)")
    common(la, ("json", "text"), "text")
    return parser


COMMANDS = {"bounds": cmd_bounds, "eval": cmd_eval, "verify": cmd_verify, "landau": cmd_landau}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "grid", 1) <= 0:
        print("error: --grid must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
