"""chernint command line: verify | compute | table | degree."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

from . import __version__, degree
from .checks import REGISTRY, BadParams, UnknownCheck, run_check
from .exactnum import check_prime, todd_number
from .kchow import ModelVariety
from .parser import ExprError, compute
from .render import dumps, render_value, value_to_csv, value_to_json
from .series import r_series, todd_series

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(text: str, args):
    if not args.quiet and text:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _err(msg: str):
    sys.stderr.write(f"chernint: {msg}\n")


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# verify -------------------------------------------------------------------------

_VERIFY_PARAMS = ("p", "l", "variety", "max_dim", "samples", "N", "n_max", "i_max", "d_max", "records")


def cmd_verify(args) -> int:
    if args.list:
        lines = [f"{cid:18s} {spec.doc}" for cid, spec in REGISTRY.items()]
        _emit("\n".join(lines), args)
        return EXIT_OK
    if not args.check:
        _err("verify needs a check id (see --list)")
        return EXIT_USAGE
    raw = {k: getattr(args, k) for k in _VERIFY_PARAMS if getattr(args, k) is not None}
    try:
        report = run_check(args.check, raw, seed=args.seed)
    except UnknownCheck:
        _err(f"unknown check {args.check!r}; known: {', '.join(REGISTRY)}")
        return EXIT_USAGE
    except BadParams as exc:
        _err(f"bad parameters: {exc}")
        return EXIT_USAGE
    except (OSError, degree.RecordError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    data = report.to_json(timing=args.timing)
    if args.format == "json":
        _emit(dumps(degree.json_safe(data)), args)
    elif args.format == "csv":
        rows = [[report.check, report.status, report.cases, report.seed, "", "", ""]]
        rows += [[report.check, "failure", "", "", f["case"], f.get("lhs", ""), f.get("rhs", "")] for f in data["failures"]]
        _emit(_csv(rows, ["check", "status", "cases", "seed", "case", "lhs", "rhs"]), args)
    else:
        lines = [report.summary()]
        if args.timing:
            lines[0] += f" in {report.elapsed_ms:.0f} ms"
        for f in data["failures"][:50]:
            lines.append(f"  FAIL {f['case']}: {f.get('lhs', '')} vs {f.get('rhs', '')}")
        if len(report.failures) > 50:
            lines.append(f"  ... {len(report.failures) - 50} more")
        lines.extend(f"  note: {n}" for n in report.notes)
        _emit("\n".join(lines), args)
    return EXIT_OK if report.ok else EXIT_FAIL


# compute ------------------------------------------------------------------------


def cmd_compute(args) -> int:
    try:
        X = ModelVariety.parse(args.variety)
        if args.mod is not None:
            check_prime(args.mod)
        value = compute(args.expr, X, args.mod, args.context)
    except ExprError as exc:
        _err(str(exc))
        caret = exc.caret()
        if caret:
            sys.stderr.write(caret + "\n")
        return EXIT_USAGE
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    if args.format == "json":
        _emit(dumps(value_to_json(value)), args)
    elif args.format == "csv":
        _emit(value_to_csv(value), args)
    else:
        _emit(render_value(value), args)
    return EXIT_OK


# table --------------------------------------------------------------------------


def table_rows(which: str, max_deg: int, p: int | None = None):
    if max_deg < 0:
        raise ValueError("bound must be >= 0")
    if which == "todd-numbers":
        return ["d", "tau"], [[d, todd_number(d)] for d in range(max_deg + 1)]
    if which == "todd-series":
        s = todd_series(max_deg)
        return ["degree", "coefficient"], [[d, s[d]] for d in range(max_deg + 1)]
    if p is None:
        raise ValueError("r-series needs --p")
    check_prime(p)
    s = r_series(p, max_deg, mod=None)
    return ["degree", "coefficient"], [[d, s[d]] for d in range(max_deg + 1) if s[d]]


def cmd_table(args) -> int:
    bound = args.max if args.max is not None else args.max_deg
    if bound is None:
        bound = 10
    try:
        header, rows = table_rows(args.which, bound, args.p)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE
    if args.format == "json":
        data = [{h: (str(v) if isinstance(v, Fraction) else v) for h, v in zip(header, row)} for row in rows]
        _emit(dumps(degree.json_safe(data)), args)
    elif args.format == "csv":
        _emit(_csv([[str(v) for v in row] for row in rows], header), args)
    else:
        width = max(len(str(r[0])) for r in rows + [header])
        lines = [f"{header[0]:>{width}}  {header[1]}"]
        lines += [f"{str(r[0]):>{width}}  {r[1]}" for r in rows]
        _emit("\n".join(lines), args)
    return EXIT_OK


# degree -------------------------------------------------------------------------


def cmd_degree(args) -> int:
    path = degree.sample_records_path() if args.sample else args.records
    if path is None:
        _err("degree needs a records file or --sample")
        return EXIT_USAGE
    try:
        check_prime(args.p)
        varieties, morphisms = degree.load_records(path)
        verdicts = degree.evaluate(varieties, morphisms, args.p)
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    if args.format == "json":
        _emit(dumps(degree.json_safe(verdicts)), args)
    elif args.format == "csv":
        rows = [[v["check"], v["subject"], v["p"], v["verdict"]] for v in verdicts]
        _emit(_csv(rows, ["check", "subject", "p", "verdict"]), args)
    else:
        lines = []
        for v in verdicts:
            line = f"{v['subject']}: {v['verdict']}"
            if "t_p" in v:
                tp = v["t_p"]
                line += f"  (t_p = {tp['residue']} mod {tp['modulus']}, i = {tp['i']})"
            lines.append(line)
            for sub in v.get("checks", []):
                lines.append(f"  {sub['check']}: {sub['verdict']}")
        _emit("\n".join(lines), args)
    return EXIT_FAIL if any(degree.is_failure(v) for v in verdicts) else EXIT_OK


# parser -------------------------------------------------------------------------


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--format", choices=("text", "json", "csv"), default=d("text"))
    g.add_argument("--seed", type=int, default=d(0))
    g.add_argument("--quiet", action="store_true", default=d(False))
    return g


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="chernint", description=__doc__, parents=[_global_flags(False)])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    flags = _global_flags(True)

    v = sub.add_parser("verify", help="run a named check", parents=[flags])
    v.add_argument("check", nargs="?")
    v.add_argument("--list", action="store_true", help="list check ids")
    v.add_argument("--timing", action="store_true", help="report elapsed time")
    v.add_argument("--p", help="prime or comma-separated primes")
    v.add_argument("--l", help="Adams degree(s)")
    v.add_argument("--variety", help="comma-separated varieties, e.g. P2,P2xP1")
    v.add_argument("--max-dim", dest="max_dim")
    v.add_argument("--samples")
    v.add_argument("--N")
    v.add_argument("--n-max", dest="n_max")
    v.add_argument("--i-max", dest="i_max")
    v.add_argument("--d-max", dest="d_max")
    v.add_argument("--records")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compute", help="evaluate an expression on a model variety", parents=[flags])
    c.add_argument("--variety", required=True)
    c.add_argument("--expr", required=True)
    c.add_argument("--mod", type=int)
    c.add_argument("--context", choices=("chow", "k"))
    c.set_defaults(func=cmd_compute)

    t = sub.add_parser("table", help="print a table of numbers or series coefficients", parents=[flags])
    t.add_argument("which", choices=("todd-numbers", "todd-series", "r-series"))
    t.add_argument("--max", type=int)
    t.add_argument("--max-deg", dest="max_deg", type=int)
    t.add_argument("--p", type=int)
    t.set_defaults(func=cmd_table)

    d = sub.add_parser("degree", help="check variety records against index and degree constraints", parents=[flags])
    d.add_argument("records", nargs="?")
    d.add_argument("--p", type=int, required=True)
    d.add_argument("--sample", action="store_true", help="use the bundled sample records")
    d.set_defaults(func=cmd_degree)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    if not getattr(args, "func", None):
        ap.print_help(sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
