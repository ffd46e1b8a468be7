"""Command-line front end.

    gaussrank analyze SPEC.json [--seed S] [--samples K] ...
    gaussrank classify SPEC.json ...
    gaussrank suite [--report csv]

Exit codes: 0 success, 1 usage or spec error, 2 geometric failure (ambiguous
or inconsistent evidence, failed suite rows).
"""

import argparse
import csv
import io
import json
import sys
import time

from . import __version__
from .classify import classify_threefold, invariant_report
from .errors import GeometryError, MixedEvidence, SpecError
from .numeric import TOL_RANK
from .specfile import load_spec
from .suite import run_suite

EXIT_OK, EXIT_USAGE, EXIT_GEOMETRY = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return val


def _int_at_least(low):
    def parse(text):
        try:
            val = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if val < low:
            raise argparse.ArgumentTypeError(f"must be >= {low}")
        return val
    return parse


def _seed(text):
    try:
        val = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= val < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits (unsigned)")
    return val


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="master seed (default 0)")
    common.add_argument("--samples", type=_int_at_least(3), default=20,
                        help="generic sample points for the Gauss rank (>= 3, default 20)")
    common.add_argument("--tol-rank", type=_positive_float, default=TOL_RANK,
                        help="relative singular-value threshold (default 1e-7)")
    common.add_argument("--cluster-tol", type=_positive_float, default=1e-4,
                        help="focal root clustering tolerance (default 1e-4)")
    common.add_argument("--retries", type=_int_at_least(1), default=5,
                        help="redraws per degenerate sample (default 5)")
    common.add_argument("--fibers", type=_int_at_least(1), default=10,
                        help="fibers voted on in focal analysis (default 10)")
    common.add_argument("--report", choices=("json", "csv"), default=None,
                        help="output format (default json; suite defaults to a text table)")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (output is then not reproducible)")

    p = _Parser(prog="gaussrank", description="Invariants of varieties with degenerate Gauss maps.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    a = sub.add_parser("analyze", parents=[common], help="full invariant report for a spec file")
    a.add_argument("spec")
    c = sub.add_parser("classify", parents=[common], help="classify a threefold in P4 with f = 1")
    c.add_argument("spec")
    sub.add_parser("suite", parents=[common], help="run the curated construction suite")
    return p


def _tolerances(args):
    return {"tol_rank": args.tol_rank, "cluster_tol": args.cluster_tol,
            "retries": args.retries, "samples": args.samples}


def _emit_json(obj, out):
    out.write(json.dumps(obj, indent=2) + "\n")


def _emit_csv(rows, out):
    if not rows:
        return
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v
                         for k, v in row.items()})
    out.write(buf.getvalue())


def _flat(report):
    return {"name": report["name"], "n": report["n"], "N": report["N"], "r": report["r"],
            "f": report["f"], "pattern": [m for _, m in report["focus"]["pattern"]],
            "sweeps": report["focus"]["sweeps"], "class": report["class"],
            "seed": report["seed"]}


def cmd_analyze(args, out):
    X = load_spec(args.spec)
    report = invariant_report(X, seed=args.seed, samples=args.samples, tol=args.tol_rank,
                              cluster_tol=args.cluster_tol, retries=args.retries,
                              fibers=args.fibers, timings=args.timings)
    if args.report == "csv":
        _emit_csv([_flat(report)], out)
    else:
        _emit_json(report, out)
    if "errors" in report:
        for stage, msg in report["errors"].items():
            print(f"gaussrank: {stage}: {msg}", file=sys.stderr)
        return EXIT_GEOMETRY
    return EXIT_OK


def cmd_classify(args, out):
    X = load_spec(args.spec)
    start = time.perf_counter()
    result = classify_threefold(X, seed=args.seed, samples=args.samples, fibers=args.fibers,
                                tol=args.tol_rank, cluster_tol=args.cluster_tol,
                                retries=args.retries)
    a = result.analysis
    focus = result.focus
    report = {"name": X.name, "n": X.n, "N": X.N, "r": a.r, "f": a.f,
              "focus": {"pattern": [[[round(t.real, 9), round(t.imag, 9)], m]
                                    for t, m in focus.roots] if focus else [],
                        "sweeps": list(focus.sweeps) if focus else []},
              "class": result.label, "votes": result.tally, "seed": args.seed,
              "tolerances": _tolerances(args), "timings": {}}
    if args.timings:
        report["timings"] = {"total": round(time.perf_counter() - start, 4)}
    if args.report == "csv":
        _emit_csv([_flat(report)], out)
    else:
        _emit_json(report, out)
    return EXIT_OK


def cmd_suite(args, out):
    rows = run_suite(seed=args.seed, samples=args.samples, tol=args.tol_rank,
                     cluster_tol=args.cluster_tol, retries=args.retries, fibers=args.fibers)
    if args.report == "json":
        _emit_json(rows, out)
    elif args.report == "csv":
        _emit_csv(rows, out)
    else:
        cols = ("name", "expected", "r", "f", "pattern", "sweeps", "class", "pass")
        table = [[str(r[c]) if not isinstance(r[c], list) else "/".join(map(str, r[c])) or "-"
                  for c in cols] for r in rows]
        widths = [max(len(c), *(len(t[i]) for t in table)) for i, c in enumerate(cols)]
        out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
        for t in table:
            out.write("  ".join(v.ljust(w) for v, w in zip(t, widths)).rstrip() + "\n")
        failed = sum(not r["pass"] for r in rows)
        out.write(f"{len(rows) - failed}/{len(rows)} rows pass\n")
    for r in rows:
        if not r["pass"]:
            print(f"gaussrank: {r['name']} failed: {r['notes']}", file=sys.stderr)
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_GEOMETRY


COMMANDS = {"analyze": cmd_analyze, "classify": cmd_classify, "suite": cmd_suite}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except SpecError as exc:
        print(f"gaussrank: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MixedEvidence as exc:
        print(f"gaussrank: {exc}; tally {json.dumps(exc.tally, sort_keys=True)}", file=sys.stderr)
        return EXIT_GEOMETRY
    except GeometryError as exc:
        print(f"gaussrank: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


def main_entry():
    sys.exit(main())
