"""Command-line interface.

Subcommands: ``measures``, ``canonical``, ``sweep``, ``estimate``, ``screen``.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

Probabilities and counts are given row-major as ``p00,p01,p10,p11``.  For
Yule's smallpox table (rows vaccinated/unvaccinated, columns recover/die)::

    twobytwo measures --probs 0.840,0.043,0.059,0.058
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bayes, ingest, measures, mgps, tables
from .exceptions import TableError
from .measures import NA
from .output import render

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text, count=None):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} values, got {len(vals)}")
    return vals


def _four_floats(text):
    return _floats(text, 4)


def _four_counts(text):
    vals = _floats(text, 4)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"counts must be integers, got {text!r}")
    return [int(v) for v in vals]


def _log_base(text):
    if text == "e":
        return "e"
    if text in ("2", "10"):
        return int(text)
    raise argparse.ArgumentTypeError(f"log base must be 2, e or 10, got {text!r}")


def _add_table_input(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--probs", type=_four_floats, help="p00,p01,p10,p11")
    group.add_argument("--counts", type=_four_counts, help="n00,n01,n10,n11")
    p.add_argument("--cc", type=float, default=None, help="continuity correction added to counts")


def _add_output(p, log_base=True):
    if log_base:
        p.add_argument("--log-base", type=_log_base, default=2)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--digits", type=int, default=6, help="significant digits")


def _table_from_args(args):
    if args.probs is not None:
        if args.cc is not None:
            raise UsageError("--cc applies to --counts only")
        return tables.make_prob_table(*args.probs)
    counts = tables.CountTable2x2(*args.counts)
    if args.cc is not None:
        return tables.make_prob_table(*bayes.continuity_correct(counts, args.cc))
    return bayes.mle_table(counts)


def report_record(report):
    rec = report.as_dict()
    rec["log_base"] = str(report.log_base)
    return rec


def _table_record(P):
    return {"p00": P.p00, "p01": P.p01, "p10": P.p10, "p11": P.p11}


def cmd_measures(args):
    P = _table_from_args(args)
    rec = _table_record(P) | report_record(measures.full_report(P, args.log_base))
    return render([rec], args.format, "measures", args.digits)


def cmd_canonical(args):
    P = tables.canonicalize(_table_from_args(args))
    rec = _table_record(P) | report_record(measures.full_report(P, args.log_base))
    return render([rec], args.format, "canonical", args.digits)


def sweep_records(lambda_min, lambda_max, points, log_base=2):
    grid = np.geomspace(lambda_min, lambda_max, points)
    return [
        {
            "lambda": float(lam),
            "Y": measures.yule_y(float(lam)),
            "i_lambda": measures.i_lambda(float(lam), log_base),
            "I_lambda": measures.big_i_lambda(float(lam), log_base),
        }
        for lam in grid
    ]


def cmd_sweep(args):
    if not 0 < args.lambda_min <= args.lambda_max or not math.isfinite(args.lambda_max):
        raise UsageError("need 0 < --lambda-min <= --lambda-max < inf")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    recs = sweep_records(args.lambda_min, args.lambda_max, args.points, args.log_base)
    return render(recs, args.format, "sweep", args.digits)


def _dirichlet_prior(text):
    if text == "uniform":
        return bayes.DirichletPrior.uniform()
    if text == "jeffreys":
        return bayes.DirichletPrior.jeffreys()
    vals = _floats(text, 4)
    if min(vals) <= 0:
        raise argparse.ArgumentTypeError("Dirichlet pseudo-counts must be positive")
    return bayes.DirichletPrior(*vals)


def _level(text):
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"level must lie in (0, 1), got {text}")
    return value


def cmd_estimate(args):
    counts = tables.CountTable2x2(*args.counts)
    est = bayes.posterior_measure_interval(
        counts,
        prior=args.prior,
        measure=args.measure,
        level=args.level,
        draws=args.draws,
        seed=args.seed,
        log_base=args.log_base,
    )
    rec = {
        "measure": est.measure,
        "point": est.point,
        "lower": est.lower,
        "upper": est.upper,
        "level": est.level,
        "draws": est.draws,
        "seed": est.seed,
        "excluded": est.excluded,
    }
    return render([rec], args.format, "estimate", args.digits)


def _gamma_prior(text):
    vals = _floats(text, 5)
    try:
        return mgps.GammaMixturePrior(*vals)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _na_or(value, reason):
    return NA(reason) if value is None else value


def screen_record(row):
    shrink = row.shrinkage
    report = row.report
    return {
        "pair": row.pair,
        "n11": row.table.n11,
        "E11": _na_or(row.expected, "degenerate_margin"),
        "raw_log2_rrr": NA("degenerate_margin") if shrink is None else _na_or(shrink.raw_log, "zero_joint"),
        "eb_log2": NA("degenerate_margin") if shrink is None else shrink.eb_log,
        "prr": NA("empty_table") if report is None else report.prr,
        "yule_y": NA("empty_table") if report is None else report.yule_y,
        "pmi_max": NA("empty_table") if report is None else report.pmi,
        "flags": ";".join(row.flags),
    }


def _load_dataset(args):
    if args.tables:
        return ingest.load_tables_csv(args.tables)
    records = ingest.load_transactions(args.transactions)
    return ingest.build_pair_dataset(records, args.min_n11).labelled()


def cmd_screen(args):
    entries = _load_dataset(args)
    if args.export_tables:
        ingest.write_tables_csv(args.export_tables, entries)
    prior = args.prior or mgps.DEFAULT_PRIOR
    if args.fit:
        pairs = []
        for _, t in entries:
            try:
                pairs.append((t.n11, mgps.expected_count(t)))
            except TableError:
                continue
        prior, diag = mgps.fit_hyperparameters(pairs, restarts=args.restarts, seed=args.seed)
        if not diag.converged:
            raise NumericalFailure(
                f"hyperparameter fit did not converge after {diag.iterations} iterations"
            )
    rows = mgps.screen(entries, prior, log_base=2)
    if args.top is not None:
        rows = rows[: args.top]
    return render([screen_record(r) for r in rows], args.format, "screen", args.digits)


def build_parser():
    parser = _Parser(prog="twobytwo", description="Association analysis for 2x2 tables.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measures", help="all association measures for one table")
    _add_table_input(p)
    _add_output(p)
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("canonical", help="canonical (50/50 marginals) table and its measures")
    _add_table_input(p)
    _add_output(p)
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("sweep", help="Y, i_lambda and I_lambda on a log-spaced odds-ratio grid")
    p.add_argument("--lambda-min", type=float, default=1.0)
    p.add_argument("--lambda-max", type=float, default=1e6)
    p.add_argument("--points", type=int, default=61)
    _add_output(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("estimate", help="Dirichlet posterior interval for a measure")
    p.add_argument("--counts", type=_four_counts, required=True, help="n00,n01,n10,n11")
    p.add_argument("--prior", type=_dirichlet_prior, default=bayes.DirichletPrior.uniform(),
                   help="uniform, jeffreys, or a00,a01,a10,a11")
    p.add_argument("--measure", choices=bayes.MEASURES, default="pmi_max_cell")
    p.add_argument("--level", type=_level, default=0.95)
    p.add_argument("--draws", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("screen", help="rank pairs by MGPS shrunk log2 reporting ratio")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--tables", help="CSV with header id,n11,n10,n01,n00")
    src.add_argument("--transactions", help="tab-separated id, a-items, b-items")
    pri = p.add_mutually_exclusive_group()
    pri.add_argument("--fit", action="store_true", help="fit the mixture prior to the data")
    pri.add_argument("--prior", type=_gamma_prior, help="alpha1,beta1,alpha2,beta2,w")
    p.add_argument("--min-n11", type=int, default=1)
    p.add_argument("--top", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--export-tables", help="also write the pair tables as CSV")
    _add_output(p, log_base=False)
    p.set_defaults(func=cmd_screen)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        text = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"twobytwo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"twobytwo: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (TableError, OSError) as exc:
        print(f"twobytwo: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
