"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 data error,
4 degenerate statistic on user data.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import harness
from .dataio import load_matrix, load_results
from .errors import (
    ConfigError,
    DegenerateVarianceError,
    DimensionError,
    EmptyIndexSetError,
    MdepError,
    ParseError,
)
from .meantests import TwoSampleInput, test_one_sample, test_two_sample

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_DEGENERATE = 0, 2, 3, 4


def _print_result(res, as_json):
    if as_json:
        payload = {
            "numerator": res.numerator,
            "variance": res.variance,
            "statistic": res.statistic,
            "p_value": res.p_value,
            "reject": res.reject,
            "alpha": res.alpha,
            "diagnostics": res.diagnostics,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"statistic  {res.statistic:.6f}")
        print(f"p-value    {res.p_value:.6g}")
        print(f"numerator  {res.numerator:.6g}")
        print(f"variance   {res.variance:.6g}")
        print(f"decision   {'reject' if res.reject else 'do not reject'} H0 at alpha={res.alpha}")


def cmd_test(args):
    if args.sample == "one-sample":
        X = load_matrix(args.input)
        res = test_one_sample(X, args.m_order, args.alpha)
    else:
        X1 = load_matrix(args.input1)
        X2 = load_matrix(args.input2)
        res = test_two_sample(TwoSampleInput(X1.values, X2.values, args.m_order), args.alpha)
    _print_result(res, args.json)
    return EXIT_OK


def cmd_simulate(args):
    config = harness.load_config(args.config)
    results_path = args.out or config.results_path
    summary_path = args.summary or config.summary_path
    if summary_path is None and results_path is not None:
        stem = results_path[:-4] if results_path.endswith(".csv") else results_path
        summary_path = stem + "_summary.csv"
    config = harness.ExperimentConfig(config.scenarios, config.seed, results_path, summary_path)
    summary = harness.run_experiment(config, threads=args.threads)
    for r in summary.rows:
        flag = "  [degenerate variance in >0.1% of replicates]" if r.flagged else ""
        print(f"{r.scenario:<32} {r.statistic:<6} rate={r.rate:.4f} se={r.se:.4f} "
              f"valid={r.valid} failed={r.failed}{flag}")
    print("replicates with a non-positive variance estimate are excluded from the rate")
    logging.getLogger(__name__).info("wall time %.1fs", summary.wall_time)
    return EXIT_OK


def cmd_reproduce(args):
    lines = harness.reproduce_table(args.table, args.reps, args.seed, args.out, threads=args.threads)
    for line in lines:
        print(f"{line['scenario']:<28} {line['statistic']:<6} observed={line['rate']:.4f} "
              f"published={line['paper']:.4f} |dev|={line['abs_dev']:.4f} se={line['se']:.4f}")
    return EXIT_OK


def cmd_qq(args):
    records = load_results(args.pvalues)
    pv = [r.p_value for r in records
          if (args.scenario is None or r.scenario == args.scenario)
          and (args.statistic is None or r.statistic == args.statistic)]
    harness.qq_export(pv, args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mdeptest", description="Mean-vector tests for high-dimensional M-dependent data."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="test the mean of observed data")
    test_sub = p_test.add_subparsers(dest="sample", required=True)
    one = test_sub.add_parser("one-sample", help="H0: mu = 0")
    one.add_argument("--input", required=True, help="CSV, one row per time point")
    two = test_sub.add_parser("two-sample", help="H0: mu1 = mu2")
    two.add_argument("--input1", required=True)
    two.add_argument("--input2", required=True)
    for p in (one, two):
        p.add_argument("--m-order", type=int, required=True, help="dependence order M")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--json", action="store_true", help="print the result as JSON")
        p.set_defaults(func=cmd_test)

    sim = sub.add_parser("simulate", help="run a Monte Carlo experiment from a JSON config")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", help="per-replicate results CSV")
    sim.add_argument("--summary", help="summary CSV (default: <out>_summary.csv)")
    sim.add_argument("--threads", type=int, default=1)
    sim.set_defaults(func=cmd_simulate)

    rep = sub.add_parser("reproduce-table", help="simulate a published size/power table")
    rep.add_argument("--table", type=int, choices=(1, 2, 3), required=True)
    rep.add_argument("--reps", type=int, default=10000)
    rep.add_argument("--seed", type=int, default=20240101)
    rep.add_argument("--out", required=True)
    rep.add_argument("--threads", type=int, default=1)
    rep.set_defaults(func=cmd_reproduce)

    qq = sub.add_parser("qq", help="export QQ-plot coordinates of p-values")
    qq.add_argument("--pvalues", required=True, help="results CSV written by simulate")
    qq.add_argument("--out", required=True)
    qq.add_argument("--scenario")
    qq.add_argument("--statistic")
    qq.set_defaults(func=cmd_qq)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateVarianceError as exc:
        print(f"degenerate statistic: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ParseError, DimensionError, EmptyIndexSetError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except MdepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
