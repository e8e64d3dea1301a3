"""Command line entry point: ``kcmtest {simulate,test,sweep}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

from .dgp import DgpSpec, parse_dgp
from .exceptions import DataError, NumericalError
from .harness import (
    ExperimentConfig,
    emit_table,
    read_csv_dataset,
    run_monte_carlo,
    run_single_test,
    run_truncation_sweep,
)
from .selection import DEFAULT_LAMBDA

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

TEST_COLUMNS = ("statistic", "value", "p_value", "critical_value", "reject", "J", "gamma")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; 2 is reserved for data errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(p: argparse.ArgumentParser, default_stat: str):
    p.add_argument("--stat", default=default_stat,
                   help="comma-separated statistic tokens, e.g. basic,generic:basel,divergent:equal,gp:trc")
    p.add_argument("--select", choices=("nasym", "asym"), default="nasym")
    p.add_argument("--grid-size", type=int, default=9)
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--tau", type=float, default=0.11)
    p.add_argument("--split", type=float, default=0.15, help="training fraction")
    p.add_argument("--boot", type=int, default=500)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")


def _design(p: argparse.ArgumentParser):
    p.add_argument("--dgp", default="dgp1", help="dgp1 .. dgp7")
    p.add_argument("--q", type=int, default=10)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kcmtest", description="Kernel conditional moment specification tests.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="Monte Carlo rejection rates on a simulated design")
    _design(sim)
    _common(sim, "basic")

    tst = sub.add_parser("test", help="test a linear model on a CSV file (y first, then covariates)")
    tst.add_argument("path")
    _common(tst, "basic")
    tst.set_defaults(format="json")

    swp = sub.add_parser("sweep", help="power across truncation levels")
    _design(swp)
    _common(swp, "basic")
    swp.add_argument("--J", dest="J_values", type=_int_list, required=True,
                     help="comma-separated truncation levels")
    return parser


def _config(args, dgp=None, J=None) -> ExperimentConfig:
    try:
        return ExperimentConfig(
            dgp=dgp,
            kinds=tuple(_csv_list(args.stat)),
            select=args.select,
            grid_size=args.grid_size,
            lam=args.lam,
            tau=args.tau,
            J=J,
            split_frac=args.split,
            B=args.boot,
            replications=getattr(args, "reps", 1),
            alpha=args.alpha,
            master_seed=args.seed,
            threads=getattr(args, "threads", 1),
        )
    except DataError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _spec(args) -> DgpSpec:
    return DgpSpec(parse_dgp(args.dgp), args.q, args.n)


def _test_output(outcomes, data, fmt: str) -> str:
    if fmt == "json":
        doc = {"n": data.n, "q": data.q, "results": [o.to_dict() for o in outcomes.values()]}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TEST_COLUMNS)
    for o in outcomes.values():
        d = o.to_dict()
        w.writerow([repr(d[c]) if isinstance(d[c], float) else d[c] for c in TEST_COLUMNS])
    return buf.getvalue()


def _sweep_output(result, fmt: str) -> str:
    if fmt == "csv":
        return result.to_csv()
    rows = []
    for J in result.J_values:
        rep = result.reports[J]
        rows.append({"J": J, **{k: rep.rejection_rate(k) for k in rep.records}})
    return json.dumps({"rows": rows, "skipped": [{"J": J, "reason": m} for J, m in result.skipped]},
                      indent=2) + "\n"


def run(args) -> str:
    if args.command == "simulate":
        report = run_monte_carlo(_config(args, _spec(args)))
        for err in report.errors:
            logging.getLogger(__name__).warning(err)
        return emit_table(report, args.format)
    if args.command == "test":
        try:
            data = read_csv_dataset(args.path)
        except OSError as exc:
            raise DataError(f"cannot read {args.path}: {exc.strerror}") from None
        outcomes = run_single_test(data, _config(args), seed=args.seed)
        return _test_output(outcomes, data, args.format)
    if args.command == "sweep":
        config = _config(args, _spec(args))
        return _sweep_output(run_truncation_sweep(config, args.J_values), args.format)
    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        text = run(args)
    except UsageError as exc:
        print(f"kcmtest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"kcmtest: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"kcmtest: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
