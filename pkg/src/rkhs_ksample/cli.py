"""Command-line entry point: ``test``, ``simulate`` and ``null-study``.

Exit codes: 0 success, 2 usage or validation error, 3 degenerate statistic,
4 internal numerical failure. Diagnostics go to stderr as one line; stdout
only ever carries JSON or CSV.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .errors import (
    DegenerateKernelMatrix,
    InvalidAlpha,
    InvalidParameters,
    NumericalFailure,
    ParseError,
    ValidationError,
)
from .inference import TestReport, decide
from .kernels import KernelSpec, gram
from .oracle import max_relative_deviation, oracle_from_gram
from .sample import load_csv
from .simulation import (
    CaseSpec,
    builtin_case,
    run_null_distribution_study,
    run_power_study,
)
from .statistic import RegularizationPolicy, gamma_for, statistic_from_gram

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_DEGENERATE = 3
EXIT_NUMERICAL = 4


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _alpha(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return value


def _gamma(text):
    if text == "auto":
        return RegularizationPolicy.schedule()
    return RegularizationPolicy.fixed(_positive_float(text))


def _sizes(text):
    try:
        sizes = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("empty size list")
    return sizes


def _common(parser: argparse.ArgumentParser, default_format: str) -> None:
    parser.add_argument("--alpha", type=_alpha, default=0.05, help="significance level (default 0.05)")
    parser.add_argument("--kernel-scale", type=_positive_float, default=2.0,
                        help="Gaussian kernel exp(-scale*|x-y|^2) scale (default 2)")
    parser.add_argument("--gamma", type=_gamma, default=RegularizationPolicy.schedule(),
                        help="ridge parameter: 'auto' for the size schedule, or a positive number")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")
    parser.add_argument("--format", choices=("json", "csv"), default=default_format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rkhs-ksample",
        description="Regularized kernel-embedding k-sample homogeneity test.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the test on a CSV file (header group,x1[,x2,...])")
    p.add_argument("data", help="CSV path, or '-' for stdin")
    _common(p, "json")
    p.add_argument("--verify", action="store_true",
                   help="also run the dense reference computation and report the max relative deviation")

    p = sub.add_parser(
        "simulate",
        help="Monte Carlo power study",
        description="Normal distributions are parameterized by variance: N(0,4) has sd 2.",
    )
    p.add_argument("--case", required=True,
                   help="1, 2, 3, 4, null, or file:PATH.json with a custom case")
    p.add_argument("--sizes", type=_sizes, required=True, help="comma-separated total sample sizes")
    p.add_argument("--reps", type=int, default=500, help="replications per size (default 500)")
    p.add_argument("--workers", type=int, default=1)
    _common(p, "csv")

    p = sub.add_parser("null-study", help="replicate n*T under a null case")
    p.add_argument("--case", default="null", help="a case whose distributions coincide (default null)")
    p.add_argument("--n", type=int, required=True, help="total sample size")
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--summary", help="with --format csv, also write the JSON summary here")
    _common(p, "json")
    return parser


def _resolve_case(text: str) -> CaseSpec:
    if text.startswith("file:"):
        return CaseSpec.from_json(text[len("file:"):])
    if text.endswith(".json"):
        return CaseSpec.from_json(text)
    return builtin_case(text)


def report_to_dict(report: TestReport, kernel: KernelSpec) -> dict:
    b = report.breakdown
    return {
        "n": b.n,
        "k": len(b.sizes),
        "sizes": list(b.sizes),
        "gamma": b.gamma,
        "ell": b.ell,
        "statistic": b.t_hat,
        "n_statistic": b.n_t_hat,
        "p_value": report.p_value,
        "alpha": report.alpha,
        "reject": report.reject,
        "method": report.method,
        "kernel": kernel.to_dict(),
    }


def _dict_to_csv(record: dict) -> str:
    flat = {}
    for key, value in record.items():
        if isinstance(value, dict):
            flat.update({f"{key}_{k}": v for k, v in value.items()})
        elif isinstance(value, list):
            flat[key] = ";".join(map(str, value))
        else:
            flat[key] = value
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
    writer.writeheader()
    writer.writerow(flat)
    return buf.getvalue()


def _emit(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_test(args) -> int:
    source = sys.stdin.buffer if args.data == "-" else args.data
    sample = load_csv(source)
    kernel = KernelSpec(scale=args.kernel_scale)
    layout = sample.layout
    L = gram(kernel, sample.stacked())
    gamma = gamma_for(args.gamma, layout.n)
    report = decide(statistic_from_gram(layout, L, gamma), args.alpha)
    record = report_to_dict(report, kernel)
    if args.verify:
        ref = oracle_from_gram(layout, L, gamma)
        record["verify"] = {"max_rel_dev": max_relative_deviation(report.breakdown, ref)}
    _emit(_json(record) if args.format == "json" else _dict_to_csv(record), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    case = _resolve_case(args.case)
    for n in args.sizes:
        if n < 2 * case.k:
            raise InvalidParameters(f"size {n} < 2k = {2 * case.k}")
    curve = run_power_study(
        case,
        args.sizes,
        alpha=args.alpha,
        replications=args.reps,
        master_seed=args.seed,
        kernel=KernelSpec(scale=args.kernel_scale),
        policy=args.gamma,
        workers=args.workers,
    )
    _emit(curve.to_csv() if args.format == "csv" else _json(curve.to_dict()), args.output)
    return EXIT_OK


def cmd_null_study(args) -> int:
    study = run_null_distribution_study(
        _resolve_case(args.case),
        args.n,
        replications=args.reps,
        master_seed=args.seed,
        kernel=KernelSpec(scale=args.kernel_scale),
        policy=args.gamma,
        workers=args.workers,
    )
    summary = study.summary
    if args.format == "json":
        _emit(_json({**summary, "statistics": study.statistics.tolist()}), args.output)
    else:
        _emit(study.to_lines(), args.output)
        if args.summary:
            _emit(_json(summary), args.summary)
    return EXIT_OK


COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "null-study": cmd_null_study}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValidationError, InvalidAlpha, InvalidParameters, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DegenerateKernelMatrix as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
