"""Command-line surface: config ingestion, subcommand dispatch, emission.

Subcommands:

  validate   print the constraint report for a parameter set
  build      emit one operator or change-of-basis matrix
  verify     run the verification suite
  overlap    emit overlap tables (general or degenerate kinds)
  limits     run the t -> 0 limit checks over the rational function field

Parameters come from a JSON file (--params) or from a seeded draw
(--shape with --seed), never both.  Exit status: 0 when every requested
check passes, 1 when a check fails, 2 on malformed configuration.
All rationals are printed as exact strings like "-3/7".
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .cob import COEFFICIENT_KINDS, coefficient_matrix
from .exactfield import rational
from .multiindex import Shape, enumerate_box
from .overlap import (
    LIMIT_KINDS,
    T_METHODS,
    U_METHODS,
    overlap_limit_kind,
    overlap_table,
)
from .report import VerificationReport
from .tdcore import (
    ExactMatrix,
    InvalidParameters,
    OPERATOR_NAMES,
    TDParameters,
    build_operator,
    parameters_from_json_obj,
    validate_parameters,
)
from .verify import (
    CHECK_NAMES,
    DEFAULT_CHECKS,
    SamplingExhausted,
    random_valid_parameters,
    run_suite,
)

__all__ = ["main"]

FORMATS = ("text", "json", "csv")
BUILD_TARGETS = OPERATOR_NAMES + COEFFICIENT_KINDS
OVERLAP_KINDS = ("racah",) + LIMIT_KINDS


class ConfigError(Exception):
    """Configuration the CLI cannot act on; maps to exit status 2."""


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdpair",
        description="Exact construction and verification of tridiagonal pairs "
        "of the second eigenvalue type in the split basis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--params", metavar="PATH", help="parameter JSON file")
        p.add_argument(
            "--shape",
            metavar="L1,L2,...",
            help="coordinate bounds for seeded parameter generation",
        )
        p.add_argument("--seed", type=int, help="seed for parameter generation")
        p.add_argument(
            "--bound",
            type=int,
            default=10,
            help="numerator/denominator bound for generated rationals (default 10)",
        )
        p.add_argument(
            "--format",
            choices=FORMATS,
            default="text",
            help="output format (default text)",
        )

    add_common(sub.add_parser("validate", help="check the parameter constraints"))

    p_build = sub.add_parser("build", help="emit one matrix over the split basis")
    add_common(p_build)
    p_build.add_argument(
        "--operator",
        choices=BUILD_TARGETS,
        required=True,
        help="operator (A, Astar, S, R, L) or coefficient family (C, Cbar, D, Dbar)",
    )

    p_verify = sub.add_parser("verify", help="run the verification suite")
    add_common(p_verify)
    p_verify.add_argument(
        "--checks",
        default="standard",
        help='"standard", "all", or a comma-separated list of check names '
        "(the constraints check is always included)",
    )
    p_verify.add_argument(
        "--beta",
        default="2",
        metavar="P/Q",
        help="coefficient of the middle cubic term in td_relations (default 2)",
    )

    p_overlap = sub.add_parser("overlap", help="emit overlap function tables")
    add_common(p_overlap)
    p_overlap.add_argument(
        "--which",
        choices=("T", "U", "both"),
        default="T",
        help="which family to tabulate (default T)",
    )
    p_overlap.add_argument(
        "--method",
        choices=sorted(set(T_METHODS) | set(U_METHODS)) + ["all"],
        default=None,
        help="evaluation route, or all routes (general kind only)",
    )
    p_overlap.add_argument(
        "--kind",
        choices=OVERLAP_KINDS,
        default="racah",
        help="eigenvalue kind: the general one or a degenerate limit (default racah)",
    )

    add_common(
        sub.add_parser(
            "limits", help="verify the degenerate kinds as t -> 0 limits"
        )
    )
    return parser


def _parse_shape(text: str) -> Shape:
    try:
        parts = [int(piece) for piece in text.split(",") if piece.strip() != ""]
        return Shape(parts)
    except ValueError as err:
        raise ConfigError(f"bad --shape {text!r}: {err}") from None


def _load_parameters(args) -> TDParameters:
    from_file = args.params is not None
    generated = args.shape is not None or args.seed is not None
    if from_file == generated:
        raise ConfigError("supply exactly one of --params or (--shape and --seed)")
    if from_file:
        try:
            with open(args.params, "r", encoding="utf-8") as fh:
                obj = json.load(fh)
        except OSError as err:
            raise ConfigError(f"cannot read {args.params}: {err}") from None
        except json.JSONDecodeError as err:
            raise ConfigError(f"invalid JSON in {args.params}: {err}") from None
        try:
            return parameters_from_json_obj(obj)
        except (ValueError, TypeError) as err:
            raise ConfigError(f"bad parameter document: {err}") from None
    if args.shape is None or args.seed is None:
        raise ConfigError("generated mode needs both --shape and --seed")
    shape = _parse_shape(args.shape)
    if args.bound < 4:
        raise ConfigError("--bound must be at least 4")
    try:
        return random_valid_parameters(shape, seed=args.seed, bound=args.bound)
    except SamplingExhausted as err:
        raise ConfigError(str(err)) from None


# ---------------------------------------------------------------------------
# emission


def _csv_text(rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _matrix_text(m: ExactMatrix) -> str:
    rows = m.to_csv_rows()
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    lines = [
        "  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows
    ]
    return "\n".join(lines) + "\n"


def _emit_matrix(m: ExactMatrix, fmt: str) -> str:
    if fmt == "json":
        return _json_text(m.to_json_obj())
    if fmt == "csv":
        return _csv_text(m.to_csv_rows())
    return _matrix_text(m)


def _report_csv_rows(report: VerificationReport) -> list[list[str]]:
    rows = [["check", "paper_ref", "pass", "witness", "millis"]]
    for r in report.results:
        rows.append(
            [
                r.check,
                r.paper_ref,
                r.status_word(),
                "" if r.witness is None else json.dumps(r.witness),
                str(r.millis),
            ]
        )
    return rows


def _emit_report(report: VerificationReport, fmt: str) -> str:
    if fmt == "json":
        return _json_text(report.to_json_obj())
    if fmt == "csv":
        return _csv_text(_report_csv_rows(report))
    return report.to_text() + "\n"


def _emit_tables(tables: Sequence[tuple[str, ExactMatrix]], fmt: str) -> str:
    if fmt == "json":
        return _json_text(
            {"tables": [{"label": label, **m.to_json_obj()} for label, m in tables]}
        )
    blocks = []
    for label, m in tables:
        body = _csv_text(m.to_csv_rows()) if fmt == "csv" else _matrix_text(m)
        blocks.append(f"# {label}\n{body}")
    return "\n".join(blocks)


# ---------------------------------------------------------------------------
# subcommands; each returns (output text, exit status)


def _cmd_validate(args) -> tuple[str, int]:
    params = _load_parameters(args)
    report = validate_parameters(params)
    return _emit_report(report, args.format), 0 if report.passed else 1


def _cmd_build(args) -> tuple[str, int]:
    params = _load_parameters(args)
    if args.operator in OPERATOR_NAMES:
        m = build_operator(params, args.operator)
    else:
        report = validate_parameters(params)
        if not report.passed:
            raise InvalidParameters(report)
        m = coefficient_matrix(params, args.operator)
    return _emit_matrix(m, args.format), 0


def _parse_checks(text: str) -> Optional[list[str]]:
    if text == "standard":
        return None
    if text == "all":
        return list(CHECK_NAMES)
    names = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not names:
        raise ConfigError("--checks is empty")
    unknown = [n for n in names if n not in CHECK_NAMES]
    if unknown:
        raise ConfigError(
            f"unknown checks: {', '.join(unknown)}; expected among {CHECK_NAMES}"
        )
    # keep exit status truthful when the parameter set is invalid
    if "constraints" not in names:
        names.insert(0, "constraints")
    return names


def _cmd_verify(args) -> tuple[str, int]:
    try:
        beta = rational(args.beta)
    except ValueError as err:
        raise ConfigError(f"bad --beta: {err}") from None
    checks = _parse_checks(args.checks)
    params = _load_parameters(args)
    report = run_suite(params, checks=checks, beta=beta)
    return _emit_report(report, args.format), 0 if report.passed else 1


def _overlap_methods(which: str) -> tuple[str, ...]:
    return T_METHODS if which == "T" else U_METHODS


def _cmd_overlap(args) -> tuple[str, int]:
    which_list = ["T", "U"] if args.which == "both" else [args.which]
    if args.kind != "racah":
        if args.method is not None:
            raise ConfigError("--method applies to the general kind only")
        if args.which != "T":
            raise ConfigError("degenerate kinds tabulate T only")
    params = _load_parameters(args)
    tables: list[tuple[str, ExactMatrix]] = []
    if args.kind != "racah":
        basis = enumerate_box(params.shape)
        m = ExactMatrix.from_function(
            basis, lambda i, x: overlap_limit_kind(params, args.kind, i, x)
        )
        tables.append((f"T {args.kind}", m))
    else:
        for which in which_list:
            methods = (
                _overlap_methods(which)
                if args.method == "all"
                else (args.method or _overlap_methods(which)[0],)
            )
            for method in methods:
                if method not in _overlap_methods(which):
                    raise ConfigError(f"method {method!r} does not compute {which}")
                tables.append(
                    (f"{which} {method}", overlap_table(params, which, method))
                )
    return _emit_tables(tables, args.format), 0


def _cmd_limits(args) -> tuple[str, int]:
    params = _load_parameters(args)
    report = run_suite(params, checks=["constraints", "limits"])
    return _emit_report(report, args.format), 0 if report.passed else 1


_COMMANDS = {
    "validate": _cmd_validate,
    "build": _cmd_build,
    "verify": _cmd_verify,
    "overlap": _cmd_overlap,
    "limits": _cmd_limits,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        output, status = _COMMANDS[args.command](args)
    except ConfigError as err:
        print(f"tdpair: {err}", file=sys.stderr)
        return 2
    except InvalidParameters as err:
        print(f"tdpair: {err}", file=sys.stderr)
        print(err.report.to_text(), file=sys.stderr)
        return 1
    sys.stdout.write(output)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
