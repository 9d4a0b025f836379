"""Command-line frontend.

    kldecomp hypergeom POPULATION.json [--output FILE]
    kldecomp decompose DIST.json [REFERENCE.json] [--tolerance T] [--dump-tables]
                       [--allow-zero-reference] [--format json|csv] [--output FILE]
    kldecomp validate [--tolerance T] [--output FILE]
    kldecomp plotdata REPORT.json [--output FILE]

stdout carries only JSON or CSV; diagnostics go to stderr.

Exit codes: 0 ok, 1 residual/fixture mismatch, 2 input parse error,
3 invariant violation, 4 divergence undefined, 5 resource cap.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fixtures
from .decomp import DEFAULT_RESIDUAL_TOLERANCE, DecompositionReport, decompose
from .dist import DEFAULT_TOLERANCE, joint_from_json, joint_to_json, reference_from_json, reference_to_json
from .errors import InputFormatError, KLDecompError
from .hypergeom import PopulationSpec, joint_from_population, reference_from_population

EXIT_OK = 0
EXIT_MISMATCH = 1


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise InputFormatError(f"{path}: top-level JSON value must be an object")
    return doc


def _emit(text: str, output: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_hypergeom(args) -> int:
    spec = PopulationSpec.from_json(_read_json(args.population))
    joint = joint_from_population(spec)
    doc = joint_to_json(joint)
    doc["population"] = spec.to_json()
    doc["reference"] = reference_to_json(reference_from_population(spec))
    _emit(json.dumps(doc, indent=2), args.output)
    return EXIT_OK


def cmd_decompose(args) -> int:
    if args.dump_tables and args.format == "csv":
        raise InputFormatError("--dump-tables is only available with --format json")
    dist_doc = _read_json(args.distribution)
    joint = joint_from_json(dist_doc, tolerance=args.norm_tolerance)
    if args.reference:
        ref_doc = _read_json(args.reference)
    elif "reference" in dist_doc:
        ref_doc = dist_doc["reference"]
    else:
        raise InputFormatError("no reference given and the distribution file embeds none")
    ref = reference_from_json(
        ref_doc, joint.k, allow_zero=args.allow_zero_reference, tolerance=args.norm_tolerance
    )
    report = decompose(joint, ref, include_tables=args.dump_tables)
    if args.format == "csv":
        _emit(report.to_csv(), args.output)
    else:
        _emit(json.dumps(report.to_dict(), indent=2), args.output)
    if report.residual_decomposition > args.tolerance:
        print(
            f"residual {report.residual_decomposition:.3e} exceeds tolerance {args.tolerance:.3e}",
            file=sys.stderr,
        )
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_validate(args) -> int:
    results = fixtures.validate_cases(value_tolerance=args.tolerance)
    summary = {"passed": all(r.passed for r in results), "cases": []}
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{result.name}: {status}", file=sys.stderr)
        for check in result.failures:
            print(
                f"  {check.field}: expected {check.expected!r}, got {check.actual!r} "
                f"(|diff| {check.difference:.3e} > {check.tolerance:.0e})",
                file=sys.stderr,
            )
        summary["cases"].append({
            "name": result.name,
            "status": status,
            "fields": [
                {"field": c.field, "expected": c.expected, "actual": c.actual,
                 "difference": c.difference, "tolerance": c.tolerance, "ok": c.ok}
                for c in result.checks
            ],
        })
    _emit(json.dumps(summary, indent=2), args.output)
    return EXIT_OK if summary["passed"] else EXIT_MISMATCH


def cmd_plotdata(args) -> int:
    report = DecompositionReport.from_dict(_read_json(args.report))
    _emit(report.to_csv(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kldecomp",
        description="Decompose KL(P || Q1 x ... x Qk) into marginal and interaction terms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hypergeom", help="exact joint law of ordered draws without replacement")
    p.add_argument("population", help='JSON file {"counts": {sym: int}, "k": int}')
    p.add_argument("--output", "-o", help="write here instead of stdout")
    p.set_defaults(func=cmd_hypergeom)

    p = sub.add_parser("decompose", help="decompose a distribution against a product reference")
    p.add_argument("distribution", help="distribution JSON file")
    p.add_argument("reference", nargs="?", help="reference JSON file (default: the one embedded in DISTRIBUTION)")
    p.add_argument("--tolerance", type=float, default=DEFAULT_RESIDUAL_TOLERANCE,
                   help="exit nonzero when the decomposition residual exceeds this (default %(default)g)")
    p.add_argument("--norm-tolerance", type=float, default=DEFAULT_TOLERANCE,
                   help="normalization tolerance for float inputs (default %(default)g)")
    p.add_argument("--dump-tables", action="store_true", help="include the full entropy and interaction tables")
    p.add_argument("--allow-zero-reference", action="store_true",
                   help="accept zero reference probabilities where the distribution is also zero")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("validate", help="reproduce the shipped validation cases")
    p.add_argument("--tolerance", type=float, default=fixtures.VALUE_TOLERANCE,
                   help="tolerance for value fields (default %(default)g)")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plotdata", help="stacked-bar CSV from a decomposition report")
    p.add_argument("report", help="report JSON written by 'decompose'")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KLDecompError as exc:
        print(f"kldecomp {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
