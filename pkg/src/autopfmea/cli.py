"""Command-line entry point: ``autopfmea {validate,match,analyze,explore,simulate}``.

Exit codes: 0 success, 1 analysis-negative outcome, 2 input or parse error.
Reports go to stdout (or ``--out``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from .catalog_io import (FORMATS, ParseError, parse_catalog, parse_config, parse_library,
                         parse_process, parse_recipe, write_report)
from .config import AnalysisConfig
from .economics import economic_report
from .explorer import ProducibilityError, explore
from .matcher import process_produces
from .model import validate_catalog, validate_library, validate_process, validate_recipe
from .montecarlo import compare_with_analytic, simulate
from .pfmea import analyze_process

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2

REQUIRED = {
    "validate": ("services",),
    "match": ("services", "equipment", "recipe", "process"),
    "analyze": ("services", "equipment", "recipe", "process"),
    "explore": ("services", "equipment", "recipe"),
    "simulate": ("services", "equipment", "recipe", "process"),
}


class InputError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="autopfmea", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in REQUIRED:
        p = sub.add_parser(name)
        p.add_argument("--services", help="service library document")
        p.add_argument("--equipment", help="equipment catalog document")
        p.add_argument("--recipe", help="recipe document")
        p.add_argument("--config", help="analysis config document (defaults apply if omitted)")
        p.add_argument("--process", help="process document")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=FORMATS, default="table")
        if name == "explore":
            p.add_argument("--jobs", type=int, default=1,
                           help="worker threads for candidate evaluation")
        if name == "simulate":
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--items", type=int, default=100_000)
    return parser


def _load(path: Optional[str], parse: Callable):
    if path is None:
        return None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return parse(text)
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _diag(message: str) -> None:
    print(f"autopfmea: {message}", file=sys.stderr)


def _run(args) -> int:
    missing = [f"--{flag}" for flag in REQUIRED[args.command] if getattr(args, flag) is None]
    if missing:
        raise InputError(f"{args.command} needs {', '.join(missing)}")

    config = _load(args.config, parse_config) or AnalysisConfig()
    library = _load(args.services, parse_library)
    catalog = _load(args.equipment, parse_catalog)
    recipe = _load(args.recipe, parse_recipe)
    process = _load(args.process, parse_process)

    report = validate_library(library)
    if report.ok and catalog is not None:
        report += validate_catalog(catalog, library, config.scale_max)
    if report.ok and recipe is not None:
        report += validate_recipe(recipe, library, config.scale_max)
    if report.ok and process is not None and catalog is not None and recipe is not None:
        report += validate_process(process, catalog, recipe)

    if args.command == "validate":
        _emit(write_report(report, args.format), args.out)
        return EXIT_OK if report.ok else EXIT_NEGATIVE
    if not report.ok:
        for finding in report:
            _diag(f"invalid input: {finding}")
        return EXIT_INPUT

    if args.command == "explore":
        try:
            result = explore(recipe, catalog, config, workers=max(1, args.jobs))
        except ProducibilityError as exc:
            _diag(str(exc))
            return EXIT_NEGATIVE
        _emit(write_report(result, args.format), args.out)
        return EXIT_OK if result.ranked else EXIT_NEGATIVE

    match = process_produces(process, recipe, catalog)
    if args.command == "match":
        _emit(write_report(match, args.format), args.out)
        return EXIT_OK if match.produces else EXIT_NEGATIVE
    if not match.produces:
        for v in match.violations:
            _diag(f"{v.kind}: {v.detail}")
        return EXIT_NEGATIVE

    worksheet = analyze_process(process, recipe, catalog, config, check=False)
    if args.command == "analyze":
        _emit(write_report(worksheet, args.format), args.out)
        return EXIT_OK if worksheet.worst_rpn <= config.rpn_threshold else EXIT_NEGATIVE

    if args.items < 1:
        raise InputError("--items must be at least 1")
    econ = economic_report(process, worksheet, recipe, catalog, config)
    stats = simulate(process, worksheet, catalog, config, args.items, args.seed)
    comparison = compare_with_analytic(stats, econ)
    _emit(write_report((stats, comparison), args.format), args.out)
    return EXIT_OK if comparison.ok else EXIT_NEGATIVE


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return _run(args)
    except InputError as exc:
        _diag(str(exc))
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
