"""Command-line front end.

Three commands make every construction and check reproducible from a shell:

- ``chart``  — build one chart ideal and print its canonical serialization;
- ``verify`` — run the check battery for one instance or the whole registry
  and emit a JSON report;
- ``render`` — turn a report into a Markdown summary.

Exit codes: 0 all selected checks pass; 1 at least one check failed;
2 usage error (bad arguments, bad instance, unreadable files); 3 at least
one check exhausted its budget and none failed.
"""

from __future__ import annotations

import argparse
import json
import multiprocessing
import sys
from typing import Sequence

from . import __version__
from .charts import ChartError, build_chart, chart_table, format_instance, parse_instance
from .checks import CHECK_IDS, run_instance
from .ideals import GBBudget, parse_ideal, serialize_ideal
from .registry import Registry, RegistryEntry, RegistryError, load_registry

__all__ = ["main"]

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitmodels",
        description=(
            "Build chart ideals of splitting local models and machine-check "
            "their structural properties with exact rational arithmetic."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    chart = sub.add_parser(
        "chart",
        help="build one chart ideal and print it",
        description=(
            "Build the chart ideal named by the instance string and print "
            "its canonical serialization (deterministic: identical input "
            "gives byte-identical output)."
        ),
    )
    chart.add_argument(
        "instance",
        help='instance string, e.g. "n=5,l=1,i0=1,kind=simplified-A"',
    )
    chart.add_argument(
        "--format",
        choices=("text", "json"),
        default="text",
        help="output as canonical text (default) or JSON",
    )
    chart.add_argument("--out", help="write output to this file instead of stdout")

    verify = sub.add_parser(
        "verify",
        help="run verification checks and emit a JSON report",
        description=(
            "Run the applicable checks for one instance string, or for every "
            "registry entry when the target is 'all'; print the JSON report."
        ),
    )
    verify.add_argument("target", help="an instance string, or 'all'")
    verify.add_argument(
        "--checks",
        help="comma-separated subset of check ids to run "
        f"(known: {', '.join(CHECK_IDS)})",
    )
    verify.add_argument(
        "--budget",
        type=int,
        help="override the pair-reduction budget for every check",
    )
    verify.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="run up to this many instances concurrently (default 1)",
    )
    verify.add_argument(
        "--registry",
        help="path to a registry file (default: the packaged registry)",
    )
    verify.add_argument(
        "--chart-file",
        help=(
            "verify the serialized chart ideal in this file (single-instance "
            "targets only); checks that consume the chart ideal use it in "
            "place of the freshly built one"
        ),
    )
    verify.add_argument("--out", help="write the report to this file instead of stdout")

    render = sub.add_parser(
        "render",
        help="render a JSON report as Markdown",
        description="Read a report produced by verify and print a Markdown summary.",
    )
    render.add_argument("report", help="path to the JSON report file")
    render.add_argument("--out", help="write Markdown to this file instead of stdout")
    return parser


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fail_usage(message: str) -> int:
    print(f"splitmodels: error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _cmd_chart(args: argparse.Namespace) -> int:
    try:
        spec = parse_instance(args.instance)
        ideal = build_chart(spec)
    except ChartError as exc:
        return _fail_usage(str(exc))
    if args.format == "text":
        text = serialize_ideal(ideal)
    else:
        text = (
            json.dumps(
                {
                    "instance": format_instance(spec),
                    "ring": list(ideal.table.names),
                    "generators": [g.to_text() for g in ideal.gens],
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )
    try:
        _emit(text, args.out)
    except OSError as exc:
        return _fail_usage(f"cannot write output: {exc}")
    return EXIT_PASS


def _parse_checks(arg: str | None) -> tuple[str, ...] | None:
    if arg is None:
        return None
    wanted = tuple(part.strip() for part in arg.split(",") if part.strip())
    unknown = set(wanted) - set(CHECK_IDS)
    if unknown:
        raise ValueError(
            f"unknown check ids: {', '.join(sorted(unknown))} "
            f"(known: {', '.join(CHECK_IDS)})"
        )
    if not wanted:
        raise ValueError("--checks must name at least one check")
    return wanted


def _effective_budget(
    cli_budget: int | None, entry_budget: int | None
) -> GBBudget | None:
    if cli_budget is not None:
        return GBBudget().scaled(cli_budget)
    if entry_budget is not None:
        return GBBudget().scaled(entry_budget)
    return None


def _run_entry(payload: tuple[str, int | None, tuple[str, ...] | None]) -> list[dict]:
    """Worker: run one registry entry; returns outcome dicts (picklable)."""
    instance, budget_cap, checks = payload
    budget = GBBudget().scaled(budget_cap) if budget_cap is not None else None
    return [o.as_dict() for o in run_instance(instance, budget, checks)]


def _exit_code(outcome_rows: list[dict]) -> int:
    verdicts = {row["verdict"] for row in outcome_rows}
    if "fail" in verdicts:
        return EXIT_FAIL
    if "budget-exceeded" in verdicts:
        return EXIT_BUDGET
    return EXIT_PASS


def _cmd_verify(args: argparse.Namespace) -> int:
    from .report import build_report, serialize_report

    try:
        checks = _parse_checks(args.checks)
    except ValueError as exc:
        return _fail_usage(str(exc))
    if args.budget is not None and args.budget <= 0:
        return _fail_usage("--budget must be positive")
    if args.jobs < 1:
        return _fail_usage("--jobs must be at least 1")

    if args.target == "all":
        if args.chart_file is not None:
            return _fail_usage("--chart-file requires a single-instance target")
        try:
            registry = load_registry(args.registry)
        except (OSError, RegistryError) as exc:
            return _fail_usage(f"cannot load registry: {exc}")
        payloads = [
            (
                format_instance(entry.spec),
                args.budget if args.budget is not None else entry.budget,
                checks,
            )
            for entry in registry.entries
        ]
        if args.jobs > 1 and len(payloads) > 1:
            with multiprocessing.Pool(processes=args.jobs) as pool:
                grouped = pool.map(_run_entry, payloads)
        else:
            grouped = [_run_entry(p) for p in payloads]
        rows = [row for group in grouped for row in group]
        registry_hash = registry.sha256()
    else:
        try:
            spec = parse_instance(args.target)
        except ChartError as exc:
            return _fail_usage(str(exc))
        chart = None
        if args.chart_file is not None:
            try:
                with open(args.chart_file, "r", encoding="utf-8") as fh:
                    chart = parse_ideal(fh.read())
            except (OSError, ValueError) as exc:
                return _fail_usage(f"cannot read chart file: {exc}")
            if chart.table != chart_table(spec):
                return _fail_usage(
                    "chart file ring does not match the instance's chart ring"
                )
        budget = _effective_budget(args.budget, None)
        outcomes = run_instance(spec, budget, checks, chart=chart)
        rows = [o.as_dict() for o in outcomes]
        registry_hash = Registry(
            entries=(RegistryEntry(spec=spec, budget=args.budget),)
        ).sha256()

    report = build_report(rows, registry_hash)
    try:
        _emit(serialize_report(report), args.out)
    except OSError as exc:
        return _fail_usage(f"cannot write report: {exc}")
    return _exit_code(rows)


def _cmd_render(args: argparse.Namespace) -> int:
    from .report import parse_report, render_report

    try:
        with open(args.report, "r", encoding="utf-8") as fh:
            report = parse_report(fh.read())
    except (OSError, ValueError) as exc:
        return _fail_usage(f"cannot read report: {exc}")
    try:
        _emit(render_report(report), args.out)
    except OSError as exc:
        return _fail_usage(f"cannot write output: {exc}")
    return EXIT_PASS


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE
    if args.command == "chart":
        return _cmd_chart(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "render":
        return _cmd_render(args)
    parser.print_help()
    return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
