"""Report assembly and rendering.

A report is a JSON document (schema 1) carrying the tool version, the
registry hash, every check outcome in registry-then-battery order, and
summary tallies.  Serialization is canonical (sorted keys, two-space
indent, trailing newline), so two runs over identical inputs differ at most
in the ``elapsed_s`` timing fields.  ``render_report`` turns a report into
a Markdown summary with one row per outcome and a plain-language statement
of what each passing check certifies.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

from . import __version__
from .checks import CheckOutcome

__all__ = [
    "SCHEMA_VERSION",
    "build_report",
    "serialize_report",
    "parse_report",
    "render_report",
]

SCHEMA_VERSION = 1

_VERDICTS = ("pass", "fail", "budget-exceeded")

_CHECK_MEANINGS: dict[str, str] = {
    "valid": (
        "the instance descriptor names a buildable chart at a strongly "
        "non-special level index"
    ),
    "flat": (
        "the uniformizer is a nonzerodivisor modulo the chart ideal "
        "(saturating by it changes nothing), so the model is flat over its "
        "base; the saturation was recomputed along two independent routes "
        "that agreed"
    ),
    "components": (
        "the special fiber decomposes as the stated intersection of "
        "components of the expected dimensions (reducedness of the quadric "
        "component is conditional on that component being prime, which is "
        "not machine-checked)"
    ),
    "smooth": (
        "the quadric component's singular locus, computed from Jacobian "
        "minors at the verified codimension, is exactly the vanishing of "
        "both coordinate vectors"
    ),
    "kottwitz-wedge": (
        "all 2x2 minors of the shifted matrices vanish modulo the chart "
        "ideal, both characteristic polynomials match the target product of "
        "linear factors, and both shifted determinants vanish modulo the "
        "ideal"
    ),
    "raw-equiv": (
        "eliminating the matrix variables from the raw chart by the "
        "triangular substitution yields exactly the simplified chart ideal"
    ),
    "blowup": (
        "each blow-up patch agrees with two independently built oracles and "
        "its special fiber is a union of three pairwise-distinct smooth "
        "components crossing in smooth strata of the expected dimensions "
        "(for hypersurface charts: the blow-up center is principal and "
        "torsion-free, so blowing up changes nothing)"
    ),
}


def build_report(
    outcomes: Iterable[CheckOutcome | Mapping],
    registry_hash: str,
) -> dict:
    """Assemble the report document from outcomes in their final order."""
    rows: list[dict] = []
    for item in outcomes:
        row = item.as_dict() if isinstance(item, CheckOutcome) else dict(item)
        rows.append(row)
    summary = {verdict: 0 for verdict in _VERDICTS}
    for row in rows:
        verdict = row["verdict"]
        if verdict not in summary:
            raise ValueError(f"unknown verdict {verdict!r}")
        summary[verdict] += 1
    summary["total"] = len(rows)
    return {
        "schema": SCHEMA_VERSION,
        "tool": "splitmodels",
        "version": __version__,
        "registry_hash": registry_hash,
        "outcomes": rows,
        "summary": summary,
    }


def serialize_report(report: dict) -> str:
    """Canonical JSON text: sorted keys, two-space indent, final newline."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def parse_report(text: str) -> dict:
    report = json.loads(text)
    if not isinstance(report, dict) or report.get("schema") != SCHEMA_VERSION:
        raise ValueError("not a schema-1 report document")
    for key in ("outcomes", "summary", "registry_hash", "version"):
        if key not in report:
            raise ValueError(f"report is missing the {key!r} field")
    return report


def _witness_excerpt(witness: object, limit: int = 60) -> str:
    if witness is None:
        return ""
    text = json.dumps(witness, sort_keys=True)
    if len(text) > limit:
        text = text[: limit - 3] + "..."
    return text


def render_report(report: dict) -> str:
    """Markdown rendering: outcome table plus per-check certifications."""
    lines: list[str] = []
    lines.append("# Verification report")
    lines.append("")
    lines.append(f"- tool: {report.get('tool', '?')} {report.get('version', '?')}")
    lines.append(f"- registry: sha256 {report.get('registry_hash', '?')}")
    summary = report.get("summary", {})
    lines.append(
        "- outcomes: "
        + ", ".join(f"{summary.get(v, 0)} {v}" for v in _VERDICTS)
        + f" ({summary.get('total', 0)} total)"
    )
    lines.append("")
    lines.append("| instance | check | verdict | time (s) | notes |")
    lines.append("|---|---|---|---:|---|")
    seen_checks: list[str] = []
    for row in report.get("outcomes", []):
        check = row.get("check", "?")
        if check not in seen_checks:
            seen_checks.append(check)
        verdict = row.get("verdict", "?")
        flag = "" if verdict == "pass" else " **<-**"
        notes = "" if verdict == "pass" else _witness_excerpt(row.get("witness"))
        elapsed = row.get("elapsed_s", 0.0)
        lines.append(
            f"| {row.get('instance', '?')} | {check} | {verdict}{flag} "
            f"| {elapsed:.3f} | {notes} |"
        )
    lines.append("")
    if seen_checks:
        lines.append("## What a passing check certifies")
        lines.append("")
        for check in seen_checks:
            meaning = _CHECK_MEANINGS.get(check)
            if meaning:
                lines.append(f"- **{check}**: {meaning}.")
        lines.append("")
    return "\n".join(lines)
