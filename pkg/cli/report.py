"""Report rendering: structured text, csv and a human summary."""

import csv
import io
from collections import OrderedDict
from fractions import Fraction
from typing import List

from core.checks import CheckStatus, VerifyReport
from core.corollaries import CONJECTURE_BANNER

FIELDS = ["check_id", "inputs", "expected", "got", "status", "section", "claim", "note"]


def format_value(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return "(" + ", ".join(format_value(v) for v in value) + ")"
    if isinstance(value, Fraction) and value.denominator == 1:
        return str(value.numerator)
    return str(value)


def _rows(report: VerifyReport) -> List[dict]:
    return [
        {
            "check_id": r.check_id,
            "inputs": r.inputs,
            "expected": format_value(r.expected),
            "got": format_value(r.got),
            "status": r.status.name,
            "section": r.section,
            "claim": r.claim,
            "note": r.note,
        }
        for r in report.records
    ]


def to_text(report: VerifyReport) -> str:
    """One record per line, fields as key=value separated by tabs."""
    lines = []
    for row in _rows(report):
        lines.append("\t".join(f"{k}={row[k]}" for k in FIELDS if row[k] or k not in ("claim", "note")))
    return "\n".join(lines) + ("\n" if lines else "")


def to_csv(report: VerifyReport) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    w.writeheader()
    for row in _rows(report):
        w.writerow(row)
    return buf.getvalue()


def to_human(report: VerifyReport) -> str:
    """Per-check tallies, then every record that did not plainly pass."""
    columns = [CheckStatus.PASS, CheckStatus.ERRATUM, CheckStatus.FLAGGED, CheckStatus.FAIL, CheckStatus.ERROR]
    tallies: "OrderedDict[tuple, dict]" = OrderedDict()
    for r in report.records:
        key = (r.section, r.check_id)
        tallies.setdefault(key, {s: 0 for s in columns})[r.status] += 1

    width = max([len(cid) for _, cid in tallies] + [8])
    header = f"{'check':<{width}}  " + "  ".join(f"{s.name.lower():>7}" for s in columns)
    lines = [f"scope: {report.scope}", ""]
    for section in ("proved", "empirical", "conjectural"):
        keys = [k for k in tallies if k[0] == section]
        if not keys:
            continue
        lines.append(f"[{section}]" if section != "conjectural" else f"[{section}: {CONJECTURE_BANNER}]")
        lines.append(header)
        for key in keys:
            counts = tallies[key]
            lines.append(f"{key[1]:<{width}}  " + "  ".join(f"{counts[s]:>7}" for s in columns))
        lines.append("")

    notable = [r for r in report.records if r.status is not CheckStatus.PASS]
    if notable:
        lines.append("details:")
        for r in notable:
            line = (f"  {r.status.name:<8} {r.check_id} {r.inputs}: "
                    f"expected {format_value(r.expected)} got {format_value(r.got)}")
            if r.claim:
                line += f" ({r.claim})"
            if r.note:
                line += f" [{r.note}]"
            lines.append(line)
        lines.append("")
    lines.append("result: " + ("ok" if report.ok else "FAILED"))
    return "\n".join(lines) + "\n"


def render(report: VerifyReport, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(report)
    if fmt == "text":
        return to_text(report)
    return to_human(report)
