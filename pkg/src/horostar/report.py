"""Export suite reports as JSON or CSV."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .suites import _json_default

FORMATS = ("json", "csv")
CSV_FIELDS = ("suite", "anchor", "seed", "case", "passed", "detail")


def render_reports(reports: list, fmt: str = "json") -> str:
    if not reports:
        raise ValueError("no reports to export")
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose json or csv")
    if fmt == "json":
        return json.dumps({"reports": list(reports)}, sort_keys=True, indent=2,
                          default=_json_default) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rep in reports:
        for case in rep["cases"]:
            detail = {k: v for k, v in case.items() if k not in ("case", "passed")}
            writer.writerow([rep["suite"], rep["anchor"], rep["seed"], case["case"],
                             "pass" if case["passed"] else "fail",
                             json.dumps(detail, sort_keys=True, default=_json_default)])
    return buf.getvalue()


def export_report(reports: list, fmt: str = "json", out=None) -> str:
    """Render ``reports`` and write them to ``out`` if given; unwritable paths raise OSError."""
    text = render_reports(reports, fmt)
    if out is not None:
        Path(out).write_text(text)
    return text
