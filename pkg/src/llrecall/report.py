"""CSV and JSON writers for experiment reports and individual results.

Fractions are written with 4 decimals and relative improvements as integer
percents, so the output bytes depend only on the results.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Sequence

from .evaluation import ExperimentReport, round_percent

REPORT_HEADER = ("comb_id", "members", "top_individual", "score_addition", "ri_score_addition", "borda", "ri_borda")
INDIVIDUALS_HEADER = ("config_id", "top_k")
MEMBER_SEP = ";"


def _frac(x: float) -> str:
    return f"{x:.4f}"


def report_rows(report: ExperimentReport) -> list[dict]:
    return [
        {
            "comb_id": row.comb_id,
            "members": MEMBER_SEP.join(row.members),
            "top_individual": _frac(row.top_individual),
            "score_addition": _frac(row.score_addition),
            "ri_score_addition": round_percent(row.ri_score_addition),
            "borda": _frac(row.borda),
            "ri_borda": round_percent(row.ri_borda),
        }
        for row in report.rows
    ]


def individuals_rows(individuals: Sequence[tuple[str, float]]) -> list[dict]:
    return [{"config_id": cid, "top_k": _frac(p)} for cid, p in individuals]


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(rows, numeric=()) -> str:
    out = []
    for row in rows:
        row = dict(row)
        for key in numeric:
            row[key] = float(row[key])
        out.append(row)
    return json.dumps(out, indent=2) + "\n"


def write_individuals(individuals, out_dir, fmt: str = "csv") -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = individuals_rows(individuals)
    if fmt == "json":
        path = out / "individuals.json"
        path.write_text(_json_text(rows, numeric=("top_k",)), encoding="utf-8")
    else:
        path = out / "individuals.csv"
        path.write_text(_csv_text(INDIVIDUALS_HEADER, rows), encoding="utf-8")
    return path


def write_report(report: ExperimentReport, out_dir, fmt: str = "csv") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = report_rows(report)
    if fmt == "json":
        path = out / "report.json"
        for row in rows:
            row["members"] = row["members"].split(MEMBER_SEP)
        path.write_text(
            _json_text(rows, numeric=("top_individual", "score_addition", "borda")),
            encoding="utf-8",
        )
    else:
        path = out / "report.csv"
        path.write_text(_csv_text(REPORT_HEADER, rows), encoding="utf-8")
    return [path, write_individuals(report.individuals, out, fmt)]
