from __future__ import annotations

import sys
from pathlib import Path
from typing import Optional

from ..harness.report import frame_to_csv, load_report, load_report_payload, records_frame, report_frame, select, select_records
from ..io_helpers import emit_json


def _report_path(path: str) -> Path:
    candidate = Path(path).expanduser()
    if candidate.is_dir():
        return candidate / "report.json"
    return candidate


def run_report_command(path: str, query: Optional[str], output_format: str) -> int:
    """Re-emit a stored report, optionally narrowed by a JSONPath query over its JSON form."""
    report_path = _report_path(path)
    if output_format == "csv":
        if query:
            frame = records_frame(select_records(load_report_payload(report_path), query))
        else:
            frame = report_frame(load_report(report_path))
        sys.stdout.write(frame_to_csv(frame))
        return 0
    payload = load_report_payload(report_path)
    if query:
        emit_json({"query": query, "matches": select(payload, query)})
    else:
        emit_json(payload)
    return 0
