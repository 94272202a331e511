"""Report emission: nested JSON, the flat per-cell CSV and plot-ready sweep CSVs."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

import jsonpath
import pandas as pd

from ..errors import ConfigError, DataError
from ..io_helpers import write_json
from ..records import CellRecord, ExperimentReport

CSV_COLUMNS = [
    "dataset",
    "attack",
    "victim",
    "widths",
    "seed",
    "sweep_param",
    "clean_acc",
    "backdoor_acc",
    "asr",
    "cad",
    "runtime_s",
]
MEAN_SEED = "mean"


def _widths_text(widths: tuple[int, ...]) -> str:
    return "-".join(str(width) for width in widths)


def _csv_row(record: Any, seed: object) -> dict[str, object]:
    return {
        "dataset": record.dataset,
        "attack": record.attack,
        "victim": record.victim,
        "widths": _widths_text(record.widths),
        "seed": seed,
        "sweep_param": record.sweep_param,
        "clean_acc": record.clean_accuracy,
        "backdoor_acc": record.backdoor_accuracy,
        "asr": record.asr,
        "cad": record.cad,
        "runtime_s": record.runtime_seconds,
    }


def records_frame(records: list[CellRecord]) -> pd.DataFrame:
    return pd.DataFrame([_csv_row(record, record.seed) for record in records], columns=CSV_COLUMNS)


def report_frame(report: ExperimentReport) -> pd.DataFrame:
    """Per-seed cells followed by one mean row per group (seed column ``mean``)."""
    rows = [_csv_row(record, record.seed) for record in report.sorted_records()]
    rows.extend(_csv_row(row, MEAN_SEED) for row in report.summary())
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def sweep_frame(report: ExperimentReport) -> Optional[pd.DataFrame]:
    if not report.sweep_axis:
        return None
    rows = [
        {
            "attack": row.attack,
            "victim": row.victim,
            "widths": _widths_text(row.widths),
            report.sweep_axis: row.sweep_param,
            "asr": row.asr,
            "clean_acc": row.clean_accuracy,
            "backdoor_acc": row.backdoor_accuracy,
            "cad": row.cad,
            "num_seeds": row.num_seeds,
        }
        for row in report.summary()
    ]
    return pd.DataFrame(rows)


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n")


def write_report(report: ExperimentReport, out_dir: Path) -> dict[str, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": write_json(out_dir / "report.json", report.to_dict()),
        "csv": out_dir / "report.csv",
    }
    paths["csv"].write_text(frame_to_csv(report_frame(report)), encoding="utf-8")
    sweep = sweep_frame(report)
    if sweep is not None:
        paths["sweep_csv"] = out_dir / f"sweep_{report.sweep_axis}.csv"
        paths["sweep_csv"].write_text(frame_to_csv(sweep), encoding="utf-8")
    return paths


def load_report_payload(path: Path) -> dict[str, Any]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read report {path}: {exc}") from None
    if not isinstance(payload, dict) or "records" not in payload:
        raise DataError(f"{path} is not an experiment report")
    return payload


def load_report(path: Path) -> ExperimentReport:
    payload = load_report_payload(path)
    try:
        return ExperimentReport.from_dict(payload)
    except DataError as exc:
        raise DataError(f"{path}: {exc.message}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed report: {exc}") from None


def select(payload: dict[str, Any], query: str) -> list[Any]:
    try:
        return jsonpath.compile(query).findall(payload)
    except jsonpath.JSONPathError as exc:
        raise ConfigError(f"invalid JSONPath query {query!r}: {exc}", diagnostics=[{"path": "--select", "message": str(exc)}]) from None


def select_records(payload: dict[str, Any], query: str) -> list[CellRecord]:
    matches = select(payload, query)
    records = []
    for match in matches:
        try:
            records.append(CellRecord.from_dict(match))
        except (KeyError, TypeError, ValueError, AttributeError):
            raise ConfigError(
                f"query {query!r} matched something other than report records",
                diagnostics=[{"path": "--select", "message": "CSV output needs matches from $.records"}],
            ) from None
    return records


__all__ = [
    "CSV_COLUMNS",
    "frame_to_csv",
    "load_report",
    "load_report_payload",
    "records_frame",
    "report_frame",
    "select",
    "select_records",
    "sweep_frame",
    "write_report",
]
