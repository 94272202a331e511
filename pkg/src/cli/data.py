from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence, TextIO

from ..config import DatasetSource
from ..errors import ConfigError
from ..graphdata import CANONICAL_CLASSES, CANONICAL_FEATURE_DIM, ClassSpec, Dataset, export_tudataset, load_tudataset, synth_dataset
from ..harness.experiments import resolve_target_class
from ..io_helpers import emit_json, log_line


def load_dataset(source: DatasetSource, *, log_stream: Optional[TextIO] = None) -> Dataset:
    if source.source == "tudataset":
        dataset = load_tudataset(Path(source.path or ""), source.name or "")
    else:
        dataset = synth_dataset(source.classes, source.feature_dim, source.synth_seed, name=source.name or "synthetic")
    if log_stream is not None:
        log_line("data", f"loaded {dataset.name}: {len(dataset)} graphs, class counts {list(dataset.class_counts)}", log_stream)
    return dataset


def parse_class_spec(text: str) -> ClassSpec:
    parts = [part.strip() for part in text.split(",")]
    try:
        if len(parts) != 3:
            raise ValueError(text)
        n_nodes, edge_prob, count = int(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(
            f"class spec {text!r} is not N_NODES,EDGE_PROB,COUNT",
            diagnostics=[{"path": "--class", "message": f"cannot parse {text!r}"}],
        ) from None
    return ClassSpec(n_nodes, edge_prob, count)


def run_ingest_command(path: str, name: str, target: Optional[int], quiet: bool) -> int:
    dataset = load_tudataset(Path(path), name)
    if not quiet:
        log_line("data", f"parsed {len(dataset)} graphs from {path}")
    emit_json({"ok": True, "path": str(Path(path).expanduser()), **dataset.summary(resolve_target_class(dataset, target))})
    return 0


def run_synth_command(
    out: str,
    seed: int,
    name: str,
    class_specs: Sequence[str],
    feature_dim: Optional[int],
    quiet: bool,
) -> int:
    classes = [parse_class_spec(text) for text in class_specs] or list(CANONICAL_CLASSES)
    dataset = synth_dataset(classes, feature_dim or CANONICAL_FEATURE_DIM, seed, name=name)
    directory = export_tudataset(dataset, Path(out), name)
    if not quiet:
        log_line("data", f"wrote {len(dataset)} graphs to {directory}")
    emit_json({"ok": True, "output": str(directory), "seed": seed, **dataset.summary(resolve_target_class(dataset, None))})
    return 0
