from __future__ import annotations

from dataclasses import replace
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from ..config import MANIFEST_FORMAT, RunConfig, load_config_file, resolve_config, resolve_document
from ..gnn import save_checkpoint
from ..graphdata import Dataset, export_tudataset
from ..harness import GridArtifacts, run_experiment, training_seed, write_report
from ..io_helpers import dump_toml, dump_yaml, emit_json, log_line, staged_output_dir, write_json
from ..records import ExperimentReport
from ..seeding import derive_seed
from .data import load_dataset


def build_overrides(
    sets: Sequence[str],
    *,
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
    out: Optional[str] = None,
    experiment: Optional[str] = None,
    attack: Optional[str] = None,
    budget: Optional[int] = None,
    timing: bool = False,
) -> list[str]:
    """Shorthand flags become dotted overrides applied after any ``--set``."""
    overrides = list(sets)
    shorthands: list[tuple[str, Any]] = [
        ("seed", seed),
        ("harness.jobs", jobs),
        ("output_dir", out),
        ("harness.experiment", experiment),
        ("attack.name", attack),
        ("attack.budget", budget),
        ("harness.record_timing", True if timing else None),
    ]
    overrides.extend(f"{key}={json.dumps(value)}" for key, value in shorthands if value is not None)
    return overrides


def run_validate_command(config_path: Optional[str], overrides: Sequence[str], output_format: str) -> int:
    document = resolve_document(load_config_file(config_path), overrides)
    if output_format == "yaml":
        sys.stdout.write(dump_yaml(document))
    elif output_format == "toml":
        sys.stdout.write(dump_toml(document))
    else:
        emit_json(document)
    return 0


def derived_seeds(config: RunConfig) -> dict[str, Any]:
    setup = config.setup
    return {
        "seed": config.seed,
        "dataset": config.dataset.synth_seed if config.dataset.source == "synthetic" else None,
        "runs": {
            str(run_seed): {
                "split": derive_seed(run_seed, "split"),
                "attack": derive_seed(run_seed, "attack"),
                "defense": derive_seed(run_seed, "defense"),
                "train": training_seed(run_seed),
            }
            for run_seed in setup.run_seeds()
        },
    }


def _checkpoint_name(kind: str, arch: str, widths: tuple[int, ...], defended: bool) -> str:
    suffix = "-defended" if defended else ""
    return f"{kind}-{arch}-{'-'.join(map(str, widths))}{suffix}.json"


def write_artifacts(staging: Path, d: Dataset, report: ExperimentReport, collector: GridArtifacts) -> dict[str, Any]:
    """Checkpoints and the poisoned export for the first seed of the primary attack."""
    attack, seed = report.attacks[0], report.seeds[0]
    key = next(key for key in collector.poisons if key.attack == attack and key.seed == seed)
    plan, result = collector.poisons[key]
    outputs: dict[str, Any] = {"checkpoints": []}

    checkpoints = staging / "checkpoints"
    poison_plan = result.plan
    if result.surrogate_state is not None:
        save_checkpoint(result.surrogate_state, checkpoints / "surrogate.json")
        poison_plan = replace(poison_plan, surrogate_checkpoint="checkpoints/surrogate.json")
        outputs["checkpoints"].append("checkpoints/surrogate.json")

    for (cell_attack, cell_seed, point, victim), state in collector.backdoored_models.items():
        if cell_attack != attack or cell_seed != seed or (point.rate, point.budget) != (key.rate, key.budget):
            continue
        name = _checkpoint_name("backdoored", victim.arch, victim.widths, point.defended)
        save_checkpoint(state, checkpoints / name)
        outputs["checkpoints"].append(f"checkpoints/{name}")
    for (clean_seed, victim, defended), state in collector.clean_models.items():
        if clean_seed != seed:
            continue
        name = _checkpoint_name("clean", victim.arch, victim.widths, defended)
        save_checkpoint(state, checkpoints / name)
        outputs["checkpoints"].append(f"checkpoints/{name}")

    poisoned_dir = staging / "poisoned"
    halves = {
        "train": (d.select(plan.train_ids), result.train_graphs),
        "test": (d.select(plan.test_ids), result.test_graphs),
    }
    sidecar: dict[str, Any] = {"attack": attack, "seed": seed, "plan": poison_plan.to_dict(), "split": plan.to_dict()}
    for half, (clean_graphs, poisoned_graphs) in halves.items():
        graphs = tuple(clean_graphs) + tuple(poisoned_graphs)
        export_tudataset(
            Dataset(graphs=graphs, num_classes=d.num_classes, name=f"{d.name}_poisoned_{half}"),
            poisoned_dir / half,
        )
        sidecar[half] = {
            "graph_ids": [graph.id for graph in graphs],
            "poisoned_ids": [graph.id for graph in poisoned_graphs],
        }
    write_json(poisoned_dir / "poisoned.json", sidecar)
    outputs["poisoned"] = ["poisoned/train", "poisoned/test", "poisoned/poisoned.json"]
    return outputs


def run_experiment_command(config_path: Optional[str], overrides: Sequence[str], quiet: bool) -> int:
    config = resolve_config(config_path, overrides)
    log_stream = None if quiet else sys.stderr
    dataset = load_dataset(config.dataset, log_stream=log_stream)
    if log_stream is not None:
        log_line("run", f"{config.experiment} with {config.setup.attack} on {dataset.name}, {config.setup.num_seeds} seed(s)", log_stream)

    collector = GridArtifacts()
    report = run_experiment(config.experiment, dataset, config.setup, log_stream=log_stream, collector=collector)

    target = Path(config.output_dir)
    with staged_output_dir(target) as staging:
        paths = write_report(report, staging)
        outputs = write_artifacts(staging, dataset, report, collector)
        outputs["reports"] = sorted(path.name for path in paths.values())
        manifest = {
            "format": MANIFEST_FORMAT,
            "experiment": config.experiment,
            "config": config.to_dict(),
            "seeds": derived_seeds(config),
            "dataset": dataset.summary(report.target_class),
            "outputs": outputs,
        }
        write_json(staging / "manifest.json", manifest)
    if log_stream is not None:
        log_line("run", f"wrote {target}", log_stream)

    emit_json(
        {
            "ok": True,
            "experiment": config.experiment,
            "output_dir": str(target.expanduser().resolve()),
            "summary": [row.to_dict() for row in report.summary()],
        }
    )
    return 0


__all__ = [
    "build_overrides",
    "derived_seeds",
    "run_experiment_command",
    "run_validate_command",
    "write_artifacts",
]
