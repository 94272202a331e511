"""Run configuration: one JSON document, defaulted, overridden by dotted paths, validated as a whole.

Every problem is collected as a ``{"path", "message"}`` diagnostic and raised together in a
single ``ConfigError``; nothing runs until the document resolves to concrete values.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
import json
import os
from pathlib import Path
from typing import Any, Optional, Sequence

from jsonpath import JSONPatch, JSONPatchError, JSONPointer, JSONPointerError

from .attacks import AttackSettings, list_attacks
from .defense import DefenseConfig
from .errors import ConfigError
from .gnn import ARCHITECTURES, ModelConfig, TrainConfig
from .graphdata import ClassSpec
from .harness.experiments import EXPERIMENTS, ExperimentSetup
from .seeding import derive_seed

MANIFEST_FORMAT = "gblab-manifest/1"
MIN_CLASS = "min-class"
CANONICAL_POISON_RATE = 0.05
DATASET_SOURCES = ("synthetic", "tudataset")

DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "output_dir": "runs/gblab",
    "dataset": {
        "source": "synthetic",
        "path": None,
        "name": None,
        "target_class": MIN_CLASS,
        "synthetic": {
            "classes": [[12, 0.2, 60], [12, 0.6, 60]],
            "feature_dim": 4,
            "seed": None,
        },
    },
    "attack": {
        "name": "trap",
        "baselines": [],
        "budget": 5,
        "poison_rate": CANONICAL_POISON_RATE,
        "sequential": False,
        "trigger_size": 5,
        "trigger_density": 0.8,
        "surrogate_widths": [16, 8],
    },
    "model": {
        "victims": ["GCN"],
        "layer_widths": [16, 8],
        "gat_heads": 3,
    },
    "train": {
        "lr": 0.02,
        "weight_decay": 5e-4,
        "beta1": 0.9,
        "beta2": 0.999,
        "eps": 1e-8,
        "batch_size": 100,
        "epochs": 50,
    },
    "defense": {
        "subsample_ratio": 0.1,
        "num_views": 10,
    },
    "harness": {
        "experiment": "effectiveness",
        "num_seeds": 5,
        "jobs": None,
        "record_timing": False,
        "rates": [0.01, 0.03, 0.05, 0.07],
        "budgets": [1, 3, 5, 7],
        "structure_widths": [32, 16],
    },
}

# defaults of None: any JSON value is accepted at merge time, checked below
_OPEN_LEAVES = {"dataset.path", "dataset.name", "dataset.synthetic.seed", "harness.jobs", "dataset.target_class"}


@dataclass(frozen=True)
class DatasetSource:
    source: str
    path: Optional[str]
    name: Optional[str]
    classes: tuple[ClassSpec, ...]
    feature_dim: int
    synth_seed: int


@dataclass(frozen=True)
class RunConfig:
    seed: int
    output_dir: str
    experiment: str
    dataset: DatasetSource
    setup: ExperimentSetup
    document: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return copy.deepcopy(self.document)


class _Diagnostics:
    def __init__(self) -> None:
        self.items: list[dict[str, str]] = []

    def add(self, path: str, message: str) -> None:
        self.items.append({"path": path, "message": message})

    def raise_if_any(self, summary: str) -> None:
        if self.items:
            raise ConfigError(f"{summary}: {len(self.items)} problem(s)", diagnostics=self.items)


def load_config_file(path: Optional[str | Path]) -> dict[str, Any]:
    """Read a config or a run manifest; a manifest contributes its embedded resolved config."""
    if path is None:
        return {}
    try:
        payload = json.loads(Path(path).expanduser().read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", diagnostics=[{"path": "", "message": str(exc)}]) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path} is not valid JSON",
            diagnostics=[{"path": "", "message": f"line {exc.lineno} column {exc.colno}: {exc.msg}"}],
        ) from None
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: config must be a JSON object", diagnostics=[{"path": "", "message": "not an object"}])
    if payload.get("format") == MANIFEST_FORMAT:
        embedded = payload.get("config")
        if not isinstance(embedded, dict):
            raise ConfigError(f"{path}: manifest has no embedded config", diagnostics=[{"path": "config", "message": "missing"}])
        return embedded
    return payload


def _merge(defaults: dict[str, Any], raw: dict[str, Any], prefix: str, diagnostics: _Diagnostics) -> dict[str, Any]:
    merged = copy.deepcopy(defaults)
    for key, value in raw.items():
        path = f"{prefix}{key}"
        if key not in defaults:
            diagnostics.add(path, f"unknown key {key!r}")
            continue
        default = defaults[key]
        if isinstance(default, dict):
            if not isinstance(value, dict):
                diagnostics.add(path, "must be an object")
                continue
            merged[key] = _merge(default, value, f"{path}.", diagnostics)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def parse_override(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not KEY=VALUE", diagnostics=[{"path": text, "message": "expected KEY=VALUE"}])
    key, _, raw_value = text.partition("=")
    key = key.strip()
    try:
        value = json.loads(raw_value)
    except json.JSONDecodeError:
        value = raw_value
    return key, value


def apply_overrides(document: dict[str, Any], overrides: Sequence[str], diagnostics: _Diagnostics) -> dict[str, Any]:
    """Each ``a.b=value`` becomes a JSON Patch ``replace`` on ``/a/b``; the path must already exist."""
    for text in overrides:
        key, value = parse_override(text)
        pointer = "/" + "/".join(part.replace("~", "~0").replace("/", "~1") for part in key.split("."))
        try:
            JSONPointer(pointer).resolve(document)
        except JSONPointerError:
            diagnostics.add(key, "unknown key")
            continue
        try:
            document = JSONPatch().replace(pointer, value).apply(document)
        except JSONPatchError as exc:
            diagnostics.add(key, str(exc))
    return document


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_types(defaults: dict[str, Any], document: dict[str, Any], prefix: str, diagnostics: _Diagnostics) -> None:
    for key, default in defaults.items():
        path = f"{prefix}{key}"
        value = document.get(key)
        if isinstance(default, dict):
            if isinstance(value, dict):
                _check_types(default, value, f"{path}.", diagnostics)
            else:
                diagnostics.add(path, "must be an object")
            continue
        if path in _OPEN_LEAVES:
            continue
        if isinstance(default, bool):
            ok = isinstance(value, bool)
        elif _is_int(default):
            ok = _is_int(value)
        elif isinstance(default, float):
            ok = _is_number(value)
        elif isinstance(default, str):
            ok = isinstance(value, str)
        elif isinstance(default, list):
            ok = isinstance(value, list)
        else:
            ok = True
        if not ok:
            diagnostics.add(path, f"expected {type(default).__name__}, got {json.dumps(value)}")


def _positive_int_list(value: Any) -> bool:
    return isinstance(value, list) and bool(value) and all(_is_int(item) and item >= 1 for item in value)


def _check_ranges(doc: dict[str, Any], diagnostics: _Diagnostics) -> None:
    def check(path: str, ok: bool, message: str) -> None:
        if not ok:
            diagnostics.add(path, message)

    dataset, attack, model, train, defense, harness = (
        doc["dataset"], doc["attack"], doc["model"], doc["train"], doc["defense"], doc["harness"]
    )
    check("dataset.source", dataset["source"] in DATASET_SOURCES, f"must be one of {', '.join(DATASET_SOURCES)}")
    if dataset["source"] == "tudataset":
        check("dataset.path", isinstance(dataset["path"], str) and bool(dataset["path"]), "required for tudataset")
        check("dataset.name", isinstance(dataset["name"], str) and bool(dataset["name"]), "required for tudataset")
    target = dataset["target_class"]
    check("dataset.target_class", target == MIN_CLASS or (_is_int(target) and target >= 0), f"must be {MIN_CLASS!r} or a class index")
    synthetic = dataset["synthetic"]
    classes = synthetic["classes"]
    valid_classes = isinstance(classes, list) and len(classes) >= 2 and all(
        isinstance(entry, list) and len(entry) == 3 and _is_int(entry[0]) and entry[0] >= 1
        and _is_number(entry[1]) and 0.0 <= entry[1] <= 1.0 and _is_int(entry[2]) and entry[2] >= 0
        for entry in classes
    )
    check("dataset.synthetic.classes", valid_classes, "must list at least two [n_nodes, edge_prob, count] triples")
    check("dataset.synthetic.feature_dim", _is_int(synthetic["feature_dim"]) and synthetic["feature_dim"] >= 1, "must be >= 1")
    seed = synthetic["seed"]
    check("dataset.synthetic.seed", seed is None or (_is_int(seed) and seed >= 0), "must be null or a non-negative int")

    check("seed", _is_int(doc["seed"]) and doc["seed"] >= 0, "must be a non-negative int")
    check("attack.name", attack["name"] in list_attacks(), f"must be one of {', '.join(list_attacks())}")
    baselines = attack["baselines"]
    check(
        "attack.baselines",
        isinstance(baselines, list) and all(name in list_attacks() for name in baselines),
        f"entries must be among {', '.join(list_attacks())}",
    )
    check("attack.budget", _is_int(attack["budget"]) and attack["budget"] >= 0, "must be >= 0")
    check("attack.poison_rate", _is_number(attack["poison_rate"]) and 0.0 < attack["poison_rate"] <= 1.0, "must be in (0, 1]")
    check("attack.trigger_size", _is_int(attack["trigger_size"]) and attack["trigger_size"] >= 2, "must be >= 2")
    check(
        "attack.trigger_density",
        _is_number(attack["trigger_density"]) and 0.0 <= attack["trigger_density"] <= 1.0,
        "must be in [0, 1]",
    )
    check("attack.surrogate_widths", _positive_int_list(attack["surrogate_widths"]), "must be a non-empty list of positive ints")

    victims = model["victims"]
    check(
        "model.victims",
        isinstance(victims, list) and bool(victims) and all(isinstance(v, str) and v.upper() in ARCHITECTURES for v in victims),
        f"entries must be among {', '.join(ARCHITECTURES)}",
    )
    check("model.layer_widths", _positive_int_list(model["layer_widths"]), "must be a non-empty list of positive ints")
    check("model.gat_heads", _is_int(model["gat_heads"]) and model["gat_heads"] >= 1, "must be >= 1")

    check("train.lr", _is_number(train["lr"]) and train["lr"] > 0, "must be > 0")
    check("train.weight_decay", _is_number(train["weight_decay"]) and train["weight_decay"] >= 0, "must be >= 0")
    for name in ("beta1", "beta2"):
        check(f"train.{name}", _is_number(train[name]) and 0.0 <= train[name] < 1.0, "must be in [0, 1)")
    check("train.eps", _is_number(train["eps"]) and train["eps"] > 0, "must be > 0")
    check("train.batch_size", _is_int(train["batch_size"]) and train["batch_size"] >= 1, "must be >= 1")
    check("train.epochs", _is_int(train["epochs"]) and train["epochs"] >= 0, "must be >= 0")

    check(
        "defense.subsample_ratio",
        _is_number(defense["subsample_ratio"]) and 0.0 <= defense["subsample_ratio"] <= 1.0,
        "must be in [0, 1]",
    )
    check("defense.num_views", _is_int(defense["num_views"]) and defense["num_views"] >= 1, "must be >= 1")

    check("harness.experiment", harness["experiment"] in EXPERIMENTS, f"must be one of {', '.join(EXPERIMENTS)}")
    check("harness.num_seeds", _is_int(harness["num_seeds"]) and harness["num_seeds"] >= 1, "must be >= 1")
    jobs = harness["jobs"]
    check("harness.jobs", jobs is None or (_is_int(jobs) and jobs >= 1), "must be null or >= 1")
    rates = harness["rates"]
    check(
        "harness.rates",
        isinstance(rates, list) and bool(rates) and all(_is_number(rate) and 0.0 < rate <= 1.0 for rate in rates),
        "must be a non-empty list of values in (0, 1]",
    )
    budgets = harness["budgets"]
    check(
        "harness.budgets",
        isinstance(budgets, list) and bool(budgets) and all(_is_int(budget) and budget >= 0 for budget in budgets),
        "must be a non-empty list of non-negative ints",
    )
    check("harness.structure_widths", _positive_int_list(harness["structure_widths"]), "must be a non-empty list of positive ints")


def resolve_document(raw: dict[str, Any], overrides: Sequence[str] = ()) -> dict[str, Any]:
    """Defaults, then the file, then overrides; concrete values for every key or a ConfigError."""
    diagnostics = _Diagnostics()
    document = _merge(DEFAULTS, raw, "", diagnostics)
    document = apply_overrides(document, overrides, diagnostics)
    diagnostics.raise_if_any("invalid configuration")
    _check_types(DEFAULTS, document, "", diagnostics)
    diagnostics.raise_if_any("invalid configuration")
    _check_ranges(document, diagnostics)
    diagnostics.raise_if_any("invalid configuration")

    synthetic = document["dataset"]["synthetic"]
    if synthetic["seed"] is None:
        synthetic["seed"] = derive_seed(document["seed"], "dataset")
    if document["harness"]["jobs"] is None:
        document["harness"]["jobs"] = os.cpu_count() or 1
    document["model"]["victims"] = [victim.upper() for victim in document["model"]["victims"]]
    return document


def build_run_config(document: dict[str, Any]) -> RunConfig:
    dataset, attack, model, train, defense, harness = (
        document["dataset"], document["attack"], document["model"], document["train"], document["defense"], document["harness"]
    )
    synthetic = dataset["synthetic"]
    source = DatasetSource(
        source=dataset["source"],
        path=dataset["path"],
        name=dataset["name"],
        classes=tuple(ClassSpec(int(n), float(p), int(count)) for n, p, count in synthetic["classes"]),
        feature_dim=int(synthetic["feature_dim"]),
        synth_seed=int(synthetic["seed"]),
    )
    train_config = TrainConfig(
        lr=float(train["lr"]),
        weight_decay=float(train["weight_decay"]),
        beta1=float(train["beta1"]),
        beta2=float(train["beta2"]),
        eps=float(train["eps"]),
        batch_size=int(train["batch_size"]),
        epochs=int(train["epochs"]),
    )
    rate = float(attack["poison_rate"])
    setup = ExperimentSetup(
        attack=attack["name"],
        attack_settings=AttackSettings(
            budget=int(attack["budget"]),
            trigger_size=int(attack["trigger_size"]),
            trigger_density=float(attack["trigger_density"]),
            sequential=bool(attack["sequential"]),
            surrogate_widths=tuple(attack["surrogate_widths"]),
            surrogate_train=train_config,
        ),
        baselines=tuple(attack["baselines"]),
        victims=tuple(model["victims"]),
        model=ModelConfig(layer_widths=tuple(model["layer_widths"]), gat_heads=int(model["gat_heads"])),
        train=train_config,
        defense=DefenseConfig(subsample_ratio=float(defense["subsample_ratio"]), num_views=int(defense["num_views"])),
        target_class=None if dataset["target_class"] == MIN_CLASS else int(dataset["target_class"]),
        # the canonical rate keeps the 70/20/10 split as drawn
        poison_rate=None if rate == CANONICAL_POISON_RATE else rate,
        seed=int(document["seed"]),
        num_seeds=int(harness["num_seeds"]),
        jobs=int(harness["jobs"]),
        record_timing=bool(harness["record_timing"]),
        rates=tuple(float(value) for value in harness["rates"]),
        budgets=tuple(int(value) for value in harness["budgets"]),
        structure_widths=tuple(harness["structure_widths"]),
    )
    return RunConfig(
        seed=int(document["seed"]),
        output_dir=str(document["output_dir"]),
        experiment=harness["experiment"],
        dataset=source,
        setup=setup,
        document=document,
    )


def resolve_config(path: Optional[str | Path] = None, overrides: Sequence[str] = ()) -> RunConfig:
    return build_run_config(resolve_document(load_config_file(path), overrides))


__all__ = [
    "CANONICAL_POISON_RATE",
    "DEFAULTS",
    "DatasetSource",
    "MANIFEST_FORMAT",
    "MIN_CLASS",
    "RunConfig",
    "apply_overrides",
    "build_run_config",
    "load_config_file",
    "parse_override",
    "resolve_config",
    "resolve_document",
]
