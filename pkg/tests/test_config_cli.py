from __future__ import annotations

import json
from pathlib import Path

import pytest
import yaml

from src.cli.main import main
from src.cli.run import build_overrides
from src.config import MANIFEST_FORMAT, load_config_file, resolve_config, resolve_document
from src.errors import ConfigError, EXIT_CONFIG_ERROR, EXIT_DATA_ERROR

TINY_RUN = [
    "--set",
    "dataset.synthetic.classes=[[8, 0.2, 20], [8, 0.7, 20]]",
    "--set",
    "dataset.synthetic.feature_dim=3",
    "--set",
    "train.epochs=2",
    "--set",
    "train.batch_size=16",
    "--set",
    "harness.num_seeds=1",
    "--budget",
    "2",
    "--quiet",
]


def _diagnostic_paths(excinfo) -> list[str]:
    return [item["path"] for item in excinfo.value.diagnostics]


def _stdout_json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_empty_config_resolves_to_documented_defaults():
    config = resolve_config(None)

    setup = config.setup
    assert setup.model.layer_widths == (16, 8)
    assert setup.attack_settings.surrogate_widths == (16, 8)
    assert setup.attack_settings.budget == 5
    assert setup.poison_rate is None
    assert config.document["attack"]["poison_rate"] == 0.05
    assert setup.train.epochs == 50
    assert setup.train.lr == 0.02
    assert setup.num_seeds == 5
    assert config.experiment == "effectiveness"
    assert setup.jobs >= 1


def test_out_of_range_rate_is_reported_with_its_path():
    with pytest.raises(ConfigError) as excinfo:
        resolve_document({"attack": {"poison_rate": 1.5}})

    assert _diagnostic_paths(excinfo) == ["attack.poison_rate"]
    assert excinfo.value.exit_code == EXIT_CONFIG_ERROR


def test_unknown_key_is_rejected_by_name():
    with pytest.raises(ConfigError) as excinfo:
        resolve_document({"attack": {"triger_size": 4}})

    (diagnostic,) = excinfo.value.diagnostics
    assert diagnostic["path"] == "attack.triger_size"
    assert "triger_size" in diagnostic["message"]


def test_all_problems_are_collected_together():
    with pytest.raises(ConfigError) as excinfo:
        resolve_document({"train": {"epochs": -1, "lr": 0}, "model": {"victims": ["MLP"]}})

    assert sorted(_diagnostic_paths(excinfo)) == ["model.victims", "train.epochs", "train.lr"]


def test_type_mismatch_is_a_diagnostic():
    with pytest.raises(ConfigError) as excinfo:
        resolve_document({"attack": {"budget": "five"}})

    assert _diagnostic_paths(excinfo) == ["attack.budget"]


def test_dotted_overrides_replace_values():
    config = resolve_config(None, ["attack.budget=3", "model.victims=[\"gin\", \"gat\"]", "attack.name=subgraph"])

    assert config.setup.attack_settings.budget == 3
    assert config.setup.victims == ("GIN", "GAT")
    assert config.setup.attack == "subgraph"


def test_override_of_unknown_path_is_rejected():
    with pytest.raises(ConfigError) as excinfo:
        resolve_config(None, ["attack.nope=1"])

    assert _diagnostic_paths(excinfo) == ["attack.nope"]


def test_non_canonical_rate_is_carried_into_the_setup():
    config = resolve_config(None, ["attack.poison_rate=0.03"])

    assert config.setup.poison_rate == 0.03


def test_synthetic_seed_is_derived_from_experiment_seed():
    first = resolve_document({"seed": 4})
    second = resolve_document({"seed": 4})
    other = resolve_document({"seed": 5})

    assert first["dataset"]["synthetic"]["seed"] == second["dataset"]["synthetic"]["seed"]
    assert first["dataset"]["synthetic"]["seed"] != other["dataset"]["synthetic"]["seed"]


def test_build_overrides_turns_shorthands_into_json_values():
    overrides = build_overrides(["train.epochs=3"], seed=7, out="runs/x", budget=0, timing=True)

    assert overrides == [
        "train.epochs=3",
        "seed=7",
        'output_dir="runs/x"',
        "attack.budget=0",
        "harness.record_timing=true",
    ]


def test_manifest_is_accepted_as_config(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"format": MANIFEST_FORMAT, "config": {"seed": 9}}), encoding="utf-8")

    assert load_config_file(manifest) == {"seed": 9}
    assert resolve_config(manifest).seed == 9


def test_malformed_config_file_is_a_config_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")

    with pytest.raises(ConfigError):
        load_config_file(path)


def test_validate_prints_resolved_yaml(capsys):
    exit_code = main(["validate", "--format", "yaml", "--set", "attack.budget=2"])

    document = yaml.safe_load(capsys.readouterr().out)
    assert exit_code == 0
    assert document["attack"]["budget"] == 2
    assert document["model"]["layer_widths"] == [16, 8]


def test_validate_prints_toml_without_nulls(capsys):
    exit_code = main(["validate", "--format", "toml"])

    output = capsys.readouterr().out
    assert exit_code == 0
    assert "epochs = 50" in output
    assert "path =" not in output


def test_validate_reports_config_errors_as_json(capsys):
    exit_code = main(["validate", "--set", "attack.poison_rate=1.5"])

    payload = _stdout_json(capsys)
    assert exit_code == EXIT_CONFIG_ERROR
    assert payload["ok"] is False
    assert payload["diagnostics"][0]["path"] == "attack.poison_rate"


def test_missing_dataset_directory_exits_with_data_error_and_no_outputs(tmp_path, capsys):
    out_dir = tmp_path / "out"

    exit_code = main(
        [
            "run",
            "--set",
            "dataset.source=tudataset",
            "--set",
            f"dataset.path={json.dumps(str(tmp_path / 'missing'))}",
            "--set",
            "dataset.name=MUTAG",
            "--out",
            str(out_dir),
            "--quiet",
        ]
    )

    payload = _stdout_json(capsys)
    assert exit_code == EXIT_DATA_ERROR
    assert payload["error_type"] == "ParseError"
    assert not out_dir.exists()
    assert list(tmp_path.iterdir()) == []


def test_synth_then_ingest_round_trip(tmp_path, capsys):
    out_dir = tmp_path / "synthetic"

    assert main(["synth", "--out", str(out_dir), "--class", "6,0.3,5", "--class", "6,0.8,7", "--quiet"]) == 0
    synth_payload = _stdout_json(capsys)
    assert main(["ingest", str(out_dir), "--name", "synthetic", "--quiet"]) == 0
    ingest_payload = _stdout_json(capsys)

    assert synth_payload["class_counts"] == ingest_payload["class_counts"] == [5, 7]
    assert ingest_payload["target_class"] == 0


def test_synth_rejects_malformed_class_spec(capsys):
    assert main(["synth", "--out", "unused", "--class", "6,0.3"]) == EXIT_CONFIG_ERROR
    assert _stdout_json(capsys)["error_type"] == "ConfigError"


def test_run_writes_reports_checkpoints_and_manifest(tmp_path, capsys):
    out_dir = tmp_path / "run"

    exit_code = main(["run", *TINY_RUN, "--seed", "7", "--out", str(out_dir)])

    payload = _stdout_json(capsys)
    assert exit_code == 0
    assert payload["ok"] is True
    assert Path(payload["output_dir"]) == out_dir.resolve()
    for name in ("report.json", "report.csv", "manifest.json", "checkpoints/surrogate.json"):
        assert (out_dir / name).is_file(), name
    assert (out_dir / "checkpoints" / "backdoored-GCN-16-8.json").is_file()
    assert (out_dir / "checkpoints" / "clean-GCN-16-8.json").is_file()
    assert (out_dir / "poisoned" / "train" / "synthetic_poisoned_train_graph_labels.txt").is_file()
    manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["format"] == MANIFEST_FORMAT
    assert manifest["config"]["seed"] == 7
    sidecar = json.loads((out_dir / "poisoned" / "poisoned.json").read_text(encoding="utf-8"))
    assert sidecar["plan"]["M"] == 2
    assert sidecar["plan"]["surrogate_checkpoint"] == "checkpoints/surrogate.json"


def test_run_twice_with_same_seed_gives_byte_identical_reports(tmp_path, capsys):
    first, second = tmp_path / "first", tmp_path / "second"

    assert main(["run", *TINY_RUN, "--seed", "7", "--out", str(first)]) == 0
    assert main(["run", *TINY_RUN, "--seed", "7", "--out", str(second), "--jobs", "3"]) == 0
    capsys.readouterr()

    for name in ("report.json", "report.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_run_manifest_reproduces_the_run(tmp_path, capsys):
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(["run", *TINY_RUN, "--seed", "2", "--out", str(first)]) == 0

    assert main(["run", "--config", str(first / "manifest.json"), "--out", str(second), "--quiet"]) == 0
    capsys.readouterr()

    assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()


def test_zero_budget_run_reports_label_only_poisoning(tmp_path, capsys):
    out_dir = tmp_path / "zero"

    assert main(["run", *TINY_RUN, "--budget", "0", "--attack", "trap", "--out", str(out_dir)]) == 0
    capsys.readouterr()

    report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
    sidecar = json.loads((out_dir / "poisoned" / "poisoned.json").read_text(encoding="utf-8"))
    assert all(0.0 <= record["asr"] <= 1.0 for record in report["records"])
    assert all(pairs == [] for pairs in sidecar["plan"]["flips"].values())


def test_report_select_filters_stored_records(tmp_path, capsys):
    out_dir = tmp_path / "run"
    assert main(["run", *TINY_RUN, "--set", "model.victims=[\"GCN\", \"GIN\"]", "--experiment", "transfer", "--out", str(out_dir)]) == 0
    capsys.readouterr()

    assert main(["report", str(out_dir), "--select", "$.records[?@.victim == 'GIN']"]) == 0
    payload = _stdout_json(capsys)
    assert main(["report", str(out_dir), "--select", "$.records[?@.victim == 'GIN']", "--format", "csv"]) == 0
    csv_lines = capsys.readouterr().out.splitlines()

    assert [match["victim"] for match in payload["matches"]] == ["GIN"]
    assert csv_lines[0].startswith("dataset,attack,victim,widths,seed")
    assert len(csv_lines) == 2


def test_report_on_missing_file_is_a_data_error(tmp_path, capsys):
    assert main(["report", str(tmp_path / "nothing.json")]) == EXIT_DATA_ERROR
    assert _stdout_json(capsys)["ok"] is False
