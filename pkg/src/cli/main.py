from __future__ import annotations

import argparse
import sys
import traceback

from ..errors import EXIT_RUNTIME_FAILURE, LabError
from ..harness import EXPERIMENTS
from ..io_helpers import emit_json
from .data import run_ingest_command, run_synth_command
from .report import run_report_command
from .run import build_overrides, run_experiment_command, run_validate_command


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Path to a JSON run config or a run manifest (optional)")
    parser.add_argument(
        "--set",
        dest="sets",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Dotted-path override, e.g. `--set attack.budget=3`. Values are parsed as JSON, else kept as text.",
    )
    parser.add_argument("--seed", type=int, help="Experiment seed; every other seed is derived from it")
    parser.add_argument("--jobs", type=int, help="Worker threads for the experiment grid (default: number of processors)")
    parser.add_argument("--out", help="Output directory (shorthand for `--set output_dir=...`)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gblab", description="Graph backdoor laboratory CLI")
    subparsers = parser.add_subparsers(dest="command", required=True)

    ingest = subparsers.add_parser(
        "ingest",
        help="Parse a TUDataset directory and print its summary",
        description="Parse a TUDataset directory and print its summary",
    )
    ingest.add_argument("path", help="Directory holding NAME_A.txt, NAME_graph_indicator.txt, ...")
    ingest.add_argument("--name", required=True, help="Dataset name, the file prefix inside the directory")
    ingest.add_argument("--target-class", type=int, help="Target class to report (default: the least populated class)")
    ingest.add_argument("--quiet", action="store_true", help="Suppress progress lines on stderr")
    ingest.set_defaults(handler=lambda args: run_ingest_command(args.path, args.name, args.target_class, args.quiet))

    synth = subparsers.add_parser(
        "synth",
        help="Generate an Erdős–Rényi dataset and write it in TUDataset format",
        description="Generate an Erdős–Rényi dataset and write it in TUDataset format",
    )
    synth.add_argument("--out", required=True, help="Output directory")
    synth.add_argument("--seed", type=int, default=0, help="Generator seed (default: 0)")
    synth.add_argument("--name", default="synthetic", help="Dataset name (default: synthetic)")
    synth.add_argument(
        "--class",
        dest="classes",
        action="append",
        default=[],
        metavar="N_NODES,EDGE_PROB,COUNT",
        help="One class per flag (repeatable). Omitted means two classes: 12,0.2,60 and 12,0.6,60.",
    )
    synth.add_argument("--feature-dim", type=int, help="Node feature dimension (default: 4)")
    synth.add_argument("--quiet", action="store_true", help="Suppress progress lines on stderr")
    synth.set_defaults(
        handler=lambda args: run_synth_command(args.out, args.seed, args.name, args.classes, args.feature_dim, args.quiet)
    )

    run = subparsers.add_parser(
        "run",
        help="Run an experiment and write reports, checkpoints and the poisoned export",
        description="Run an experiment and write reports, checkpoints and the poisoned export",
    )
    _add_config_arguments(run)
    run.add_argument("--experiment", choices=EXPERIMENTS, help="Override harness.experiment")
    run.add_argument("--attack", help="Override attack.name (trap, subgraph or random)")
    run.add_argument("--budget", type=int, help="Override attack.budget, the edge flips per graph")
    run.add_argument("--timing", action="store_true", help="Record runtimes; reports are no longer byte-identical")
    run.add_argument("--quiet", action="store_true", help="Suppress progress lines on stderr")
    run.set_defaults(
        handler=lambda args: run_experiment_command(
            args.config,
            build_overrides(
                args.sets,
                seed=args.seed,
                jobs=args.jobs,
                out=args.out,
                experiment=args.experiment,
                attack=args.attack,
                budget=args.budget,
                timing=args.timing,
            ),
            args.quiet,
        )
    )

    validate = subparsers.add_parser(
        "validate",
        help="Resolve a config against the defaults and print it without running",
        description="Resolve a config against the defaults and print it without running",
    )
    _add_config_arguments(validate)
    validate.add_argument(
        "--format",
        choices=("json", "yaml", "toml"),
        default="json",
        help="Output format for the resolved config (default: json).",
    )
    validate.set_defaults(
        handler=lambda args: run_validate_command(
            args.config,
            build_overrides(args.sets, seed=args.seed, jobs=args.jobs, out=args.out),
            args.format,
        )
    )

    report = subparsers.add_parser(
        "report",
        help="Re-emit a stored report, optionally filtered by a JSONPath query",
        description="Re-emit a stored report, optionally filtered by a JSONPath query",
    )
    report.add_argument("path", help="report.json, or a run output directory")
    report.add_argument("--select", help="JSONPath query, e.g. `$.records[?@.victim == 'GIN']`")
    report.add_argument(
        "--format",
        choices=("json", "csv"),
        default="json",
        help="Output format (default: json). CSV needs the query to match report records.",
    )
    report.set_defaults(handler=lambda args: run_report_command(args.path, args.select, args.format))

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = getattr(args, "handler", None)
    if not callable(handler):
        parser.print_help()
        return 1
    try:
        return handler(args)
    except LabError as exc:
        emit_json(exc.to_dict())
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        traceback.print_exc(file=sys.stderr)
        emit_json({"ok": False, "error": str(exc), "error_type": type(exc).__name__, "exit_code": EXIT_RUNTIME_FAILURE})
        return EXIT_RUNTIME_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
