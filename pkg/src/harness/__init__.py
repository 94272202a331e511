"""Metrics, the experiment grid and report emission."""

from .experiments import (
    DEFAULT_BUDGETS,
    DEFAULT_RATES,
    EXPERIMENTS,
    STRUCTURE_WIDTHS,
    TRANSFER_VICTIMS,
    ExperimentSetup,
    GridArtifacts,
    check_leakage,
    run_budget_sweep,
    run_defense,
    run_effectiveness,
    run_experiment,
    run_jobs,
    run_rate_sweep,
    run_structure,
    run_transfer,
    training_seed,
)
from .metrics import accuracy_with, asr, cad
from .report import CSV_COLUMNS, load_report, report_frame, write_report

__all__ = [
    "CSV_COLUMNS",
    "DEFAULT_BUDGETS",
    "DEFAULT_RATES",
    "EXPERIMENTS",
    "STRUCTURE_WIDTHS",
    "TRANSFER_VICTIMS",
    "ExperimentSetup",
    "GridArtifacts",
    "accuracy_with",
    "asr",
    "cad",
    "check_leakage",
    "load_report",
    "report_frame",
    "run_budget_sweep",
    "run_defense",
    "run_effectiveness",
    "run_experiment",
    "run_jobs",
    "run_rate_sweep",
    "run_structure",
    "run_transfer",
    "training_seed",
    "write_report",
]
