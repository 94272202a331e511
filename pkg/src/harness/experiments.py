"""Experiment grid: split, poison, train clean and backdoored victims from scratch, score every cell.

Cells are independent jobs; results are merged by cell key so the report never depends on
scheduling. Clean and backdoored victims of one cell share an init seed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import time
from typing import Callable, Hashable, Optional, Sequence, TextIO, TypeVar

from ..attacks import AttackSettings, PoisonResult, create_attack
from ..defense import DefenseConfig, predict_voted, train_subsampled
from ..errors import DataError, HarnessError
from ..gnn import ModelConfig, ModelState, TrainConfig, train
from ..graphdata import Dataset, Graph, SplitPlan, split, target_class
from ..io_helpers import log_line
from ..records import CellRecord, ExperimentReport, SweepValue
from ..seeding import derive_seed
from .metrics import accuracy_with, asr, cad

DEFAULT_RATES = (0.01, 0.03, 0.05, 0.07)
DEFAULT_BUDGETS = (1, 3, 5, 7)
STRUCTURE_WIDTHS = (32, 16)
TRANSFER_VICTIMS = ("GCN", "GIN", "GSAGE", "GAT")
EXPERIMENTS = ("effectiveness", "transfer", "structure", "rate", "budget", "defense")

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class ExperimentSetup:
    attack: str = "trap"
    attack_settings: AttackSettings = field(default_factory=AttackSettings)
    baselines: tuple[str, ...] = ()
    victims: tuple[str, ...] = ("GCN",)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    defense: DefenseConfig = field(default_factory=DefenseConfig)
    target_class: Optional[int] = None
    poison_rate: Optional[float] = None
    seed: int = 0
    num_seeds: int = 5
    jobs: int = 1
    record_timing: bool = False
    rates: tuple[float, ...] = DEFAULT_RATES
    budgets: tuple[int, ...] = DEFAULT_BUDGETS
    structure_widths: tuple[int, ...] = STRUCTURE_WIDTHS

    def run_seeds(self) -> list[int]:
        return [derive_seed(self.seed, "run", index) for index in range(self.num_seeds)]

    def attack_names(self) -> list[str]:
        names = [self.attack]
        names.extend(name for name in self.baselines if name not in names)
        return names


@dataclass(frozen=True)
class GridPoint:
    sweep_param: Optional[SweepValue]
    budget: int
    rate: Optional[float]
    defended: bool = False


@dataclass(frozen=True)
class Victim:
    arch: str
    widths: tuple[int, ...]


@dataclass(frozen=True)
class PoisonKey:
    attack: str
    seed: int
    rate: Optional[float]
    budget: int


@dataclass
class GridArtifacts:
    """Models and poisoned sets of one grid, kept when the caller wants to persist them."""

    poisons: dict[PoisonKey, tuple[SplitPlan, PoisonResult]] = field(default_factory=dict)
    clean_models: dict[tuple[int, Victim, bool], ModelState] = field(default_factory=dict)
    backdoored_models: dict[tuple[str, int, GridPoint, Victim], ModelState] = field(default_factory=dict)


def run_jobs(fn: Callable[[T], R], items: Sequence[T], jobs: int) -> list[R]:
    """Ordered map over a bounded thread pool."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(len(items), jobs)) as executor:
        return list(executor.map(fn, items))


def resolve_target_class(d: Dataset, override: Optional[int]) -> int:
    if override is None:
        return target_class(d)
    if not 0 <= override < d.num_classes:
        raise DataError(f"{d.name}: target class {override} outside 0..{d.num_classes - 1}")
    return override


def check_leakage(plan: SplitPlan, result: PoisonResult) -> None:
    trained = set(plan.train_ids) | {graph.id for graph in result.train_graphs}
    held_out = set(plan.test_ids) | {graph.id for graph in result.test_graphs}
    leaked = sorted(trained & held_out)
    if leaked:
        raise HarnessError(f"graphs {leaked} appear in both training and evaluation sets")


def training_seed(run_seed: int) -> int:
    """Init and shuffle seed shared by the surrogate and every victim of one run."""
    return derive_seed(run_seed, "train")


def _unique(keys: Sequence[Hashable]) -> list:
    return list(dict.fromkeys(keys))


def _run_grid(
    experiment: str,
    d: Dataset,
    attacks: Sequence[str],
    seeds: Sequence[int],
    setup: ExperimentSetup,
    points: Sequence[GridPoint],
    victims: Sequence[Victim],
    *,
    sweep_axis: Optional[str] = None,
    log_stream: Optional[TextIO] = None,
    collector: Optional[GridArtifacts] = None,
) -> ExperimentReport:
    if not seeds:
        raise HarnessError("an experiment needs at least one seed")
    started = time.perf_counter() if setup.record_timing else None
    y_t = resolve_target_class(d, setup.target_class)
    base_splits = {seed: split(d, y_t, derive_seed(seed, "split")) for seed in seeds}
    model_template = replace(setup.model, input_dim=d.feature_dim, num_classes=d.num_classes)

    def log(message: str) -> None:
        if log_stream is not None:
            log_line("harness", message, log_stream)

    def poison(key: PoisonKey) -> tuple[SplitPlan, PoisonResult]:
        plan = base_splits[key.seed]
        if key.rate is not None:
            plan = plan.with_poison_rate(key.rate)
        settings = replace(
            setup.attack_settings,
            budget=key.budget,
            seed=derive_seed(key.seed, "attack"),
            surrogate_train=setup.train.with_seed(training_seed(key.seed)),
            jobs=1,
        )
        result = create_attack(key.attack, settings).poison(d, plan, y_t)
        check_leakage(plan, result)
        log(f"{experiment}: poisoned with {key.attack} seed={key.seed} rate={key.rate} M={key.budget}")
        return plan, result

    def fit(graphs: Sequence[Graph], victim: Victim, seed: int, defended: bool) -> ModelState:
        config = model_template.with_arch(victim.arch, victim.widths)
        tcfg = setup.train.with_seed(training_seed(seed))
        if defended:
            return train_subsampled(graphs, config, tcfg, setup.defense.with_seed(derive_seed(seed, "defense")))
        return train(graphs, config, tcfg)

    def predictor(seed: int, defended: bool):
        if not defended:
            return None
        dcfg = setup.defense.with_seed(derive_seed(seed, "defense"))
        return lambda state, graph: predict_voted(state, graph, dcfg)

    poison_keys = _unique(
        [PoisonKey(attack, seed, point.rate, point.budget) for attack in attacks for seed in seeds for point in points]
    )
    poisoned = dict(zip(poison_keys, run_jobs(poison, poison_keys, setup.jobs)))

    clean_keys = _unique([(seed, victim, point.defended) for seed in seeds for victim in victims for point in points])

    def fit_clean(key: tuple[int, Victim, bool]) -> tuple[ModelState, float]:
        seed, victim, defended = key
        plan = base_splits[seed]
        state = fit(d.select(plan.train_ids), victim, seed, defended)
        test_graphs = d.select(plan.test_ids)
        return state, accuracy_with(state, test_graphs, predictor=predictor(seed, defended))

    clean = dict(zip(clean_keys, run_jobs(fit_clean, clean_keys, setup.jobs)))

    cells = [(attack, seed, point, victim) for attack in attacks for seed in seeds for point in points for victim in victims]

    def run_cell(cell: tuple[str, int, GridPoint, Victim]) -> tuple[CellRecord, ModelState]:
        attack, seed, point, victim = cell
        cell_started = time.perf_counter() if setup.record_timing else None
        plan, result = poisoned[PoisonKey(attack, seed, point.rate, point.budget)]
        training = d.select(plan.train_ids) + list(result.train_graphs)
        backdoored = fit(training, victim, seed, point.defended)
        pick = predictor(seed, point.defended)
        clean_acc = clean[(seed, victim, point.defended)][1]
        backdoor_acc = accuracy_with(backdoored, d.select(plan.test_ids), predictor=pick)
        attack_success = asr(backdoored, result.test_graphs, y_t, predictor=pick)
        log(f"{experiment}: {attack}/{victim.arch} seed={seed} sweep={point.sweep_param} asr={attack_success:.4f}")
        record = CellRecord(
            dataset=d.name,
            attack=attack,
            victim=victim.arch,
            widths=victim.widths,
            seed=seed,
            sweep_param=point.sweep_param,
            clean_accuracy=clean_acc,
            backdoor_accuracy=backdoor_acc,
            asr=attack_success,
            cad=cad(clean_acc, backdoor_acc),
            runtime_seconds=None if cell_started is None else time.perf_counter() - cell_started,
        )
        return record, backdoored

    outcomes = run_jobs(run_cell, cells, setup.jobs)
    records = [record for record, _ in outcomes]
    if collector is not None:
        collector.poisons.update(poisoned)
        collector.clean_models.update({key: state for key, (state, _) in clean.items()})
        collector.backdoored_models.update({cell: state for cell, (_, state) in zip(cells, outcomes)})
    settings = setup.attack_settings
    return ExperimentReport(
        experiment=experiment,
        dataset=d.name,
        target_class=y_t,
        attacks=list(attacks),
        surrogate={
            "arch": "GCN",
            "layer_widths": list(settings.surrogate_widths),
            "train": setup.train.to_dict(),
            "sequential": settings.sequential,
        },
        seeds=list(seeds),
        records=records,
        sweep_axis=sweep_axis,
        sweep_values=[point.sweep_param for point in points] if sweep_axis else [],
        wall_clock_seconds=None if started is None else time.perf_counter() - started,
    )


def _single_point(setup: ExperimentSetup) -> list[GridPoint]:
    return [GridPoint(sweep_param=None, budget=setup.attack_settings.budget, rate=setup.poison_rate)]


def run_effectiveness(
    d: Dataset,
    attack: str,
    seeds: Sequence[int],
    setup: Optional[ExperimentSetup] = None,
    *,
    log_stream: Optional[TextIO] = None,
    collector: Optional[GridArtifacts] = None,
) -> ExperimentReport:
    """Victim shares the surrogate's architecture (GCN) and widths."""
    setup = setup or ExperimentSetup(attack=attack)
    victims = [Victim("GCN", setup.attack_settings.surrogate_widths)]
    attacks = [attack] + [name for name in setup.baselines if name != attack]
    return _run_grid("effectiveness", d, attacks, seeds, setup, _single_point(setup), victims, log_stream=log_stream, collector=collector)


def run_transfer(
    d: Dataset,
    attack: str,
    victim_archs: Sequence[str],
    same_widths: bool,
    seeds: Sequence[int],
    setup: Optional[ExperimentSetup] = None,
    *,
    experiment: str = "transfer",
    log_stream: Optional[TextIO] = None,
    collector: Optional[GridArtifacts] = None,
) -> ExperimentReport:
    """One poisoned training set per seed, reused by every victim architecture."""
    setup = setup or ExperimentSetup(attack=attack)
    widths = setup.attack_settings.surrogate_widths if same_widths else setup.structure_widths
    victims = [Victim(arch.strip().upper(), tuple(widths)) for arch in victim_archs]
    attacks = [attack] + [name for name in setup.baselines if name != attack]
    return _run_grid(experiment, d, attacks, seeds, setup, _single_point(setup), victims, log_stream=log_stream, collector=collector)


def run_structure(
    d: Dataset,
    attack: str,
    victim_archs: Sequence[str],
    seeds: Sequence[int],
    setup: Optional[ExperimentSetup] = None,
    *,
    log_stream: Optional[TextIO] = None,
    collector: Optional[GridArtifacts] = None,
) -> ExperimentReport:
    return run_transfer(d, attack, victim_archs, False, seeds, setup, experiment="structure", log_stream=log_stream, collector=collector)


def run_rate_sweep(
    d: Dataset,
    rates: Sequence[float],
    seeds: Sequence[int],
    setup: Optional[ExperimentSetup] = None,
    *,
    log_stream: Optional[TextIO] = None,
    collector: Optional[GridArtifacts] = None,
) -> ExperimentReport:
    setup = setup or ExperimentSetup()
    points = [GridPoint(sweep_param=rate, budget=setup.attack_settings.budget, rate=rate) for rate in rates]
    victims = [Victim(arch, setup.model.layer_widths) for arch in setup.victims]
    return _run_grid(
        "rate", d, setup.attack_names(), seeds, setup, points, victims, sweep_axis="poison_rate", log_stream=log_stream,
        collector=collector,
    )


def run_budget_sweep(
    d: Dataset,
    budgets: Sequence[int],
    seeds: Sequence[int],
    setup: Optional[ExperimentSetup] = None,
    *,
    log_stream: Optional[TextIO] = None,
    collector: Optional[GridArtifacts] = None,
) -> ExperimentReport:
    setup = setup or ExperimentSetup()
    points = [GridPoint(sweep_param=budget, budget=budget, rate=setup.poison_rate) for budget in budgets]
    victims = [Victim(arch, setup.model.layer_widths) for arch in setup.victims]
    return _run_grid(
        "budget", d, setup.attack_names(), seeds, setup, points, victims, sweep_axis="budget", log_stream=log_stream,
        collector=collector,
    )


def run_defense(
    d: Dataset,
    dcfg: DefenseConfig,
    seeds: Sequence[int],
    setup: Optional[ExperimentSetup] = None,
    *,
    log_stream: Optional[TextIO] = None,
    collector: Optional[GridArtifacts] = None,
) -> ExperimentReport:
    """Undefended and defended cells side by side on the ``defense`` axis."""
    setup = replace(setup or ExperimentSetup(), defense=dcfg)
    budget = setup.attack_settings.budget
    points = [
        GridPoint(sweep_param="none", budget=budget, rate=setup.poison_rate, defended=False),
        GridPoint(sweep_param="subsampling", budget=budget, rate=setup.poison_rate, defended=True),
    ]
    victims = [Victim(arch, setup.model.layer_widths) for arch in setup.victims]
    return _run_grid(
        "defense", d, setup.attack_names(), seeds, setup, points, victims, sweep_axis="defense", log_stream=log_stream,
        collector=collector,
    )


def run_experiment(
    name: str,
    d: Dataset,
    setup: ExperimentSetup,
    *,
    log_stream: Optional[TextIO] = None,
    collector: Optional[GridArtifacts] = None,
) -> ExperimentReport:
    seeds = setup.run_seeds()
    key = name.strip().lower()
    if key == "effectiveness":
        return run_effectiveness(d, setup.attack, seeds, setup, log_stream=log_stream, collector=collector)
    if key == "transfer":
        return run_transfer(d, setup.attack, setup.victims, True, seeds, setup, log_stream=log_stream, collector=collector)
    if key == "structure":
        return run_structure(d, setup.attack, setup.victims, seeds, setup, log_stream=log_stream, collector=collector)
    if key == "rate":
        return run_rate_sweep(d, setup.rates, seeds, setup, log_stream=log_stream, collector=collector)
    if key == "budget":
        return run_budget_sweep(d, setup.budgets, seeds, setup, log_stream=log_stream, collector=collector)
    if key == "defense":
        return run_defense(d, setup.defense, seeds, setup, log_stream=log_stream, collector=collector)
    raise HarnessError(f"unknown experiment: {name}; available: {', '.join(EXPERIMENTS)}")


__all__ = [
    "DEFAULT_BUDGETS",
    "DEFAULT_RATES",
    "EXPERIMENTS",
    "ExperimentSetup",
    "GridArtifacts",
    "STRUCTURE_WIDTHS",
    "TRANSFER_VICTIMS",
    "check_leakage",
    "resolve_target_class",
    "run_budget_sweep",
    "run_defense",
    "run_effectiveness",
    "run_experiment",
    "run_jobs",
    "run_rate_sweep",
    "run_structure",
    "run_transfer",
    "training_seed",
]
