from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, TextIO

from ..errors import AttackError
from ..gnn import ModelState, TrainConfig
from ..gnn.config import DEFAULT_LAYER_WIDTHS
from ..graphdata import Dataset, Graph, SplitPlan

__all__ = [
    "AttackSettings",
    "BackdoorAttack",
    "PoisonPlan",
    "PoisonResult",
    "relabeled_candidates",
]

FlipList = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class AttackSettings:
    budget: int = 5
    trigger_size: int = 5
    trigger_density: float = 0.8
    sequential: bool = False
    seed: int = 0
    surrogate_widths: tuple[int, ...] = DEFAULT_LAYER_WIDTHS
    surrogate_train: TrainConfig = field(default_factory=TrainConfig)
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise AttackError(f"budget must be non-negative, got {self.budget}")


@dataclass(frozen=True)
class PoisonPlan:
    """What an attack did: the candidates, the target class and each graph's flipped pairs."""

    attack: str
    target_class: int
    budget: int
    seed: int
    candidate_ids: tuple[int, ...]
    flips: Mapping[int, FlipList]
    surrogate: Optional[dict[str, Any]] = None
    surrogate_checkpoint: Optional[str] = None
    trigger: Optional[dict[str, Any]] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "attack": self.attack,
            "y_t": self.target_class,
            "M": self.budget,
            "seed": self.seed,
            "candidate_ids": list(self.candidate_ids),
            "surrogate": self.surrogate,
            "surrogate_checkpoint": self.surrogate_checkpoint,
            "trigger": self.trigger,
            "flips": {str(graph_id): [list(pair) for pair in pairs] for graph_id, pairs in self.flips.items()},
        }


@dataclass(frozen=True)
class PoisonResult:
    train_graphs: tuple[Graph, ...]
    test_graphs: tuple[Graph, ...]
    plan: PoisonPlan
    surrogate_state: Optional[ModelState] = None


def relabeled_candidates(d: Dataset, split: SplitPlan, y_t: int) -> tuple[list[Graph], list[Graph]]:
    if split.target_class != y_t:
        raise AttackError(f"split was computed for target class {split.target_class}, not {y_t}")
    halves: list[list[Graph]] = []
    for ids in (split.poison_train_ids, split.poison_test_ids):
        graphs = []
        for graph in d.select(ids):
            if graph.label == y_t:
                raise AttackError(f"candidate graph {graph.id} already belongs to target class {y_t}")
            graphs.append(graph.with_label(y_t))
        halves.append(graphs)
    return halves[0], halves[1]


class BackdoorAttack(abc.ABC):
    name: str

    def __init__(self, settings: Optional[AttackSettings] = None) -> None:
        self.settings = settings or AttackSettings()

    @abc.abstractmethod
    def poison(self, d: Dataset, split: SplitPlan, y_t: int, *, log_stream: Optional[TextIO] = None) -> PoisonResult:
        ...
