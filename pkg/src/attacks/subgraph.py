"""Subgraph backdoor baseline: one Erdős–Rényi trigger implanted into every candidate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, TextIO

import numpy as np

from ..errors import AttackError
from ..graphdata import Dataset, Graph, SplitPlan, changed_pairs
from ..graphdata.synth import erdos_renyi_adjacency
from ..io_helpers import log_line
from ..numkit import Matrix, frozen
from ..seeding import derive_seed
from .base import BackdoorAttack, PoisonPlan, PoisonResult, relabeled_candidates


@dataclass(frozen=True, eq=False)
class SubgraphTrigger:
    size: int
    density: float
    adjacency: Matrix
    seed: int

    def __post_init__(self) -> None:
        adjacency = np.asarray(self.adjacency, dtype=np.float64)
        if adjacency.shape != (self.size, self.size):
            raise AttackError(f"trigger adjacency must be {self.size}x{self.size}, got {adjacency.shape}")
        if not np.array_equal(adjacency, adjacency.T) or np.any(np.diag(adjacency) != 0):
            raise AttackError("trigger adjacency must be symmetric with a zero diagonal")
        object.__setattr__(self, "adjacency", frozen(adjacency))

    @property
    def num_edges(self) -> int:
        return int(np.triu(self.adjacency, k=1).sum())

    def restricted(self, n: int) -> "SubgraphTrigger":
        """Induced trigger on its first ``n`` nodes."""
        return SubgraphTrigger(size=n, density=self.density, adjacency=self.adjacency[:n, :n].copy(), seed=self.seed)

    def to_dict(self) -> dict[str, Any]:
        rows, cols = np.nonzero(np.triu(self.adjacency, k=1))
        return {
            "size": self.size,
            "density": self.density,
            "seed": self.seed,
            "edges": [[int(u), int(v)] for u, v in zip(rows, cols)],
        }


def er_subgraph_trigger(t: int, rho: float, seed: int) -> SubgraphTrigger:
    if t < 2:
        raise AttackError(f"trigger size must be at least 2, got {t}")
    if not 0.0 <= rho <= 1.0:
        raise AttackError(f"trigger density must be in [0, 1], got {rho}")
    adjacency = erdos_renyi_adjacency(np.random.default_rng(seed), t, rho)
    return SubgraphTrigger(size=t, density=rho, adjacency=adjacency, seed=seed)


def implant_subgraph(g: Graph, trig: SubgraphTrigger, seed: int) -> Graph:
    """Overwrite the induced adjacency of ``trig.size`` uniformly chosen host nodes."""
    if g.num_nodes < trig.size:
        raise AttackError(f"graph {g.id} has {g.num_nodes} nodes, trigger needs {trig.size}")
    hosts = np.random.default_rng(seed).choice(g.num_nodes, size=trig.size, replace=False)
    adjacency = g.adjacency.copy()
    adjacency[np.ix_(hosts, hosts)] = trig.adjacency
    return g.with_adjacency(adjacency)


def subgraph_poison(
    d: Dataset,
    split: SplitPlan,
    y_t: int,
    trigger: SubgraphTrigger,
    seed: int,
    *,
    log_stream: Optional[TextIO] = None,
) -> PoisonResult:
    poison_train, poison_test = relabeled_candidates(d, split, y_t)
    candidates = poison_train + poison_test
    poisoned: list[Graph] = []
    flips: dict[int, tuple[tuple[int, int], ...]] = {}
    truncated = 0
    for graph in candidates:
        trig = trigger
        if graph.num_nodes < trigger.size:
            # too small for the full trigger
            trig = trigger.restricted(graph.num_nodes)
            truncated += 1
        implanted = implant_subgraph(graph, trig, derive_seed(seed, "implant", graph.id))
        poisoned.append(implanted)
        flips[graph.id] = tuple(changed_pairs(graph, implanted))
    if log_stream is not None:
        log_line(
            "attack",
            f"implanted a {trigger.size}-node trigger into {len(candidates)} candidates ({truncated} truncated)",
            log_stream,
        )
    plan = PoisonPlan(
        attack="subgraph",
        target_class=y_t,
        budget=trigger.num_edges,
        seed=seed,
        candidate_ids=tuple(graph.id for graph in candidates),
        flips=flips,
        trigger=trigger.to_dict(),
    )
    return PoisonResult(
        train_graphs=tuple(poisoned[:len(poison_train)]),
        test_graphs=tuple(poisoned[len(poison_train):]),
        plan=plan,
    )


class SubgraphAttack(BackdoorAttack):
    name = "subgraph"

    def poison(self, d: Dataset, split: SplitPlan, y_t: int, *, log_stream: Optional[TextIO] = None) -> PoisonResult:
        settings = self.settings
        trigger = er_subgraph_trigger(
            settings.trigger_size,
            settings.trigger_density,
            derive_seed(settings.seed, "trigger"),
        )
        return subgraph_poison(d, split, y_t, trigger, settings.seed, log_stream=log_stream)


__all__ = [
    "SubgraphAttack",
    "SubgraphTrigger",
    "er_subgraph_trigger",
    "implant_subgraph",
    "subgraph_poison",
]
