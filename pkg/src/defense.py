"""Randomized edge-subsampling defense: thinned structures in training, majority vote at inference."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence, TextIO

import numpy as np

from .gnn import ModelConfig, ModelState, TrainConfig, predict, train
from .graphdata import Graph
from .seeding import derive_seed

DEFAULT_SUBSAMPLE_RATIO = 0.10
DEFAULT_NUM_VIEWS = 10


@dataclass(frozen=True)
class DefenseConfig:
    subsample_ratio: float = DEFAULT_SUBSAMPLE_RATIO
    num_views: int = DEFAULT_NUM_VIEWS
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.subsample_ratio <= 1.0:
            raise ValueError(f"subsample_ratio must be in [0, 1], got {self.subsample_ratio}")
        if self.num_views < 1:
            raise ValueError(f"num_views must be at least 1, got {self.num_views}")

    def with_seed(self, seed: int) -> "DefenseConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> dict[str, Any]:
        return {"subsample_ratio": self.subsample_ratio, "num_views": self.num_views, "seed": self.seed}


def subsample_view(g: Graph, beta: float, seed: int) -> Graph:
    """Drop each existing undirected edge independently with probability ``beta``."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"subsample ratio must be in [0, 1], got {beta}")
    rows, cols = np.nonzero(np.triu(g.adjacency, k=1))
    drop = np.random.default_rng(seed).random(len(rows)) < beta
    adjacency = g.adjacency.copy()
    adjacency[rows[drop], cols[drop]] = 0.0
    adjacency[cols[drop], rows[drop]] = 0.0
    return g.with_adjacency(adjacency)


def train_subsampled(
    graphs: Sequence[Graph],
    config: ModelConfig,
    tcfg: TrainConfig,
    dcfg: DefenseConfig,
    *,
    log_stream: Optional[TextIO] = None,
) -> ModelState:
    def fresh_view(graph: Graph, epoch: int, position: int) -> Graph:
        return subsample_view(graph, dcfg.subsample_ratio, derive_seed(dcfg.seed, "train-view", epoch, position))

    return train(graphs, config, tcfg, transform=fresh_view, log_stream=log_stream)


def vote(labels: Sequence[int], num_classes: int) -> int:
    # argmax of the counts: ties go to the smallest label
    return int(np.argmax(np.bincount(np.asarray(labels, dtype=np.int64), minlength=num_classes)))


def predict_voted(state: ModelState, g: Graph, dcfg: DefenseConfig) -> int:
    labels = [
        predict(state, subsample_view(g, dcfg.subsample_ratio, derive_seed(dcfg.seed, "vote-view", g.id, view)))
        for view in range(dcfg.num_views)
    ]
    return vote(labels, state.config.num_classes)


__all__ = [
    "DefenseConfig",
    "predict_voted",
    "subsample_view",
    "train_subsampled",
    "vote",
]
