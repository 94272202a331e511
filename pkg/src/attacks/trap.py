"""Perturbation-trigger backdoor: surrogate GCN gradient, score matrix, greedy edge flips."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, TextIO

import numpy as np

from ..errors import AttackError, ShapeError, UnsupportedOperationError
from ..gnn import ModelConfig, ModelState, TrainConfig, backward, forward, train
from ..graphdata import Dataset, Graph, SplitPlan, flip_edge, flip_edges
from ..io_helpers import log_line
from ..numkit import Matrix
from .base import AttackSettings, BackdoorAttack, PoisonPlan, PoisonResult, relabeled_candidates


def attack_gradient(surrogate: ModelState, g: Graph, y_t: int) -> Matrix:
    """dL/dA of the cross-entropy toward ``y_t``, symmetric with a zero diagonal."""
    if surrogate.config.arch != "GCN":
        raise UnsupportedOperationError(f"surrogate must be a GCN, got {surrogate.config.arch}")
    if g.num_nodes == 1:
        return np.zeros((1, 1))
    return backward(forward(surrogate, g), y_t, want_adjacency_grad=True).adjacency


def score_matrix(grad: Matrix, adjacency: Matrix) -> Matrix:
    """S = grad ⊙ (2A − 1); the diagonal is −inf so self-loops are never selected."""
    if grad.shape != adjacency.shape or grad.ndim != 2 or grad.shape[0] != grad.shape[1]:
        raise ShapeError(f"score_matrix needs equal square shapes, got {grad.shape} and {adjacency.shape}")
    scores = grad * (2.0 * adjacency - 1.0)
    np.fill_diagonal(scores, -np.inf)
    return scores


def max_pairs(n: int) -> int:
    return n * (n - 1) // 2


def select_perturbations(scores: Matrix, budget: int) -> list[tuple[int, int]]:
    """The ``budget`` pairs u < v with the largest scores; ties keep lexicographic (u, v) order."""
    n = scores.shape[0]
    if budget < 0 or budget > max_pairs(n):
        raise AttackError(f"budget {budget} exceeds the {max_pairs(n)} node pairs of a {n}-node graph")
    rows, cols = np.triu_indices(n, k=1)
    order = np.argsort(-scores[rows, cols], kind="stable")[:budget]
    return [(int(rows[index]), int(cols[index])) for index in order]


def trigger_flips(
    surrogate: ModelState,
    g: Graph,
    y_t: int,
    budget: int,
    *,
    sequential: bool = False,
) -> list[tuple[int, int]]:
    """Pairs to flip in ``g``; ``g`` must already carry the label ``y_t``."""
    if budget == 0:
        return []
    if not sequential:
        return select_perturbations(score_matrix(attack_gradient(surrogate, g, y_t), g.adjacency), budget)

    if budget > max_pairs(g.num_nodes):
        raise AttackError(f"budget {budget} exceeds the {max_pairs(g.num_nodes)} node pairs of graph {g.id}")
    current = g
    chosen: list[tuple[int, int]] = []
    for _ in range(budget):
        scores = score_matrix(attack_gradient(surrogate, current, y_t), current.adjacency)
        for u, v in chosen:
            scores[u, v] = scores[v, u] = -np.inf
        pair = select_perturbations(scores, 1)[0]
        chosen.append(pair)
        current = flip_edge(current, *pair)
    return sorted(chosen)


def _embed_triggers(
    surrogate: ModelState,
    graphs: Sequence[Graph],
    y_t: int,
    budget: int,
    *,
    sequential: bool,
    jobs: int,
) -> list[tuple[Graph, list[tuple[int, int]]]]:
    def embed(graph: Graph) -> tuple[Graph, list[tuple[int, int]]]:
        pairs = trigger_flips(surrogate, graph, y_t, budget, sequential=sequential)
        return flip_edges(graph, pairs), pairs

    if jobs <= 1 or len(graphs) <= 1:
        return [embed(graph) for graph in graphs]
    with ThreadPoolExecutor(max_workers=min(len(graphs), jobs)) as executor:
        return list(executor.map(embed, graphs))


def trap_poison(
    d: Dataset,
    split: SplitPlan,
    y_t: int,
    budget: int,
    surrogate_config: ModelConfig,
    surrogate_train: TrainConfig,
    *,
    sequential: bool = False,
    jobs: int = 1,
    log_stream: Optional[TextIO] = None,
) -> PoisonResult:
    if surrogate_config.arch != "GCN":
        raise UnsupportedOperationError(f"surrogate must be a GCN, got {surrogate_config.arch}")
    poison_train, poison_test = relabeled_candidates(d, split, y_t)

    surrogate_set = d.select(split.train_ids) + poison_train
    if log_stream is not None:
        log_line("attack", f"training surrogate GCN on {len(surrogate_set)} graphs", log_stream)
    surrogate = train(surrogate_set, surrogate_config, surrogate_train)

    candidates = poison_train + poison_test
    embedded = _embed_triggers(surrogate, candidates, y_t, budget, sequential=sequential, jobs=jobs)
    if log_stream is not None:
        log_line("attack", f"embedded {budget}-flip triggers into {len(candidates)} candidates", log_stream)

    plan = PoisonPlan(
        attack="trap",
        target_class=y_t,
        budget=budget,
        seed=surrogate_train.seed,
        candidate_ids=tuple(graph.id for graph in candidates),
        flips={graph.id: tuple(pairs) for graph, (_, pairs) in zip(candidates, embedded)},
        surrogate={
            "model": surrogate_config.to_dict(),
            "train": surrogate_train.to_dict(),
            "sequential": sequential,
        },
    )
    poisoned = [graph for graph, _ in embedded]
    return PoisonResult(
        train_graphs=tuple(poisoned[:len(poison_train)]),
        test_graphs=tuple(poisoned[len(poison_train):]),
        plan=plan,
        surrogate_state=surrogate,
    )


class TrapAttack(BackdoorAttack):
    name = "trap"

    def poison(self, d: Dataset, split: SplitPlan, y_t: int, *, log_stream: Optional[TextIO] = None) -> PoisonResult:
        settings: AttackSettings = self.settings
        surrogate_config = ModelConfig(
            arch="GCN",
            input_dim=d.feature_dim,
            num_classes=d.num_classes,
            layer_widths=settings.surrogate_widths,
        )
        return trap_poison(
            d,
            split,
            y_t,
            settings.budget,
            surrogate_config,
            settings.surrogate_train,
            sequential=settings.sequential,
            jobs=settings.jobs,
            log_stream=log_stream,
        )


__all__ = [
    "TrapAttack",
    "attack_gradient",
    "score_matrix",
    "select_perturbations",
    "trap_poison",
    "trigger_flips",
]
