from __future__ import annotations

from typing import Optional, TextIO

import numpy as np

from ..errors import AttackError
from ..graphdata import Dataset, SplitPlan, flip_edges
from ..io_helpers import log_line
from ..seeding import make_rng
from .base import BackdoorAttack, PoisonPlan, PoisonResult, relabeled_candidates


def random_flips(rng: np.random.Generator, n: int, budget: int) -> list[tuple[int, int]]:
    rows, cols = np.triu_indices(n, k=1)
    if budget < 0 or budget > len(rows):
        raise AttackError(f"budget {budget} exceeds the {len(rows)} node pairs of a {n}-node graph")
    picked = np.sort(rng.choice(len(rows), size=budget, replace=False))
    return [(int(rows[index]), int(cols[index])) for index in picked]


def random_flip_poison(
    d: Dataset,
    split: SplitPlan,
    y_t: int,
    budget: int,
    seed: int,
    *,
    log_stream: Optional[TextIO] = None,
) -> PoisonResult:
    """Control baseline: M uniformly random distinct pairs per candidate, same contract as TRAP."""
    poison_train, poison_test = relabeled_candidates(d, split, y_t)
    candidates = poison_train + poison_test
    flips = {graph.id: tuple(random_flips(make_rng(seed, "random-flip", graph.id), graph.num_nodes, budget)) for graph in candidates}
    poisoned = [flip_edges(graph, flips[graph.id]) for graph in candidates]
    if log_stream is not None:
        log_line("attack", f"flipped {budget} random pairs in {len(candidates)} candidates", log_stream)
    plan = PoisonPlan(
        attack="random",
        target_class=y_t,
        budget=budget,
        seed=seed,
        candidate_ids=tuple(graph.id for graph in candidates),
        flips=flips,
    )
    return PoisonResult(
        train_graphs=tuple(poisoned[:len(poison_train)]),
        test_graphs=tuple(poisoned[len(poison_train):]),
        plan=plan,
    )


class RandomFlipAttack(BackdoorAttack):
    name = "random"

    def poison(self, d: Dataset, split: SplitPlan, y_t: int, *, log_stream: Optional[TextIO] = None) -> PoisonResult:
        return random_flip_poison(d, split, y_t, self.settings.budget, self.settings.seed, log_stream=log_stream)


__all__ = ["RandomFlipAttack", "random_flip_poison", "random_flips"]
