from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..errors import DataError
from .graph import Dataset

TRAIN_PARTS = 7
TEST_PARTS = 2
PARTS = 10
MIN_GRAPHS = 10


@dataclass(frozen=True)
class SplitPlan:
    """70/20/10 partition; the 10% pool holds only non-target graphs and is halved."""

    seed: int
    target_class: int
    train_ids: tuple[int, ...]
    test_ids: tuple[int, ...]
    candidate_ids: tuple[int, ...]
    poison_train_ids: tuple[int, ...]
    poison_test_ids: tuple[int, ...]
    unused_ids: tuple[int, ...] = ()
    poison_rate: Optional[float] = None

    def with_poison_rate(self, rate: float) -> "SplitPlan":
        """Keep ``rate * |train|`` poisoned training graphs (at least one); the rest of that half is unused."""
        if not 0.0 < rate <= 1.0:
            raise DataError(f"poison rate must be in (0, 1], got {rate}")
        wanted = max(1, int(rate * len(self.train_ids) + 0.5))
        available = self.poison_train_ids + self.unused_ids
        if wanted > len(available):
            raise DataError(
                f"poison rate {rate} needs {wanted} poisoned training graphs but the candidate pool provides {len(available)}"
            )
        kept = available[:wanted]
        return replace(
            self,
            candidate_ids=kept + self.poison_test_ids,
            poison_train_ids=kept,
            unused_ids=available[wanted:],
            poison_rate=rate,
        )

    def to_dict(self) -> dict[str, object]:
        return {
            "seed": self.seed,
            "target_class": self.target_class,
            "train_ids": list(self.train_ids),
            "test_ids": list(self.test_ids),
            "candidate_ids": list(self.candidate_ids),
            "poison_train_ids": list(self.poison_train_ids),
            "poison_test_ids": list(self.poison_test_ids),
            "unused_ids": list(self.unused_ids),
            "poison_rate": self.poison_rate,
        }


def target_class(d: Dataset) -> int:
    """Least populated class; ties go to the smallest index."""
    if d.num_classes < 2:
        raise DataError(f"{d.name}: need at least two classes to pick a target class")
    return int(np.argmin(np.asarray(d.class_counts)))


def split(d: Dataset, y_t: int, seed: int) -> SplitPlan:
    n = len(d)
    if n < MIN_GRAPHS:
        raise DataError(f"{d.name}: need at least {MIN_GRAPHS} graphs to split, got {n}")
    if not 0 <= y_t < d.num_classes:
        raise DataError(f"{d.name}: target class {y_t} outside 0..{d.num_classes - 1}")
    n_train = n * TRAIN_PARTS // PARTS
    n_test = n * TEST_PARTS // PARTS
    n_pool = n - n_train - n_test

    order = np.random.default_rng(seed).permutation(n)
    shuffled = [d.graphs[index] for index in order]
    candidates = [graph.id for graph in shuffled if graph.label != y_t][:n_pool]
    if len(candidates) < n_pool:
        raise DataError(
            f"{d.name}: candidate pool needs {n_pool} graphs outside class {y_t}, only {len(candidates)} available"
        )
    chosen = set(candidates)
    rest = [graph.id for graph in shuffled if graph.id not in chosen]
    half = (n_pool + 1) // 2
    return SplitPlan(
        seed=seed,
        target_class=y_t,
        train_ids=tuple(rest[:n_train]),
        test_ids=tuple(rest[n_train:]),
        candidate_ids=tuple(candidates),
        poison_train_ids=tuple(candidates[:half]),
        poison_test_ids=tuple(candidates[half:]),
    )
