from __future__ import annotations

from typing import Callable, Optional, Sequence

from ..errors import HarnessError
from ..gnn import ModelState, predict
from ..graphdata import Graph

Predictor = Callable[[ModelState, Graph], int]


def asr(backdoored: ModelState, poisoned_test: Sequence[Graph], y_t: int, *, predictor: Optional[Predictor] = None) -> float:
    """Fraction of trigger-embedded test graphs classified as ``y_t``."""
    if not poisoned_test:
        raise HarnessError("cannot compute ASR on an empty poisoned test set")
    predictor = predictor or predict
    for graph in poisoned_test:
        if graph.label != y_t:
            raise HarnessError(f"poisoned test graph {graph.id} is labeled {graph.label}, expected {y_t}")
    return sum(1 for graph in poisoned_test if predictor(backdoored, graph) == y_t) / len(poisoned_test)


def accuracy_with(state: ModelState, graphs: Sequence[Graph], *, predictor: Optional[Predictor] = None) -> float:
    if not graphs:
        raise HarnessError("cannot compute accuracy on an empty test set")
    predictor = predictor or predict
    return sum(1 for graph in graphs if predictor(state, graph) == graph.label) / len(graphs)


def cad(clean_acc: float, backdoor_acc: float) -> float:
    """Clean accuracy drop; negative when the backdoored model is more accurate."""
    return clean_acc - backdoor_acc


__all__ = ["Predictor", "accuracy_with", "asr", "cad"]
