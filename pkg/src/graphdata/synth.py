from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DataError
from .graph import Dataset, Graph


@dataclass(frozen=True)
class ClassSpec:
    n_nodes: int
    edge_prob: float
    count: int


CANONICAL_CLASSES = (ClassSpec(12, 0.2, 60), ClassSpec(12, 0.6, 60))
CANONICAL_FEATURE_DIM = 4


def erdos_renyi_adjacency(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    """G(n, p): each of the n(n-1)/2 pairs is an edge independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise DataError(f"edge probability must be in [0, 1], got {p}")
    if n < 1:
        raise DataError(f"need at least one node, got {n}")
    upper = np.triu(rng.random((n, n)) < p, k=1)
    return (upper | upper.T).astype(np.float64)


def synth_dataset(
    classes: Sequence[ClassSpec | tuple[int, float, int]],
    feature_dim: int,
    seed: int,
    *,
    name: str = "synthetic",
) -> Dataset:
    specs = [spec if isinstance(spec, ClassSpec) else ClassSpec(*spec) for spec in classes]
    if len(specs) < 2:
        raise DataError(f"need at least two classes, got {len(specs)}")
    if feature_dim < 1:
        raise DataError(f"feature_dim must be positive, got {feature_dim}")
    rng = np.random.default_rng(seed)
    graphs: list[Graph] = []
    for label, spec in enumerate(specs):
        if spec.count < 0:
            raise DataError(f"class {label}: count must be non-negative")
        for _ in range(spec.count):
            adjacency = erdos_renyi_adjacency(rng, spec.n_nodes, spec.edge_prob)
            features = rng.standard_normal((spec.n_nodes, feature_dim))
            graphs.append(Graph(adjacency=adjacency, features=features, label=label, id=len(graphs)))
    return Dataset(graphs=tuple(graphs), num_classes=len(specs), name=name)


def canonical_dataset(seed: int = 0) -> Dataset:
    return synth_dataset(CANONICAL_CLASSES, CANONICAL_FEATURE_DIM, seed, name="synthetic")
