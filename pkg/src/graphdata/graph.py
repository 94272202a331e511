from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from ..errors import DataError
from ..numkit import Matrix, frozen


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph with dense adjacency, node features and a class label."""

    adjacency: Matrix
    features: Matrix
    label: int
    id: int

    def __post_init__(self) -> None:
        adjacency = np.array(self.adjacency, dtype=np.float64)
        features = np.array(self.features, dtype=np.float64)
        if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
            raise DataError(f"graph {self.id}: adjacency must be square, got shape {adjacency.shape}")
        n = adjacency.shape[0]
        if n < 1:
            raise DataError(f"graph {self.id}: needs at least one node")
        if features.ndim != 2 or features.shape[0] != n or features.shape[1] < 1:
            raise DataError(f"graph {self.id}: features must be {n}xd with d >= 1, got shape {features.shape}")
        if not np.all((adjacency == 0.0) | (adjacency == 1.0)):
            raise DataError(f"graph {self.id}: adjacency entries must be 0 or 1")
        if not np.array_equal(adjacency, adjacency.T):
            raise DataError(f"graph {self.id}: adjacency must be symmetric")
        if np.any(np.diag(adjacency) != 0.0):
            raise DataError(f"graph {self.id}: self-loops are not allowed")
        if not np.all(np.isfinite(features)):
            raise DataError(f"graph {self.id}: features must be finite")
        object.__setattr__(self, "adjacency", frozen(adjacency))
        object.__setattr__(self, "features", frozen(features))
        object.__setattr__(self, "label", int(self.label))
        object.__setattr__(self, "id", int(self.id))

    @property
    def num_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, k=1)))

    def edges(self) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(np.triu(self.adjacency, k=1))
        return [(int(u), int(v)) for u, v in zip(rows, cols)]

    def with_label(self, label: int) -> "Graph":
        return replace(self, label=label)

    def with_adjacency(self, adjacency: Matrix) -> "Graph":
        return replace(self, adjacency=adjacency)

    def same_as(self, other: "Graph") -> bool:
        return (
            self.id == other.id
            and self.label == other.label
            and np.array_equal(self.adjacency, other.adjacency)
            and np.array_equal(self.features, other.features)
        )


def flip_edge(g: Graph, u: int, v: int) -> Graph:
    return flip_edges(g, [(u, v)])


def flip_edges(g: Graph, pairs: Iterable[tuple[int, int]]) -> Graph:
    adjacency = np.array(g.adjacency)
    n = g.num_nodes
    for u, v in pairs:
        if u == v:
            raise DataError(f"graph {g.id}: cannot flip self-loop ({u}, {v})")
        if not (0 <= u < n and 0 <= v < n):
            raise DataError(f"graph {g.id}: node pair ({u}, {v}) out of range for {n} nodes")
        value = 1.0 - adjacency[u, v]
        adjacency[u, v] = value
        adjacency[v, u] = value
    return g.with_adjacency(adjacency)


def changed_pairs(before: Graph, after: Graph) -> list[tuple[int, int]]:
    rows, cols = np.nonzero(np.triu(before.adjacency != after.adjacency, k=1))
    return [(int(u), int(v)) for u, v in zip(rows, cols)]


@dataclass(frozen=True)
class Dataset:
    graphs: tuple[Graph, ...]
    num_classes: int
    name: str = "dataset"
    _by_id: dict[int, Graph] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        graphs = tuple(self.graphs)
        object.__setattr__(self, "graphs", graphs)
        if self.num_classes < 1:
            raise DataError(f"{self.name}: num_classes must be positive")
        by_id: dict[int, Graph] = {}
        for graph in graphs:
            if not 0 <= graph.label < self.num_classes:
                raise DataError(f"{self.name}: graph {graph.id} label {graph.label} outside 0..{self.num_classes - 1}")
            if graph.id in by_id:
                raise DataError(f"{self.name}: duplicate graph id {graph.id}")
            by_id[graph.id] = graph
        dims = {graph.feature_dim for graph in graphs}
        if len(dims) > 1:
            raise DataError(f"{self.name}: graphs disagree on feature dimension: {sorted(dims)}")
        object.__setattr__(self, "_by_id", by_id)

    def __len__(self) -> int:
        return len(self.graphs)

    @property
    def class_counts(self) -> tuple[int, ...]:
        counts = np.bincount([graph.label for graph in self.graphs], minlength=self.num_classes)
        return tuple(int(count) for count in counts)

    @property
    def feature_dim(self) -> int:
        if not self.graphs:
            raise DataError(f"{self.name}: empty dataset has no feature dimension")
        return self.graphs[0].feature_dim

    def get(self, graph_id: int) -> Graph:
        try:
            return self._by_id[graph_id]
        except KeyError:
            raise DataError(f"{self.name}: unknown graph id {graph_id}") from None

    def select(self, ids: Sequence[int]) -> list[Graph]:
        return [self.get(graph_id) for graph_id in ids]

    def summary(self, target: Optional[int] = None) -> dict[str, object]:
        nodes = [graph.num_nodes for graph in self.graphs]
        edges = [graph.num_edges for graph in self.graphs]
        payload: dict[str, object] = {
            "name": self.name,
            "num_graphs": len(self.graphs),
            "num_classes": self.num_classes,
            "class_counts": list(self.class_counts),
            "avg_nodes": float(np.mean(nodes)) if nodes else 0.0,
            "avg_edges": float(np.mean(edges)) if edges else 0.0,
            "feature_dim": self.feature_dim if self.graphs else None,
        }
        if target is not None:
            payload["target_class"] = target
        return payload
