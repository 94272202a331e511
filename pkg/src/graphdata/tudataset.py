"""TUDataset flat-file reader and writer.

Directory ``DS/`` holds 1-indexed text files ``DS_A.txt`` (one ``i, j`` edge per line,
both directions present), ``DS_graph_indicator.txt``, ``DS_graph_labels.txt`` and the
optional ``DS_node_labels.txt`` / ``DS_node_attributes.txt``. The optional
``DS_graph_classes.txt`` lists one raw label per class in class-index order, so classes
with no graphs survive a round trip; without it the observed labels are indexed in
ascending order.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ParseError
from .graph import Dataset, Graph


def _file(directory: Path, name: str, suffix: str) -> Path:
    return directory / f"{name}_{suffix}.txt"


def _read_lines(path: Path) -> list[str]:
    lines = path.read_text(encoding="utf-8").splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            raise ParseError("unexpected blank line", path=str(path), line=number)
    return [line.strip() for line in lines]


def _parse_int(path: Path, number: int, text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ParseError(f"expected an integer, got {text.strip()!r}", path=str(path), line=number) from None


def _parse_float(path: Path, number: int, text: str) -> float:
    try:
        value = float(text.strip())
    except ValueError:
        raise ParseError(f"expected a real number, got {text.strip()!r}", path=str(path), line=number) from None
    if not np.isfinite(value):
        raise ParseError("non-finite node attribute", path=str(path), line=number)
    return value


def _required(directory: Path, name: str, suffix: str) -> Path:
    path = _file(directory, name, suffix)
    if not path.is_file():
        raise ParseError(f"missing required file {path.name}", path=str(path))
    return path


def load_tudataset(directory: Path | str, name: str) -> Dataset:
    directory = Path(directory).expanduser()
    if not directory.is_dir():
        raise ParseError("dataset directory not found", path=str(directory))

    labels_path = _required(directory, name, "graph_labels")
    raw_labels = [_parse_int(labels_path, number, line) for number, line in enumerate(_read_lines(labels_path), start=1)]
    if not raw_labels:
        raise ParseError("graph_labels is empty", path=str(labels_path))
    num_graphs = len(raw_labels)

    indicator_path = _required(directory, name, "graph_indicator")
    node_graph: list[int] = []
    for number, line in enumerate(_read_lines(indicator_path), start=1):
        graph_number = _parse_int(indicator_path, number, line)
        if not 1 <= graph_number <= num_graphs:
            raise ParseError(f"graph id {graph_number} outside 1..{num_graphs}", path=str(indicator_path), line=number)
        node_graph.append(graph_number - 1)
    num_nodes = len(node_graph)

    members: dict[int, list[int]] = defaultdict(list)
    for node, graph_index in enumerate(node_graph):
        members[graph_index].append(node)
    for graph_index in range(num_graphs):
        if not members[graph_index]:
            raise ParseError(f"graph {graph_index + 1} has no nodes", path=str(indicator_path))
    local_index = {node: position for nodes in members.values() for position, node in enumerate(nodes)}

    edges_path = _required(directory, name, "A")
    directed: dict[tuple[int, int], int] = {}
    for number, line in enumerate(_read_lines(edges_path), start=1):
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'i, j', got {line!r}", path=str(edges_path), line=number)
        u = _parse_int(edges_path, number, parts[0]) - 1
        v = _parse_int(edges_path, number, parts[1]) - 1
        if not (0 <= u < num_nodes and 0 <= v < num_nodes):
            raise ParseError(f"node id outside 1..{num_nodes}", path=str(edges_path), line=number)
        if u == v:
            raise ParseError(f"self-loop on node {u + 1}", path=str(edges_path), line=number)
        if node_graph[u] != node_graph[v]:
            raise ParseError(
                f"edge joins graph {node_graph[u] + 1} and graph {node_graph[v] + 1}",
                path=str(edges_path),
                line=number,
            )
        directed.setdefault((u, v), number)
    for (u, v), number in directed.items():
        if (v, u) not in directed:
            raise ParseError(f"edge ({u + 1}, {v + 1}) has no reverse edge", path=str(edges_path), line=number)

    features = _node_features(directory, name, num_nodes)

    classes = _class_labels(directory, name, raw_labels, labels_path)
    dense = {raw: index for index, raw in enumerate(classes)}
    adjacencies = [np.zeros((len(members[index]), len(members[index]))) for index in range(num_graphs)]
    for u, v in directed:
        adjacencies[node_graph[u]][local_index[u], local_index[v]] = 1.0

    graphs = tuple(
        Graph(
            adjacency=adjacencies[index],
            features=features[members[index]],
            label=dense[raw_labels[index]],
            id=index,
        )
        for index in range(num_graphs)
    )
    return Dataset(graphs=graphs, num_classes=len(classes), name=name)


def _class_labels(directory: Path, name: str, raw_labels: list[int], labels_path: Path) -> list[int]:
    classes_path = _file(directory, name, "graph_classes")
    if not classes_path.is_file():
        return sorted(set(raw_labels))
    classes: list[int] = []
    for number, line in enumerate(_read_lines(classes_path), start=1):
        raw = _parse_int(classes_path, number, line)
        if raw in classes:
            raise ParseError(f"class label {raw} listed twice", path=str(classes_path), line=number)
        classes.append(raw)
    known = set(classes)
    for number, raw in enumerate(raw_labels, start=1):
        if raw not in known:
            raise ParseError(f"label {raw} is not listed in {classes_path.name}", path=str(labels_path), line=number)
    return classes


def _node_features(directory: Path, name: str, num_nodes: int) -> np.ndarray:
    attributes_path = _file(directory, name, "node_attributes")
    if attributes_path.is_file():
        rows: list[list[float]] = []
        for number, line in enumerate(_read_lines(attributes_path), start=1):
            row = [_parse_float(attributes_path, number, part) for part in line.split(",")]
            if rows and len(row) != len(rows[0]):
                raise ParseError(
                    f"expected {len(rows[0])} attributes, got {len(row)}", path=str(attributes_path), line=number
                )
            rows.append(row)
        if len(rows) != num_nodes:
            raise ParseError(f"expected {num_nodes} attribute rows, got {len(rows)}", path=str(attributes_path))
        return np.asarray(rows, dtype=np.float64)

    node_labels_path = _file(directory, name, "node_labels")
    if node_labels_path.is_file():
        values = [
            _parse_int(node_labels_path, number, line)
            for number, line in enumerate(_read_lines(node_labels_path), start=1)
        ]
        if len(values) != num_nodes:
            raise ParseError(f"expected {num_nodes} node labels, got {len(values)}", path=str(node_labels_path))
        vocabulary = {value: index for index, value in enumerate(sorted(set(values)))}
        one_hot = np.zeros((num_nodes, len(vocabulary)))
        one_hot[np.arange(num_nodes), [vocabulary[value] for value in values]] = 1.0
        return one_hot

    return np.ones((num_nodes, 1))


def export_tudataset(dataset: Dataset, directory: Path | str, name: Optional[str] = None) -> Path:
    """Write ``dataset`` in TUDataset format; graphs are written in dataset order."""
    name = name or dataset.name
    directory = Path(directory).expanduser()
    directory.mkdir(parents=True, exist_ok=True)

    edge_lines: list[str] = []
    indicator_lines: list[str] = []
    attribute_lines: list[str] = []
    offset = 0
    for graph_number, graph in enumerate(dataset.graphs, start=1):
        rows, cols = np.nonzero(graph.adjacency)
        edge_lines.extend(f"{offset + int(u) + 1}, {offset + int(v) + 1}" for u, v in zip(rows, cols))
        indicator_lines.extend(str(graph_number) for _ in range(graph.num_nodes))
        attribute_lines.extend(", ".join(repr(float(value)) for value in row) for row in graph.features)
        offset += graph.num_nodes

    def write(suffix: str, lines: list[str]) -> None:
        content = "\n".join(lines)
        _file(directory, name, suffix).write_text(f"{content}\n" if lines else "", encoding="utf-8")

    write("A", edge_lines)
    write("graph_indicator", indicator_lines)
    write("graph_labels", [str(graph.label) for graph in dataset.graphs])
    write("graph_classes", [str(label) for label in range(dataset.num_classes)])
    write("node_attributes", attribute_lines)
    return directory
