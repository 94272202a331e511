from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from src.errors import DataError, ParseError
from src.graphdata import (
    ClassSpec,
    Dataset,
    Graph,
    changed_pairs,
    export_tudataset,
    flip_edge,
    flip_edges,
    load_tudataset,
    split,
    synth_dataset,
    target_class,
)


def _write_fixture(directory: Path, name: str = "TOY", **overrides: str) -> Path:
    files = {
        "A": "1, 2\n2, 1\n3, 4\n4, 3\n",
        "graph_indicator": "1\n1\n2\n2\n",
        "graph_labels": "1\n-1\n",
    }
    files.update(overrides)
    directory.mkdir(parents=True, exist_ok=True)
    for suffix, content in files.items():
        (directory / f"{name}_{suffix}.txt").write_text(content, encoding="utf-8")
    return directory


def _path_graph(n: int, graph_id: int = 0, label: int = 0) -> Graph:
    adjacency = np.zeros((n, n))
    for u in range(n - 1):
        adjacency[u, u + 1] = adjacency[u + 1, u] = 1.0
    return Graph(adjacency=adjacency, features=np.ones((n, 1)), label=label, id=graph_id)


def _labelled_dataset(labels: list[int], num_classes: int = 2) -> Dataset:
    graphs = tuple(_path_graph(3, graph_id=index, label=label) for index, label in enumerate(labels))
    return Dataset(graphs=graphs, num_classes=num_classes)


def test_load_tudataset_parses_two_graph_fixture(tmp_path):
    directory = _write_fixture(tmp_path / "TOY")

    dataset = load_tudataset(directory, "TOY")

    assert len(dataset) == 2
    assert dataset.num_classes == 2
    # raw labels {-1, 1} map to dense indices in sorted order
    assert [graph.label for graph in dataset.graphs] == [1, 0]
    for graph in dataset.graphs:
        assert graph.num_nodes == 2
        assert np.array_equal(graph.adjacency, [[0.0, 1.0], [1.0, 0.0]])
        assert np.array_equal(graph.features, [[1.0], [1.0]])


def test_load_tudataset_one_hot_encodes_node_labels(tmp_path):
    directory = _write_fixture(tmp_path / "TOY", node_labels="0\n2\n2\n0\n")

    dataset = load_tudataset(directory, "TOY")

    assert dataset.feature_dim == 2
    assert np.array_equal(dataset.graphs[0].features, [[1.0, 0.0], [0.0, 1.0]])


def test_load_tudataset_prefers_node_attributes(tmp_path):
    directory = _write_fixture(
        tmp_path / "TOY",
        node_labels="0\n1\n0\n1\n",
        node_attributes="0.5, 1\n1, 2\n3, 4\n5, 6\n",
    )

    dataset = load_tudataset(directory, "TOY")

    assert np.array_equal(dataset.graphs[1].features, [[3.0, 4.0], [5.0, 6.0]])


def test_load_tudataset_rejects_empty_labels(tmp_path):
    directory = _write_fixture(tmp_path / "TOY", graph_labels="")

    with pytest.raises(ParseError):
        load_tudataset(directory, "TOY")


def test_load_tudataset_reports_the_offending_line(tmp_path):
    directory = _write_fixture(tmp_path / "TOY", A="1, 2\n2, 1\n3, x\n")

    with pytest.raises(ParseError) as excinfo:
        load_tudataset(directory, "TOY")

    assert excinfo.value.line == 3
    assert excinfo.value.to_dict()["path"].endswith("TOY_A.txt")


def test_load_tudataset_rejects_missing_reverse_edge_and_self_loops(tmp_path):
    one_way = _write_fixture(tmp_path / "one_way", A="1, 2\n3, 4\n4, 3\n")
    looped = _write_fixture(tmp_path / "looped", A="1, 1\n3, 4\n4, 3\n")

    with pytest.raises(ParseError):
        load_tudataset(one_way, "TOY")
    with pytest.raises(ParseError):
        load_tudataset(looped, "TOY")


def test_load_tudataset_missing_directory_is_a_parse_error(tmp_path):
    with pytest.raises(ParseError):
        load_tudataset(tmp_path / "absent", "TOY")


def test_export_then_load_preserves_graphs(tmp_path):
    original = synth_dataset([(6, 0.5, 4), (5, 0.3, 3)], 3, seed=11)

    directory = export_tudataset(original, tmp_path / "out")
    loaded = load_tudataset(directory, original.name)

    assert len(loaded) == len(original)
    for before, after in zip(original.graphs, loaded.graphs):
        assert before.same_as(after)


def test_export_then_load_preserves_fixture(tmp_path):
    fixture = load_tudataset(_write_fixture(tmp_path / "TOY"), "TOY")

    loaded = load_tudataset(export_tudataset(fixture, tmp_path / "copy"), "TOY")

    assert [graph.label for graph in loaded.graphs] == [graph.label for graph in fixture.graphs]
    assert all(a.same_as(b) for a, b in zip(fixture.graphs, loaded.graphs))


def test_export_then_load_keeps_classes_without_graphs(tmp_path):
    original = _labelled_dataset([0, 2, 2, 0], num_classes=3)

    loaded = load_tudataset(export_tudataset(original, tmp_path / "out", name="GAP"), "GAP")

    assert loaded.num_classes == 3
    assert loaded.class_counts == (2, 0, 2)
    assert [graph.label for graph in loaded.graphs] == [0, 2, 2, 0]


def test_load_tudataset_indexes_classes_in_listed_order(tmp_path):
    directory = _write_fixture(tmp_path / "TOY", graph_classes="1\n5\n-1\n")

    dataset = load_tudataset(directory, "TOY")

    assert dataset.num_classes == 3
    assert [graph.label for graph in dataset.graphs] == [0, 2]


def test_load_tudataset_rejects_labels_missing_from_class_list(tmp_path):
    unlisted = _write_fixture(tmp_path / "unlisted", graph_classes="1\n")
    repeated = _write_fixture(tmp_path / "repeated", graph_classes="1\n-1\n1\n")

    with pytest.raises(ParseError) as excinfo:
        load_tudataset(unlisted, "TOY")
    assert excinfo.value.line == 2
    with pytest.raises(ParseError):
        load_tudataset(repeated, "TOY")


def test_graph_rejects_asymmetric_or_looped_adjacency():
    with pytest.raises(DataError):
        Graph(adjacency=[[0, 1], [0, 0]], features=[[1.0], [1.0]], label=0, id=0)
    with pytest.raises(DataError):
        Graph(adjacency=[[1, 0], [0, 0]], features=[[1.0], [1.0]], label=0, id=0)


def test_flip_edge_twice_is_identity_and_rejects_self_pairs():
    graph = _path_graph(4)

    flipped = flip_edge(graph, 0, 3)
    restored = flip_edge(flipped, 3, 0)

    assert flipped.adjacency[0, 3] == flipped.adjacency[3, 0] == 1.0
    assert restored.same_as(graph)
    with pytest.raises(DataError):
        flip_edge(graph, 2, 2)


def test_changed_pairs_lists_flipped_upper_triangle_pairs():
    graph = _path_graph(5)

    flipped = flip_edges(graph, [(3, 1), (0, 1), (2, 4)])

    assert changed_pairs(graph, flipped) == [(0, 1), (1, 3), (2, 4)]


def test_target_class_reference_counts():
    assert target_class(_labelled_dataset([0] * 1936 + [1] * 2401)) == 0
    assert target_class(_labelled_dataset([0] * 472 + [1] * 536 + [2] * 451, num_classes=3)) == 2
    assert target_class(_labelled_dataset([0] * 5 + [1] * 5)) == 0


def test_split_sizes_and_candidate_halves():
    dataset = _labelled_dataset([index % 2 for index in range(100)])

    plan = split(dataset, 0, seed=7)

    assert (len(plan.train_ids), len(plan.test_ids), len(plan.candidate_ids)) == (70, 20, 10)
    assert (len(plan.poison_train_ids), len(plan.poison_test_ids)) == (5, 5)
    ids = plan.train_ids + plan.test_ids + plan.candidate_ids
    assert sorted(ids) == list(range(100))
    assert all(dataset.get(graph_id).label != 0 for graph_id in plan.candidate_ids)


def test_split_is_deterministic_per_seed():
    dataset = _labelled_dataset([index % 2 for index in range(100)])

    assert split(dataset, 1, seed=3) == split(dataset, 1, seed=3)
    assert split(dataset, 1, seed=3) != split(dataset, 1, seed=4)


def test_split_fails_without_enough_non_target_graphs():
    dataset = _labelled_dataset([1] * 100)

    with pytest.raises(DataError):
        split(dataset, 1, seed=0)


def test_with_poison_rate_keeps_rounded_share_of_training_size():
    dataset = _labelled_dataset([index % 2 for index in range(200)])
    plan = split(dataset, 0, seed=1)

    sparse = plan.with_poison_rate(0.01)
    denser = plan.with_poison_rate(0.07)

    assert len(sparse.poison_train_ids) == 1
    assert len(denser.poison_train_ids) == 10
    assert sparse.poison_test_ids == plan.poison_test_ids
    assert set(sparse.unused_ids).isdisjoint(sparse.candidate_ids)
    with pytest.raises(DataError):
        plan.with_poison_rate(0.5)


def test_synth_dataset_counts_and_labels():
    dataset = synth_dataset([ClassSpec(12, 0.2, 30), ClassSpec(12, 0.6, 30)], 4, seed=0)

    assert len(dataset) == 60
    assert dataset.class_counts == (30, 30)
    assert all(graph.num_nodes == 12 and graph.feature_dim == 4 for graph in dataset.graphs)


def test_synth_dataset_zero_edge_probability_gives_empty_graphs():
    dataset = synth_dataset([(8, 0.0, 5), (8, 0.0, 5)], 2, seed=0)

    assert all(graph.num_edges == 0 for graph in dataset.graphs)


def test_synth_dataset_denser_class_has_more_edges():
    dataset = synth_dataset([(12, 0.2, 60), (12, 0.6, 60)], 4, seed=5)

    sparse = np.mean([graph.num_edges for graph in dataset.graphs if graph.label == 0])
    dense = np.mean([graph.num_edges for graph in dataset.graphs if graph.label == 1])

    assert sparse < dense


def test_synth_dataset_is_bitwise_reproducible():
    first = synth_dataset([(12, 0.2, 10), (12, 0.6, 10)], 4, seed=9)
    second = synth_dataset([(12, 0.2, 10), (12, 0.6, 10)], 4, seed=9)

    assert all(a.same_as(b) for a, b in zip(first.graphs, second.graphs))
