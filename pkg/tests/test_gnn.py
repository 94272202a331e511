from __future__ import annotations

import numpy as np
import pytest

from src.errors import DataError, UnsupportedOperationError
from src.gnn import (
    ARCHITECTURES,
    AdamState,
    ModelConfig,
    ModelState,
    TrainConfig,
    accuracy,
    adam_step,
    backward,
    forward,
    forward_dense,
    init_state,
    list_architectures,
    load_checkpoint,
    loss_dense,
    normalize_adjacency,
    predict,
    save_checkpoint,
    train,
    zero_state,
)
from src.graphdata import Graph, canonical_dataset, erdos_renyi_adjacency, synth_dataset
from src.numkit import numerical_grad, relative_error
from src.seeding import derive_seed


def _random_graph(seed: int, n: int = 7, feature_dim: int = 3, p: float = 0.5, label: int = 0) -> Graph:
    rng = np.random.default_rng(seed)
    return Graph(
        adjacency=erdos_renyi_adjacency(rng, n, p),
        features=rng.standard_normal((n, feature_dim)),
        label=label,
        id=seed,
    )


def _config(arch: str = "GCN", **kwargs) -> ModelConfig:
    return ModelConfig(arch=arch, input_dim=3, num_classes=2, **kwargs)


def test_registry_lists_all_architectures():
    assert set(list_architectures()) == set(ARCHITECTURES)


def test_model_config_rejects_unknown_architecture():
    with pytest.raises(ValueError):
        ModelConfig(arch="MLP")


def test_normalize_adjacency_examples():
    assert np.array_equal(normalize_adjacency(np.zeros((1, 1))), [[1.0]])
    assert np.allclose(normalize_adjacency(np.array([[0.0, 1.0], [1.0, 0.0]])), np.full((2, 2), 0.5))
    k3 = np.ones((3, 3)) - np.eye(3)
    assert np.allclose(normalize_adjacency(k3), np.full((3, 3), 1.0 / 3.0))


def test_zero_state_logits_equal_classifier_bias():
    state = zero_state(_config())
    bias = np.array([[0.3, -0.2]])
    state = state.replace_params({**state.params, "classifier.bias": bias})

    logits = forward(state, _random_graph(1)).logits

    assert np.array_equal(logits, bias)


def test_init_state_is_deterministic_and_has_zero_bias():
    first = init_state(_config("GAT"), 5)
    second = init_state(_config("GAT"), 5)

    assert first.same_as(second)
    assert not first.same_as(init_state(_config("GAT"), 6))
    assert np.array_equal(first.params["classifier.bias"], np.zeros((1, 2)))


GRADIENT_CASES = range(20)


def _gradient_case(case: int) -> tuple[Graph, ModelState, int]:
    """Random graph of 2..10 nodes and a freshly initialized GCN; the label alternates."""
    rng = np.random.default_rng(derive_seed(case, "gradient-case"))
    n = int(rng.integers(2, 11))
    graph = _random_graph(int(rng.integers(1 << 30)), n=n, p=float(rng.uniform(0.2, 0.8)))
    state = init_state(_config(), derive_seed(case, "gradient-state"))
    return graph, state, case % 2


@pytest.mark.parametrize("arch", ARCHITECTURES)
def test_weight_gradients_match_central_differences(arch):
    graph = _random_graph(3)
    state = init_state(_config(arch), 11)
    grads = backward(forward(state, graph), 1).weights

    for name, value in state.params.items():

        def loss_at(x, name=name):
            return loss_dense(state.replace_params({**state.params, name: x}), graph.adjacency, graph.features, 1)

        numeric = numerical_grad(loss_at, np.array(value), eps=1e-5)

        assert relative_error(grads[name], numeric, atol=1e-7) < 1e-4, name


@pytest.mark.parametrize("case", GRADIENT_CASES)
def test_gcn_weight_gradients_match_central_differences_on_random_graphs(case):
    graph, state, label = _gradient_case(case)
    grads = backward(forward(state, graph), label).weights

    for name, value in state.params.items():

        def loss_at(x, name=name):
            return loss_dense(state.replace_params({**state.params, name: x}), graph.adjacency, graph.features, label)

        numeric = numerical_grad(loss_at, np.array(value), eps=1e-5)

        assert relative_error(grads[name], numeric, atol=1e-7) < 1e-4, name


@pytest.mark.parametrize("case", GRADIENT_CASES)
def test_adjacency_gradient_matches_symmetric_central_differences(case):
    graph, state, label = _gradient_case(case)
    n = graph.num_nodes
    eps = 1e-5

    analytic = backward(forward(state, graph), label, want_adjacency_grad=True).adjacency

    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    numeric = np.zeros(len(pairs))
    for index, (u, v) in enumerate(pairs):
        bump = np.zeros((n, n))
        bump[u, v] = bump[v, u] = eps
        plus = loss_dense(state, graph.adjacency + bump, graph.features, label)
        minus = loss_dense(state, graph.adjacency - bump, graph.features, label)
        # a symmetric bump moves both (u, v) and (v, u); the reported gradient is their mean
        numeric[index] = (plus - minus) / (2.0 * eps) / 2.0
    expected = np.array([analytic[u, v] for u, v in pairs])

    assert len(pairs) == n * (n - 1) // 2
    assert relative_error(expected, numeric, atol=1e-7) < 1e-4
    assert np.array_equal(analytic, analytic.T)
    assert np.all(np.diag(analytic) == 0.0)


@pytest.mark.parametrize("arch", ["GIN", "GSAGE", "GAT"])
def test_adjacency_gradient_is_gcn_only(arch):
    graph = _random_graph(5)
    trace = forward(init_state(_config(arch), 0), graph)

    with pytest.raises(UnsupportedOperationError):
        backward(trace, 0, want_adjacency_grad=True)


@pytest.mark.parametrize("arch", ARCHITECTURES)
def test_logits_are_invariant_to_node_permutation(arch):
    graph = _random_graph(6, n=8)
    state = init_state(_config(arch), 3)
    order = np.random.default_rng(0).permutation(8)

    original = forward(state, graph).logits
    permuted = forward_dense(state, graph.adjacency[np.ix_(order, order)], graph.features[order]).logits

    assert np.allclose(original, permuted, atol=1e-9)


def test_gcn_on_a_single_node_graph_is_an_mlp():
    state = init_state(_config(), 12)
    state = state.replace_params({**state.params, "classifier.bias": np.array([[0.1, -0.3]])})
    features = np.random.default_rng(12).standard_normal((1, 3))
    graph = Graph(adjacency=np.zeros((1, 1)), features=features, label=0, id=0)
    params = state.params

    hidden = np.maximum(features @ params["layers.0.weight"], 0.0)
    hidden = np.maximum(hidden @ params["layers.1.weight"], 0.0)
    expected = hidden @ params["classifier.weight"] + params["classifier.bias"]

    assert np.allclose(forward(state, graph).logits, expected, atol=1e-12)


def test_predict_takes_argmax_and_smallest_index_on_ties():
    state = zero_state(_config())
    graph = _random_graph(7)

    confident = state.replace_params({**state.params, "classifier.bias": np.array([[0.2, 0.9]])})
    tied = state.replace_params({**state.params, "classifier.bias": np.array([[0.5, 0.5]])})

    assert predict(confident, graph) == 1
    assert predict(tied, graph) == 0


def test_accuracy_rejects_empty_sets():
    with pytest.raises(DataError):
        accuracy(zero_state(_config()), [])


def test_adam_zero_gradient_without_decay_leaves_parameters_unchanged():
    state = init_state(_config(), 1)
    tcfg = TrainConfig(weight_decay=0.0)
    zero_grads = {name: np.zeros_like(value) for name, value in state.params.items()}

    updated, _ = adam_step(state, zero_grads, AdamState.zeros_like(state), 1, tcfg)

    assert updated.same_as(state)


def test_adam_first_step_moves_by_learning_rate():
    state = zero_state(_config())
    tcfg = TrainConfig(lr=0.02, weight_decay=0.0)
    unit_grads = {name: np.ones_like(value) for name, value in state.params.items()}

    updated, _ = adam_step(state, unit_grads, AdamState.zeros_like(state), 1, tcfg)

    for name, value in updated.params.items():
        assert np.allclose(value, -0.02, atol=1e-8), name


def test_adam_equal_gradients_give_equal_updates():
    state = zero_state(_config())
    tcfg = TrainConfig()
    grads = {name: np.full_like(value, 0.37) for name, value in state.params.items()}

    updated, _ = adam_step(state, grads, AdamState.zeros_like(state), 1, tcfg)

    weight = updated.params["classifier.weight"]
    assert np.all(weight == weight.flat[0])


def test_adam_rejects_step_zero():
    state = zero_state(_config())
    with pytest.raises(ValueError):
        adam_step(state, dict(state.params), AdamState.zeros_like(state), 0, TrainConfig())


def test_train_with_zero_epochs_returns_initial_state():
    dataset = synth_dataset([(6, 0.2, 4), (6, 0.7, 4)], 3, seed=0)
    config = _config()
    tcfg = TrainConfig(epochs=0, seed=4)

    state = train(list(dataset.graphs), config, tcfg)

    assert state.same_as(init_state(config, derive_seed(4, "init")))


def test_train_is_deterministic():
    dataset = synth_dataset([(6, 0.2, 6), (6, 0.7, 6)], 3, seed=0)
    tcfg = TrainConfig(epochs=3, batch_size=4, seed=9)

    first = train(list(dataset.graphs), _config("GSAGE"), tcfg)
    second = train(list(dataset.graphs), _config("GSAGE"), tcfg)

    assert first.same_as(second)


def test_train_rejects_empty_training_set():
    with pytest.raises(DataError):
        train([], _config(), TrainConfig(epochs=1))


def test_checkpoint_round_trip_is_bit_exact(tmp_path):
    state = init_state(_config("GAT", gat_heads=2), 8)

    path = save_checkpoint(state, tmp_path / "nested" / "gat.json")
    restored = load_checkpoint(path)

    assert restored.config == state.config
    assert restored.same_as(state)


def test_load_checkpoint_rejects_foreign_json(tmp_path):
    path = tmp_path / "other.json"
    path.write_text('{"format": "something-else"}', encoding="utf-8")

    with pytest.raises(DataError):
        load_checkpoint(path)


def test_gcn_fits_separable_synthetic_set():
    dataset = canonical_dataset(seed=0)
    config = ModelConfig(arch="GCN", input_dim=dataset.feature_dim, num_classes=2)

    state = train(list(dataset.graphs), config, TrainConfig(epochs=50, seed=0))

    assert accuracy(state, list(dataset.graphs)) >= 0.95
