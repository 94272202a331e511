from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from ..errors import DataError, ShapeError, UnsupportedOperationError
from ..graphdata import Graph
from ..numkit import Matrix, frozen, glorot_uniform, row_max_pool, softmax_cross_entropy, symmetrize
from ..seeding import make_rng
from .config import ModelConfig
from .layers import create_layer

CLASSIFIER_WEIGHT = "classifier.weight"
CLASSIFIER_BIAS = "classifier.bias"


def layer_prefix(index: int) -> str:
    return f"layers.{index}"


@dataclass(frozen=True, eq=False)
class ModelState:
    """Immutable parameters of F = h∘f: message-passing layers, max pooling, linear classifier."""

    config: ModelConfig
    params: Mapping[str, np.ndarray]

    def __post_init__(self) -> None:
        params = {name: frozen(np.array(value, dtype=np.float64)) for name, value in self.params.items()}
        object.__setattr__(self, "params", params)

    def replace_params(self, params: Mapping[str, np.ndarray]) -> "ModelState":
        return ModelState(config=self.config, params=params)

    def same_as(self, other: "ModelState") -> bool:
        if self.config != other.config or list(self.params) != list(other.params):
            return False
        return all(np.array_equal(self.params[name], other.params[name]) for name in self.params)


def init_state(config: ModelConfig, seed: int) -> ModelState:
    """Glorot-uniform weights and zero classifier bias, drawn in layer order from one generator."""
    rng = make_rng(seed, "init")
    layer = create_layer(config)
    params: dict[str, np.ndarray] = {}
    in_dim = config.input_dim
    for index, width in enumerate(config.layer_widths):
        params.update(layer.init_params(rng, layer_prefix(index), in_dim, width))
        in_dim = width
    params[CLASSIFIER_WEIGHT] = glorot_uniform(rng, in_dim, config.num_classes)
    params[CLASSIFIER_BIAS] = np.zeros((1, config.num_classes))
    return ModelState(config=config, params=params)


def zero_state(config: ModelConfig) -> ModelState:
    state = init_state(config, 0)
    return state.replace_params({name: np.zeros_like(value) for name, value in state.params.items()})


@dataclass(frozen=True, eq=False)
class ForwardTrace:
    state: ModelState
    adjacency: Matrix
    operator: Any
    caches: tuple[Any, ...]
    node_embeddings: Matrix
    pooled: Matrix
    argmax: np.ndarray
    logits: Matrix


@dataclass(frozen=True)
class Gradients:
    weights: dict[str, Matrix]
    adjacency: Optional[Matrix] = None
    loss: Optional[float] = None


def forward_dense(state: ModelState, adjacency: Matrix, features: Matrix) -> ForwardTrace:
    """Forward pass on raw arrays; ``adjacency`` may hold non-binary values (used by gradient checks)."""
    config = state.config
    if features.ndim != 2 or features.shape[1] != config.input_dim:
        raise ShapeError(f"features must have {config.input_dim} columns, got shape {features.shape}")
    if adjacency.shape != (features.shape[0], features.shape[0]):
        raise ShapeError(f"adjacency shape {adjacency.shape} does not match {features.shape[0]} nodes")
    layer = create_layer(config)
    operator = layer.prepare(adjacency)
    caches = []
    z = features
    for index in range(len(config.layer_widths)):
        z, cache = layer.forward(state.params, layer_prefix(index), operator, z)
        caches.append(cache)
    pooled = row_max_pool(z)
    logits = pooled.values @ state.params[CLASSIFIER_WEIGHT] + state.params[CLASSIFIER_BIAS]
    return ForwardTrace(
        state=state,
        adjacency=adjacency,
        operator=operator,
        caches=tuple(caches),
        node_embeddings=z,
        pooled=pooled.values,
        argmax=pooled.argmax,
        logits=logits,
    )


def forward(state: ModelState, g: Graph) -> ForwardTrace:
    return forward_dense(state, g.adjacency, g.features)


def backward_from_logits(trace: ForwardTrace, dlogits: Matrix, want_adjacency_grad: bool = False) -> Gradients:
    state = trace.state
    config = state.config
    layer = create_layer(config)
    if want_adjacency_grad and not layer.supports_adjacency_grad:
        raise UnsupportedOperationError(f"adjacency gradient is only available for GCN, not {config.arch}")

    grads: dict[str, Matrix] = {
        CLASSIFIER_WEIGHT: trace.pooled.T @ dlogits,
        CLASSIFIER_BIAS: np.array(dlogits, dtype=np.float64),
    }
    d_pooled = dlogits @ state.params[CLASSIFIER_WEIGHT].T
    dz = np.zeros_like(trace.node_embeddings)
    dz[trace.argmax, np.arange(dz.shape[1])] = d_pooled[0]

    d_operator = np.zeros_like(trace.adjacency) if want_adjacency_grad else None
    for index in reversed(range(len(config.layer_widths))):
        layer_grad = layer.backward(state.params, layer_prefix(index), trace.operator, trace.caches[index], dz)
        grads.update(layer_grad.grads)
        dz = layer_grad.dz_prev
        if d_operator is not None and layer_grad.d_operator is not None:
            d_operator += layer_grad.d_operator

    adjacency_grad = None
    if d_operator is not None:
        adjacency_grad = symmetrize(layer.adjacency_grad(trace.adjacency, trace.operator, d_operator))
    ordered = {name: grads[name] for name in state.params}
    return Gradients(weights=ordered, adjacency=adjacency_grad)


def backward(trace: ForwardTrace, label: int, want_adjacency_grad: bool = False) -> Gradients:
    loss, dlogits = softmax_cross_entropy(trace.logits, label)
    grads = backward_from_logits(trace, dlogits, want_adjacency_grad)
    return Gradients(weights=grads.weights, adjacency=grads.adjacency, loss=loss)


def loss_dense(state: ModelState, adjacency: Matrix, features: Matrix, label: int) -> float:
    return softmax_cross_entropy(forward_dense(state, adjacency, features).logits, label)[0]


def predict(state: ModelState, g: Graph) -> int:
    # np.argmax picks the smallest index on ties
    return int(np.argmax(forward(state, g).logits[0]))


def accuracy(state: ModelState, graphs: Sequence[Graph]) -> float:
    if not graphs:
        raise DataError("cannot compute accuracy on an empty evaluation set")
    correct = sum(1 for graph in graphs if predict(state, graph) == graph.label)
    return correct / len(graphs)
