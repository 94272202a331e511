from __future__ import annotations

from typing import Callable, Optional, Sequence, TextIO

import numpy as np

from ..errors import DataError
from ..graphdata import Graph
from ..io_helpers import log_line
from ..seeding import derive_seed, make_rng
from .config import ModelConfig, TrainConfig
from .model import ModelState, backward, forward, init_state
from .optim import AdamState, adam_step

GraphTransform = Callable[[Graph, int, int], Graph]


def train(
    graphs: Sequence[Graph],
    config: ModelConfig,
    tcfg: TrainConfig,
    *,
    transform: Optional[GraphTransform] = None,
    log_stream: Optional[TextIO] = None,
) -> ModelState:
    """Mini-batch Adam on per-graph cross-entropy, gradients averaged over each batch.

    ``transform(graph, epoch, position)`` may replace a graph for one epoch; ``position``
    is the graph's index in ``graphs``.
    """
    if not graphs:
        raise DataError("cannot train on an empty training set")
    state = init_state(config, derive_seed(tcfg.seed, "init"))
    if tcfg.epochs == 0:
        return state
    opt_state = AdamState.zeros_like(state)
    shuffle_rng = make_rng(tcfg.seed, "shuffle")
    step = 0
    for epoch in range(tcfg.epochs):
        order = shuffle_rng.permutation(len(graphs))
        epoch_loss = 0.0
        for start in range(0, len(order), tcfg.batch_size):
            batch = order[start:start + tcfg.batch_size]
            totals = {name: np.zeros_like(value) for name, value in state.params.items()}
            for position in batch:
                graph = graphs[int(position)]
                if transform is not None:
                    graph = transform(graph, epoch, int(position))
                grads = backward(forward(state, graph), graph.label)
                epoch_loss += grads.loss or 0.0
                for name, value in grads.weights.items():
                    totals[name] += value
            mean = {name: value / len(batch) for name, value in totals.items()}
            step += 1
            state, opt_state = adam_step(state, mean, opt_state, step, tcfg)
        if log_stream is not None:
            log_line(
                "train",
                f"{config.arch} epoch {epoch + 1}/{tcfg.epochs} loss={epoch_loss / len(graphs):.4f}",
                log_stream,
            )
    return state
