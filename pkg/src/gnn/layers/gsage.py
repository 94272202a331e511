from __future__ import annotations

import numpy as np

from ...numkit import Matrix, glorot_uniform, relu
from .base import GraphLayer, LayerGrad, Params


class GraphSAGELayer(GraphLayer):
    """Z = ReLU([Z_prev ‖ mean-neighbour(Z_prev)] W); isolated nodes aggregate zeros."""

    arch = "GSAGE"

    def prepare(self, adjacency: Matrix) -> Matrix:
        degree = np.maximum(adjacency.sum(axis=1), 1.0)
        return adjacency / degree[:, None]

    def init_params(self, rng: np.random.Generator, prefix: str, in_dim: int, out_dim: int) -> dict[str, Matrix]:
        return {f"{prefix}.weight": glorot_uniform(rng, 2 * in_dim, out_dim)}

    def forward(self, params: Params, prefix: str, operator: Matrix, z_prev: Matrix) -> tuple[Matrix, tuple]:
        combined = np.hstack([z_prev, operator @ z_prev])
        pre = combined @ params[f"{prefix}.weight"]
        return relu(pre), (combined, pre)

    def backward(self, params: Params, prefix: str, operator: Matrix, cache: tuple, dz: Matrix) -> LayerGrad:
        combined, pre = cache
        weight = params[f"{prefix}.weight"]
        width = combined.shape[1] // 2
        d_pre = dz * (pre > 0.0)
        d_combined = d_pre @ weight.T
        return LayerGrad(
            dz_prev=d_combined[:, :width] + operator.T @ d_combined[:, width:],
            grads={f"{prefix}.weight": combined.T @ d_pre},
        )
