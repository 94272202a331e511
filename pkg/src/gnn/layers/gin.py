from __future__ import annotations

import numpy as np

from ...numkit import Matrix, glorot_uniform, relu
from .base import GraphLayer, LayerGrad, Params


class GINLayer(GraphLayer):
    """Z = ReLU((A + I) Z_prev W), the sum aggregator with epsilon 0 and a one-layer MLP."""

    arch = "GIN"

    def prepare(self, adjacency: Matrix) -> Matrix:
        return adjacency + np.eye(adjacency.shape[0])

    def init_params(self, rng: np.random.Generator, prefix: str, in_dim: int, out_dim: int) -> dict[str, Matrix]:
        return {f"{prefix}.weight": glorot_uniform(rng, in_dim, out_dim)}

    def forward(self, params: Params, prefix: str, operator: Matrix, z_prev: Matrix) -> tuple[Matrix, tuple]:
        aggregated = operator @ z_prev
        pre = aggregated @ params[f"{prefix}.weight"]
        return relu(pre), (aggregated, pre)

    def backward(self, params: Params, prefix: str, operator: Matrix, cache: tuple, dz: Matrix) -> LayerGrad:
        aggregated, pre = cache
        weight = params[f"{prefix}.weight"]
        d_pre = dz * (pre > 0.0)
        return LayerGrad(
            dz_prev=operator.T @ (d_pre @ weight.T),
            grads={f"{prefix}.weight": aggregated.T @ d_pre},
        )
