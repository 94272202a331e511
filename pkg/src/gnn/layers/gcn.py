from __future__ import annotations

import numpy as np

from ...numkit import Matrix, glorot_uniform, relu
from .base import GraphLayer, LayerGrad, Params


def normalize_adjacency(adjacency: Matrix) -> Matrix:
    """D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I."""
    with_self = adjacency + np.eye(adjacency.shape[0])
    scale = 1.0 / np.sqrt(with_self.sum(axis=1))
    return with_self * np.outer(scale, scale)


class GCNLayer(GraphLayer):
    """Z = ReLU(Â Z_prev W)."""

    arch = "GCN"
    supports_adjacency_grad = True

    def prepare(self, adjacency: Matrix) -> Matrix:
        return normalize_adjacency(adjacency)

    def init_params(self, rng: np.random.Generator, prefix: str, in_dim: int, out_dim: int) -> dict[str, Matrix]:
        return {f"{prefix}.weight": glorot_uniform(rng, in_dim, out_dim)}

    def forward(self, params: Params, prefix: str, operator: Matrix, z_prev: Matrix) -> tuple[Matrix, tuple]:
        hidden = z_prev @ params[f"{prefix}.weight"]
        pre = operator @ hidden
        return relu(pre), (z_prev, hidden, pre)

    def backward(self, params: Params, prefix: str, operator: Matrix, cache: tuple, dz: Matrix) -> LayerGrad:
        z_prev, hidden, pre = cache
        weight = params[f"{prefix}.weight"]
        d_pre = dz * (pre > 0.0)
        d_hidden = operator.T @ d_pre
        return LayerGrad(
            dz_prev=d_hidden @ weight.T,
            grads={f"{prefix}.weight": z_prev.T @ d_hidden},
            d_operator=d_pre @ hidden.T,
        )

    def adjacency_grad(self, adjacency: Matrix, operator: Matrix, d_operator: Matrix) -> Matrix:
        # Â_uv = Ã_uv s_u s_v with s = deg(Ã)^-1/2 and deg the row sum of Ã
        with_self = adjacency + np.eye(adjacency.shape[0])
        scale = 1.0 / np.sqrt(with_self.sum(axis=1))
        weighted = d_operator * with_self
        d_scale = weighted @ scale + weighted.T @ scale
        d_degree = -0.5 * scale**3 * d_scale
        return d_operator * np.outer(scale, scale) + d_degree[:, None]
