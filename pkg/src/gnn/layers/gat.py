from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ...numkit import LEAKY_RELU_SLOPE, Matrix, glorot_uniform, leaky_relu, relu
from .base import GraphLayer, LayerGrad, Params


@dataclass(frozen=True)
class _HeadCache:
    hidden: Matrix
    scores: Matrix
    attention: Matrix


class GATLayer(GraphLayer):
    """Multi-head attention over neighbours and self; heads are concatenated and projected.

    Per head: alpha_uv = softmax_v(LeakyReLU(a_src . W z_u + a_dst . W z_v)) over v in N(u) ∪ {u}.
    """

    arch = "GAT"

    @property
    def heads(self) -> int:
        return self.config.gat_heads

    def prepare(self, adjacency: Matrix) -> np.ndarray:
        return (adjacency + np.eye(adjacency.shape[0])) > 0.0

    def init_params(self, rng: np.random.Generator, prefix: str, in_dim: int, out_dim: int) -> dict[str, Matrix]:
        params: dict[str, Matrix] = {}
        for head in range(self.heads):
            params[f"{prefix}.heads.{head}.weight"] = glorot_uniform(rng, in_dim, out_dim)
            params[f"{prefix}.heads.{head}.att_src"] = glorot_uniform(rng, out_dim, 1)
            params[f"{prefix}.heads.{head}.att_dst"] = glorot_uniform(rng, out_dim, 1)
        params[f"{prefix}.proj"] = glorot_uniform(rng, self.heads * out_dim, out_dim)
        return params

    def forward(self, params: Params, prefix: str, operator: np.ndarray, z_prev: Matrix) -> tuple[Matrix, tuple]:
        head_caches: list[_HeadCache] = []
        outputs: list[Matrix] = []
        for head in range(self.heads):
            key = f"{prefix}.heads.{head}"
            hidden = z_prev @ params[f"{key}.weight"]
            scores = hidden @ params[f"{key}.att_src"] + (hidden @ params[f"{key}.att_dst"]).T
            logits = np.where(operator, leaky_relu(scores), -np.inf)
            weights = np.exp(logits - logits.max(axis=1, keepdims=True))
            attention = weights / weights.sum(axis=1, keepdims=True)
            head_caches.append(_HeadCache(hidden=hidden, scores=scores, attention=attention))
            outputs.append(attention @ hidden)
        concatenated = np.hstack(outputs)
        pre = concatenated @ params[f"{prefix}.proj"]
        return relu(pre), (z_prev, tuple(head_caches), concatenated, pre)

    def backward(self, params: Params, prefix: str, operator: np.ndarray, cache: tuple, dz: Matrix) -> LayerGrad:
        z_prev, head_caches, concatenated, pre = cache
        proj = params[f"{prefix}.proj"]
        d_pre = dz * (pre > 0.0)
        grads: dict[str, Matrix] = {f"{prefix}.proj": concatenated.T @ d_pre}
        d_concat = d_pre @ proj.T
        width = proj.shape[1]
        dz_prev = np.zeros_like(z_prev)
        for head, head_cache in enumerate(head_caches):
            key = f"{prefix}.heads.{head}"
            d_out = d_concat[:, head * width:(head + 1) * width]
            attention = head_cache.attention
            d_attention = d_out @ head_cache.hidden.T
            d_hidden = attention.T @ d_out
            d_logits = attention * (d_attention - np.sum(attention * d_attention, axis=1, keepdims=True))
            d_scores = d_logits * np.where(head_cache.scores > 0.0, 1.0, LEAKY_RELU_SLOPE)
            d_src = d_scores.sum(axis=1, keepdims=True)
            d_dst = d_scores.sum(axis=0).reshape(-1, 1)
            att_src = params[f"{key}.att_src"]
            att_dst = params[f"{key}.att_dst"]
            grads[f"{key}.att_src"] = head_cache.hidden.T @ d_src
            grads[f"{key}.att_dst"] = head_cache.hidden.T @ d_dst
            d_hidden = d_hidden + d_src @ att_src.T + d_dst @ att_dst.T
            weight = params[f"{key}.weight"]
            grads[f"{key}.weight"] = z_prev.T @ d_hidden
            dz_prev += d_hidden @ weight.T
        return LayerGrad(dz_prev=dz_prev, grads=grads)
