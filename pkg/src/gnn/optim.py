from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .config import TrainConfig
from .model import ModelState


@dataclass(frozen=True, eq=False)
class AdamState:
    m: Mapping[str, np.ndarray]
    v: Mapping[str, np.ndarray]

    @classmethod
    def zeros_like(cls, state: ModelState) -> "AdamState":
        return cls(
            m={name: np.zeros_like(value) for name, value in state.params.items()},
            v={name: np.zeros_like(value) for name, value in state.params.items()},
        )


def adam_step(
    state: ModelState,
    grads: Mapping[str, np.ndarray],
    opt_state: AdamState,
    t: int,
    tcfg: TrainConfig,
) -> tuple[ModelState, AdamState]:
    """One bias-corrected Adam update; weight decay is added to the gradient as an L2 term."""
    if t < 1:
        raise ValueError(f"Adam step counter starts at 1, got {t}")
    b1, b2 = tcfg.beta1, tcfg.beta2
    params: dict[str, np.ndarray] = {}
    m: dict[str, np.ndarray] = {}
    v: dict[str, np.ndarray] = {}
    for name, value in state.params.items():
        g = grads[name]
        if tcfg.weight_decay:
            g = g + tcfg.weight_decay * value
        m[name] = b1 * opt_state.m[name] + (1.0 - b1) * g
        v[name] = b2 * opt_state.v[name] + (1.0 - b2) * g * g
        m_hat = m[name] / (1.0 - b1**t)
        v_hat = v[name] / (1.0 - b2**t)
        params[name] = value - tcfg.lr * m_hat / (np.sqrt(v_hat) + tcfg.eps)
    return state.replace_params(params), AdamState(m=m, v=v)
