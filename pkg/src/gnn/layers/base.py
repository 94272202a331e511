from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Any, Mapping, Optional

import numpy as np

from ...errors import UnsupportedOperationError
from ...numkit import Matrix
from ..config import ModelConfig

__all__ = ["GraphLayer", "LayerGrad", "Params"]

Params = Mapping[str, np.ndarray]


@dataclass(frozen=True)
class LayerGrad:
    dz_prev: Matrix
    grads: dict[str, Matrix]
    d_operator: Optional[Matrix] = None


class GraphLayer(abc.ABC):
    """One message-passing layer family; every layer of a model shares the same family.

    ``prepare`` turns the raw adjacency into the propagation operator the family uses,
    once per graph; ``forward``/``backward`` run a single layer against it.
    """

    arch: str
    supports_adjacency_grad: bool = False

    def __init__(self, config: ModelConfig) -> None:
        self.config = config

    @abc.abstractmethod
    def prepare(self, adjacency: Matrix) -> Any:
        ...

    @abc.abstractmethod
    def init_params(self, rng: np.random.Generator, prefix: str, in_dim: int, out_dim: int) -> dict[str, Matrix]:
        ...

    @abc.abstractmethod
    def forward(self, params: Params, prefix: str, operator: Any, z_prev: Matrix) -> tuple[Matrix, Any]:
        ...

    @abc.abstractmethod
    def backward(self, params: Params, prefix: str, operator: Any, cache: Any, dz: Matrix) -> LayerGrad:
        ...

    def adjacency_grad(self, adjacency: Matrix, operator: Any, d_operator: Matrix) -> Matrix:
        raise UnsupportedOperationError(f"adjacency gradient is not supported for {self.arch}")
