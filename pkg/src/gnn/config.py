from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

DEFAULT_LAYER_WIDTHS = (16, 8)
DEFAULT_GAT_HEADS = 3
ARCHITECTURES = ("GCN", "GIN", "GSAGE", "GAT")


@dataclass(frozen=True)
class ModelConfig:
    """Architecture descriptor. Activation is ReLU and graph pooling is max, always."""

    arch: str = "GCN"
    input_dim: int = 1
    num_classes: int = 2
    layer_widths: tuple[int, ...] = DEFAULT_LAYER_WIDTHS
    gat_heads: int = DEFAULT_GAT_HEADS

    def __post_init__(self) -> None:
        object.__setattr__(self, "arch", self.arch.strip().upper())
        object.__setattr__(self, "layer_widths", tuple(int(width) for width in self.layer_widths))
        if self.arch not in ARCHITECTURES:
            raise ValueError(f"unsupported architecture: {self.arch}; available: {', '.join(ARCHITECTURES)}")
        if not self.layer_widths or any(width < 1 for width in self.layer_widths):
            raise ValueError(f"layer widths must be a non-empty list of positive ints, got {list(self.layer_widths)}")
        if self.input_dim < 1 or self.num_classes < 2:
            raise ValueError("input_dim must be >= 1 and num_classes >= 2")
        if self.arch == "GAT" and self.gat_heads < 1:
            raise ValueError("gat_heads must be >= 1")

    def with_arch(self, arch: str, layer_widths: tuple[int, ...] | None = None) -> "ModelConfig":
        return replace(self, arch=arch, layer_widths=layer_widths or self.layer_widths)

    def to_dict(self) -> dict[str, Any]:
        return {
            "arch": self.arch,
            "input_dim": self.input_dim,
            "num_classes": self.num_classes,
            "layer_widths": list(self.layer_widths),
            "gat_heads": self.gat_heads,
            "activation": "relu",
            "pooling": "max",
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "ModelConfig":
        return cls(
            arch=payload["arch"],
            input_dim=int(payload["input_dim"]),
            num_classes=int(payload["num_classes"]),
            layer_widths=tuple(payload["layer_widths"]),
            gat_heads=int(payload.get("gat_heads", DEFAULT_GAT_HEADS)),
        )


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.02
    weight_decay: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 100
    epochs: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be non-negative, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")

    def with_seed(self, seed: int) -> "TrainConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> dict[str, Any]:
        return {
            "optimizer": "adam",
            "lr": self.lr,
            "weight_decay": self.weight_decay,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "seed": self.seed,
        }
