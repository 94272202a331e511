"""GCN surrogate and GIN / GraphSAGE / GAT victims with hand-written backward passes."""

from .checkpoint import load_checkpoint, save_checkpoint, state_from_dict, state_to_dict
from .config import ARCHITECTURES, ModelConfig, TrainConfig
from .layers import list_architectures
from .layers.gcn import normalize_adjacency
from .model import (
    ForwardTrace,
    Gradients,
    ModelState,
    accuracy,
    backward,
    backward_from_logits,
    forward,
    forward_dense,
    init_state,
    loss_dense,
    predict,
    zero_state,
)
from .optim import AdamState, adam_step
from .training import train

__all__ = [
    "ARCHITECTURES",
    "AdamState",
    "ForwardTrace",
    "Gradients",
    "ModelConfig",
    "ModelState",
    "TrainConfig",
    "accuracy",
    "adam_step",
    "backward",
    "backward_from_logits",
    "forward",
    "forward_dense",
    "init_state",
    "list_architectures",
    "load_checkpoint",
    "loss_dense",
    "normalize_adjacency",
    "predict",
    "save_checkpoint",
    "state_from_dict",
    "state_to_dict",
    "train",
    "zero_state",
]
