"""Self-describing JSON checkpoints; arrays are base64 little-endian float64, so round-trips are bit-exact."""

from __future__ import annotations

import base64
import json
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import DataError
from ..io_helpers import write_json
from .config import ModelConfig
from .model import ModelState

CHECKPOINT_FORMAT = "gblab-checkpoint/1"


def encode_array(array: np.ndarray) -> dict[str, Any]:
    return {
        "shape": list(array.shape),
        "dtype": "<f8",
        "data": base64.b64encode(np.ascontiguousarray(array, dtype="<f8").tobytes()).decode("ascii"),
    }


def decode_array(payload: dict[str, Any]) -> np.ndarray:
    if payload.get("dtype") != "<f8":
        raise DataError(f"unsupported checkpoint dtype: {payload.get('dtype')!r}")
    raw = base64.b64decode(payload["data"])
    return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(payload["shape"])


def state_to_dict(state: ModelState) -> dict[str, Any]:
    return {
        "format": CHECKPOINT_FORMAT,
        "config": state.config.to_dict(),
        "params": [{"name": name, **encode_array(value)} for name, value in state.params.items()],
    }


def state_from_dict(payload: dict[str, Any]) -> ModelState:
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise DataError(f"not a checkpoint: format={payload.get('format')!r}")
    config = ModelConfig.from_dict(payload["config"])
    params = {entry["name"]: decode_array(entry) for entry in payload["params"]}
    return ModelState(config=config, params=params)


def save_checkpoint(state: ModelState, path: Path) -> Path:
    return write_json(path, state_to_dict(state))


def load_checkpoint(path: Path) -> ModelState:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read checkpoint {path}: {exc}") from None
    return state_from_dict(payload)
