from __future__ import annotations

from collections import Counter
import importlib
from pathlib import Path
import pkgutil
from typing import Dict, Type

from ..config import ModelConfig
from .base import GraphLayer, LayerGrad


package_dir = Path(__file__).resolve().parent
module_names = sorted(
    module_info.name
    for module_info in pkgutil.iter_modules([str(package_dir)])
    if not module_info.ispkg and not module_info.name.startswith("_") and module_info.name != "base"
)
[importlib.import_module(f".{module_name}", __name__) for module_name in module_names]

entries = [
    (layer_class.arch.strip().upper(), layer_class)
    for layer_class in GraphLayer.__subclasses__()
    if layer_class.__module__.startswith(f"{__name__}.")
    and isinstance(getattr(layer_class, "arch", None), str)
    and layer_class.arch.strip()
]
duplicates = sorted(name for name, count in Counter(name for name, _ in entries).items() if count > 1)
if duplicates:
    raise RuntimeError(f"Duplicate layer registration for: {', '.join(duplicates)}")
LAYER_REGISTRY: Dict[str, Type[GraphLayer]] = dict(sorted(entries, key=lambda item: item[0]))


def list_architectures() -> tuple[str, ...]:
    return tuple(LAYER_REGISTRY.keys())


def create_layer(config: ModelConfig) -> GraphLayer:
    key = config.arch.strip().upper()
    if key not in LAYER_REGISTRY:
        raise ValueError(f"Unsupported architecture: {config.arch}")
    return LAYER_REGISTRY[key](config)


__all__ = ["GraphLayer", "LayerGrad", "LAYER_REGISTRY", "create_layer", "list_architectures"]
