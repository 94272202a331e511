from __future__ import annotations

from collections import Counter
import importlib
from pathlib import Path
import pkgutil
from typing import Dict, Optional, Type

from .base import AttackSettings, BackdoorAttack, PoisonPlan, PoisonResult


package_dir = Path(__file__).resolve().parent
module_names = sorted(
    module_info.name
    for module_info in pkgutil.iter_modules([str(package_dir)])
    if not module_info.ispkg and not module_info.name.startswith("_") and module_info.name != "base"
)
[importlib.import_module(f".{module_name}", __name__) for module_name in module_names]

entries = [
    (attack_class.name.strip().lower(), attack_class)
    for attack_class in BackdoorAttack.__subclasses__()
    if attack_class.__module__.startswith(f"{__name__}.")
    and isinstance(getattr(attack_class, "name", None), str)
    and attack_class.name.strip()
]
duplicates = sorted(name for name, count in Counter(name for name, _ in entries).items() if count > 1)
if duplicates:
    raise RuntimeError(f"Duplicate attack registration for: {', '.join(duplicates)}")
ATTACK_REGISTRY: Dict[str, Type[BackdoorAttack]] = dict(sorted(entries, key=lambda item: item[0]))


def list_attacks() -> tuple[str, ...]:
    return tuple(ATTACK_REGISTRY.keys())


def create_attack(name: str, settings: Optional[AttackSettings] = None) -> BackdoorAttack:
    key = name.strip().lower()
    if key not in ATTACK_REGISTRY:
        raise ValueError(f"Unsupported attack: {name}")
    return ATTACK_REGISTRY[key](settings)


__all__ = [
    "ATTACK_REGISTRY",
    "AttackSettings",
    "BackdoorAttack",
    "PoisonPlan",
    "PoisonResult",
    "create_attack",
    "list_attacks",
]
