from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

import numpy as np

from .errors import DataError

SweepValue = Union[int, float, str]

CAD_TOLERANCE = 1e-9


@dataclass
class CellRecord:
    dataset: str
    attack: str
    victim: str
    widths: tuple[int, ...]
    seed: int
    clean_accuracy: float
    backdoor_accuracy: float
    asr: float
    cad: float
    sweep_param: Optional[SweepValue] = None
    runtime_seconds: Optional[float] = None

    def __post_init__(self) -> None:
        for metric in ("clean_accuracy", "backdoor_accuracy", "asr"):
            value = getattr(self, metric)
            if not 0.0 <= value <= 1.0:
                raise DataError(f"{self._label()}: {metric} {value} outside [0, 1]")
        expected = self.clean_accuracy - self.backdoor_accuracy
        if not abs(self.cad - expected) <= CAD_TOLERANCE:
            raise DataError(f"{self._label()}: cad {self.cad} differs from clean - backdoor accuracy {expected}")

    def _label(self) -> str:
        return f"{self.dataset}/{self.attack}/{self.victim} seed={self.seed}"

    def group_key(self) -> tuple[str, str, str, tuple[int, ...], str]:
        return (self.dataset, self.attack, self.victim, self.widths, _sweep_text(self.sweep_param))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dataset": self.dataset,
            "attack": self.attack,
            "victim": self.victim,
            "widths": list(self.widths),
            "seed": self.seed,
            "sweep_param": self.sweep_param,
            "clean_accuracy": self.clean_accuracy,
            "backdoor_accuracy": self.backdoor_accuracy,
            "asr": self.asr,
            "cad": self.cad,
            "runtime_seconds": self.runtime_seconds,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "CellRecord":
        return cls(
            dataset=str(payload["dataset"]),
            attack=str(payload["attack"]),
            victim=str(payload["victim"]),
            widths=tuple(int(width) for width in payload["widths"]),
            seed=int(payload["seed"]),
            clean_accuracy=float(payload["clean_accuracy"]),
            backdoor_accuracy=float(payload["backdoor_accuracy"]),
            asr=float(payload["asr"]),
            cad=float(payload["cad"]),
            sweep_param=payload.get("sweep_param"),
            runtime_seconds=payload.get("runtime_seconds"),
        )


@dataclass
class SummaryRow:
    dataset: str
    attack: str
    victim: str
    widths: tuple[int, ...]
    sweep_param: Optional[SweepValue]
    num_seeds: int
    clean_accuracy: float
    backdoor_accuracy: float
    asr: float
    cad: float
    runtime_seconds: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dataset": self.dataset,
            "attack": self.attack,
            "victim": self.victim,
            "widths": list(self.widths),
            "sweep_param": self.sweep_param,
            "num_seeds": self.num_seeds,
            "clean_accuracy": self.clean_accuracy,
            "backdoor_accuracy": self.backdoor_accuracy,
            "asr": self.asr,
            "cad": self.cad,
            "runtime_seconds": self.runtime_seconds,
        }


@dataclass
class ExperimentReport:
    experiment: str
    dataset: str
    target_class: int
    attacks: List[str]
    surrogate: Dict[str, Any]
    seeds: List[int]
    records: List[CellRecord] = field(default_factory=list)
    sweep_axis: Optional[str] = None
    sweep_values: List[SweepValue] = field(default_factory=list)
    wall_clock_seconds: Optional[float] = None

    def sorted_records(self) -> List[CellRecord]:
        seed_order = {seed: index for index, seed in enumerate(self.seeds)}
        sweep_order = {_sweep_text(value): index for index, value in enumerate(self.sweep_values)}
        attack_order = {name: index for index, name in enumerate(self.attacks)}
        return sorted(
            self.records,
            key=lambda record: (
                record.dataset,
                attack_order.get(record.attack, len(attack_order)),
                record.victim,
                record.widths,
                sweep_order.get(_sweep_text(record.sweep_param), len(sweep_order)),
                seed_order.get(record.seed, len(seed_order)),
            ),
        )

    def summary(self) -> List[SummaryRow]:
        """Arithmetic mean over seeds for every (attack, victim, widths, sweep value) group."""
        groups: Dict[tuple, List[CellRecord]] = {}
        for record in self.sorted_records():
            groups.setdefault(record.group_key(), []).append(record)
        rows: List[SummaryRow] = []
        for cells in groups.values():
            first = cells[0]
            runtimes = [cell.runtime_seconds for cell in cells if cell.runtime_seconds is not None]
            rows.append(
                SummaryRow(
                    dataset=first.dataset,
                    attack=first.attack,
                    victim=first.victim,
                    widths=first.widths,
                    sweep_param=first.sweep_param,
                    num_seeds=len(cells),
                    clean_accuracy=_mean(cell.clean_accuracy for cell in cells),
                    backdoor_accuracy=_mean(cell.backdoor_accuracy for cell in cells),
                    asr=_mean(cell.asr for cell in cells),
                    cad=_mean(cell.cad for cell in cells),
                    runtime_seconds=_mean(runtimes) if len(runtimes) == len(cells) else None,
                )
            )
        return rows

    def mean(self, attack: str, victim: str, metric: str, sweep_param: Optional[SweepValue] = None) -> float:
        for row in self.summary():
            if row.attack == attack and row.victim == victim and _sweep_text(row.sweep_param) == _sweep_text(sweep_param):
                return float(getattr(row, metric))
        raise KeyError(f"no cells for attack={attack} victim={victim} sweep={sweep_param}")

    def nested_results(self) -> Dict[str, Any]:
        # dataset -> attack -> victim -> seed -> cells (one per sweep value)
        nested: Dict[str, Any] = {}
        for record in self.sorted_records():
            victim_key = record.victim if not record.widths else f"{record.victim}[{','.join(map(str, record.widths))}]"
            by_seed = nested.setdefault(record.dataset, {}).setdefault(record.attack, {}).setdefault(victim_key, {})
            by_seed.setdefault(str(record.seed), []).append(record.to_dict())
        return nested

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "dataset": self.dataset,
            "target_class": self.target_class,
            "attacks": list(self.attacks),
            "surrogate": self.surrogate,
            "seeds": list(self.seeds),
            "sweep": {"axis": self.sweep_axis, "values": list(self.sweep_values)} if self.sweep_axis else None,
            "wall_clock_seconds": self.wall_clock_seconds,
            "records": [record.to_dict() for record in self.sorted_records()],
            "results": self.nested_results(),
            "summary": [row.to_dict() for row in self.summary()],
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ExperimentReport":
        sweep = payload.get("sweep") or {}
        return cls(
            experiment=str(payload["experiment"]),
            dataset=str(payload["dataset"]),
            target_class=int(payload["target_class"]),
            attacks=list(payload["attacks"]),
            surrogate=dict(payload.get("surrogate") or {}),
            seeds=[int(seed) for seed in payload["seeds"]],
            records=[CellRecord.from_dict(entry) for entry in payload.get("records", [])],
            sweep_axis=sweep.get("axis"),
            sweep_values=list(sweep.get("values", [])),
            wall_clock_seconds=payload.get("wall_clock_seconds"),
        )


def _sweep_text(value: Optional[SweepValue]) -> str:
    return "" if value is None else str(value)


def _mean(values) -> float:
    return float(np.mean(list(values)))
