"""Graphs, datasets, splits and TUDataset I/O."""

from .graph import Dataset, Graph, changed_pairs, flip_edge, flip_edges
from .splits import SplitPlan, split, target_class
from .synth import CANONICAL_CLASSES, CANONICAL_FEATURE_DIM, ClassSpec, canonical_dataset, erdos_renyi_adjacency, synth_dataset
from .tudataset import export_tudataset, load_tudataset

__all__ = [
    "CANONICAL_CLASSES",
    "CANONICAL_FEATURE_DIM",
    "ClassSpec",
    "Dataset",
    "Graph",
    "SplitPlan",
    "canonical_dataset",
    "changed_pairs",
    "erdos_renyi_adjacency",
    "export_tudataset",
    "flip_edge",
    "flip_edges",
    "load_tudataset",
    "split",
    "synth_dataset",
    "target_class",
]
