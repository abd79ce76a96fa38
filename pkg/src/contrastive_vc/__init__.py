"""Realizability, shattering and sample-complexity tools for contrastive
learning with triplet, quadruplet and k-negative queries."""

from .core import (
    DEFAULT_CONFIG,
    EQUAL,
    KNEGATIVE,
    QUADRUPLET,
    TRIPLET,
    Config,
    EmbeddingModel,
    FeasibilityVerdict,
    HypothesisClass,
    MatrixModel,
    PartitionModel,
    QueryFile,
    QuerySet,
    Status,
    TreeModel,
    evaluate_label,
    induced_labels,
)
from .errors import ContrastiveError
from .realizability import realize
from .shattering import construct, is_shattered, vc_search

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONFIG", "EQUAL", "KNEGATIVE", "QUADRUPLET", "TRIPLET", "Config", "ContrastiveError",
    "EmbeddingModel", "FeasibilityVerdict", "HypothesisClass", "MatrixModel", "PartitionModel",
    "QueryFile", "QuerySet", "Status", "TreeModel", "construct", "evaluate_label",
    "induced_labels", "is_shattered", "realize", "vc_search",
]
