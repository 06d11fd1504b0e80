"""Information-based classification of elementary cellular automata."""

__version__ = "0.1.0"

from .classifier import (
    ClassificationRecord,
    ClassificationThresholds,
    ExperimentConfig,
    InformationClassifier,
    assign_class,
    max_normalized_change,
    run_classification,
)
from .coarse import Projection, induced_coarse_rule, search_transitions, verify_coarse_graining
from .entropy import TEConfig, TransferEntropyTransformer, mean_te, te_matrix, transfer_entropy
from .rules import Symmetry, equivalence_set, evolve, representatives, rule_output, step

__all__ = [
    "ClassificationRecord",
    "ClassificationThresholds",
    "ExperimentConfig",
    "InformationClassifier",
    "Projection",
    "Symmetry",
    "TEConfig",
    "TransferEntropyTransformer",
    "assign_class",
    "equivalence_set",
    "evolve",
    "induced_coarse_rule",
    "max_normalized_change",
    "mean_te",
    "representatives",
    "rule_output",
    "run_classification",
    "search_transitions",
    "step",
    "te_matrix",
    "transfer_entropy",
    "verify_coarse_graining",
]
