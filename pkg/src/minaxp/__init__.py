"""Minimum-size abductive explanations for linear classifiers with a reject option.

An abductive explanation pins a subset of an instance's feature values such
that the classifier's output is forced for every completion of the remaining
features within their bounded domains.  This package computes explanations
of provably minimum size: a log-linear greedy procedure for accepted
predictions and an exact 0-1 branch-and-bound solve for rejections, next to
a subset-minimal deletion baseline, brute-force verification oracles,
Chow-style threshold calibration, and file formats plus a CLI to tie a full
pipeline together.
"""

from .baseline import subset_minimal_explanation
from .calibration import (
    RiskConfig,
    RiskReport,
    TrainConfig,
    calibrate_thresholds,
    candidate_grid,
    evaluate_risk,
    train_logistic,
)
from .classified import GreedyTrace, explain_negative, explain_positive
from .dataio import (
    Dataset,
    ExplanationRecord,
    ModelBundle,
    ModelFormatError,
    ScalingInfo,
    aggregate_records,
    load_dataset,
    load_model,
    read_explanation_report,
    save_model,
    write_explanation_report,
)
from .explain import boundary_tight, explain_instance
from .model import (
    DEFAULT_EPSILON,
    CoefficientProfile,
    DomainError,
    Explanation,
    ExplanationKind,
    FeatureDomain,
    Instance,
    Label,
    LabelMismatchError,
    LinearModel,
    Prediction,
    RejectClassifier,
    coefficient_profile,
    is_valid_explanation,
    kind_for_label,
    predict,
    s_max,
    s_min,
    score,
    unit_box,
    validate_instance,
)
from .oracle import (
    MAX_ORACLE_FEATURES,
    brute_force_minimum,
    random_case,
    sampled_sufficiency_check,
)
from .rejected import (
    DEFAULT_NODE_LIMIT,
    DEFAULT_TIME_LIMIT,
    IlpSolution,
    RejectionIlp,
    build_rejection_ilp,
    explain_rejection,
    solve_rejection_ilp,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_EPSILON",
    "DEFAULT_NODE_LIMIT",
    "DEFAULT_TIME_LIMIT",
    "MAX_ORACLE_FEATURES",
    "CoefficientProfile",
    "Dataset",
    "DomainError",
    "Explanation",
    "ExplanationKind",
    "ExplanationRecord",
    "FeatureDomain",
    "GreedyTrace",
    "IlpSolution",
    "Instance",
    "Label",
    "LabelMismatchError",
    "LinearModel",
    "ModelBundle",
    "ModelFormatError",
    "Prediction",
    "RejectClassifier",
    "RejectionIlp",
    "RiskConfig",
    "RiskReport",
    "ScalingInfo",
    "TrainConfig",
    "aggregate_records",
    "boundary_tight",
    "brute_force_minimum",
    "build_rejection_ilp",
    "calibrate_thresholds",
    "candidate_grid",
    "coefficient_profile",
    "evaluate_risk",
    "explain_instance",
    "explain_negative",
    "explain_positive",
    "explain_rejection",
    "is_valid_explanation",
    "kind_for_label",
    "load_dataset",
    "load_model",
    "predict",
    "random_case",
    "read_explanation_report",
    "s_max",
    "s_min",
    "sampled_sufficiency_check",
    "save_model",
    "score",
    "solve_rejection_ilp",
    "subset_minimal_explanation",
    "train_logistic",
    "unit_box",
    "validate_instance",
    "write_explanation_report",
]
