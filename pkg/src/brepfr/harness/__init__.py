"""Dataset handling, training, evaluation and ablation runs."""

from .data import batch_order, load_dataset_features, split_dataset
from .metrics import Metrics, compute_metrics, confusion_matrix, metrics_from_confusion
from .train import (
    ABLATION_VARIANTS,
    AblationRow,
    NonFiniteLossError,
    TrainConfig,
    TrainResult,
    evaluate,
    evaluate_model,
    format_ablation_table,
    predict,
    run_ablation,
    train,
)

__all__ = [
    "ABLATION_VARIANTS",
    "AblationRow",
    "Metrics",
    "NonFiniteLossError",
    "TrainConfig",
    "TrainResult",
    "batch_order",
    "compute_metrics",
    "confusion_matrix",
    "evaluate",
    "evaluate_model",
    "format_ablation_table",
    "load_dataset_features",
    "metrics_from_confusion",
    "predict",
    "run_ablation",
    "split_dataset",
    "train",
]
