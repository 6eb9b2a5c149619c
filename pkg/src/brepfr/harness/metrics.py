"""Face-level classification metrics computed exactly from integer counts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    """``C[t, p]`` = number of faces with ground truth t predicted as p."""
    y_true = np.asarray(y_true, dtype=np.int64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.int64).ravel()
    if y_true.shape != y_pred.shape:
        raise ValueError("label and prediction counts differ")
    for name, arr in (("label", y_true), ("prediction", y_pred)):
        if arr.size and (arr.min() < 0 or arr.max() >= n_classes):
            raise ValueError(f"{name} outside [0, {n_classes})")
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


@dataclass
class Metrics:
    accuracy: Fraction
    class_accuracy: Fraction
    miou: Fraction
    per_class_iou: dict[int, Fraction]
    per_class_recall: dict[int, Fraction]
    confusion: np.ndarray

    def to_dict(self) -> dict:
        return {
            "accuracy": float(self.accuracy),
            "class_accuracy": float(self.class_accuracy),
            "miou": float(self.miou),
            "per_class_iou": {str(k): float(v) for k, v in self.per_class_iou.items()},
            "per_class_recall": {str(k): float(v) for k, v in self.per_class_recall.items()},
            "confusion": self.confusion.tolist(),
        }


def metrics_from_confusion(cm: np.ndarray) -> Metrics:
    """Pooled accuracy, mean recall over present classes, and mean IoU over seen classes.

    A class counts as present for the recall mean when it occurs in the
    ground truth, and for the IoU mean when it occurs in either the ground
    truth or the predictions; other classes have undefined ratios.
    """
    cm = np.asarray(cm, dtype=np.int64)
    total = int(cm.sum())
    if total == 0:
        raise ValueError("no faces to score")
    tp = np.diag(cm)
    support = cm.sum(axis=1)
    predicted = cm.sum(axis=0)
    recall = {k: Fraction(int(tp[k]), int(support[k])) for k in range(len(cm)) if support[k] > 0}
    iou = {
        k: Fraction(int(tp[k]), int(support[k] + predicted[k] - tp[k]))
        for k in range(len(cm))
        if support[k] + predicted[k] > 0
    }
    return Metrics(
        accuracy=Fraction(int(tp.sum()), total),
        class_accuracy=sum(recall.values(), Fraction(0)) / len(recall),
        miou=sum(iou.values(), Fraction(0)) / len(iou),
        per_class_iou=iou,
        per_class_recall=recall,
        confusion=cm,
    )


def compute_metrics(y_true, y_pred, n_classes: int | None = None) -> Metrics:
    y_true = np.asarray(y_true, dtype=np.int64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.int64).ravel()
    if n_classes is None:
        n_classes = int(max(y_true.max(initial=-1), y_pred.max(initial=-1))) + 1
    return metrics_from_confusion(confusion_matrix(y_true, y_pred, n_classes))
