"""
Confusion matrix and predictive performance, favourable label as the positive class
"""
from dataclasses import dataclass
from typing import Dict
import logging

import numpy as np
from django.core.exceptions import ValidationError

from .markers import MetricValue, ratio

logger = logging.getLogger(__name__)

PERFORMANCE_METRICS = ('accuracy', 'precision', 'recall', 'specificity', 'fpr', 'f1')


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise ValidationError("Confusion counts must be non-negative", code='invalid_counts')

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


def _binary_pair(labels, predictions):
    labels = np.asarray(labels)
    predictions = np.asarray(predictions)
    if labels.shape != predictions.shape or labels.ndim != 1:
        raise ValidationError(
            f"Labels and predictions differ in length ({labels.shape} vs {predictions.shape})",
            code='length_mismatch',
        )
    return labels, predictions


def confusion(labels, predictions, favourable_label: int = 1) -> ConfusionMatrix:
    labels, predictions = _binary_pair(labels, predictions)
    actual = labels == favourable_label
    predicted = predictions == favourable_label
    return ConfusionMatrix(
        tp=int(np.sum(actual & predicted)),
        fn=int(np.sum(actual & ~predicted)),
        fp=int(np.sum(~actual & predicted)),
        tn=int(np.sum(~actual & ~predicted)),
    )


def performance(cm: ConfusionMatrix) -> Dict[str, MetricValue]:
    """Metrics with a zero denominator come back as UNDEFINED"""
    specificity = ratio(cm.tn, cm.tn + cm.fp)
    return {
        'accuracy': ratio(cm.tp + cm.tn, cm.total),
        'precision': ratio(cm.tp, cm.tp + cm.fp),
        'recall': ratio(cm.tp, cm.tp + cm.fn),
        'specificity': specificity,
        'fpr': ratio(cm.fp, cm.tn + cm.fp),
        'f1': ratio(2 * cm.tp, 2 * cm.tp + cm.fn + cm.fp),
    }
