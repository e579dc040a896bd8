"""
Prediction-level fairness relative to the fairness of the training subset
"""
from dataclasses import dataclass
from typing import Dict, Tuple

from .markers import UNDEFINED, MetricValue, is_undefined


@dataclass(frozen=True)
class RatioEntry:
    value: MetricValue
    substituted: bool


def fairness_ratio(prediction_metric: MetricValue, training_metric: MetricValue) -> RatioEntry:
    """
    prediction / training. When the training metric is exactly zero the ratio is
    meaningless and the prediction metric itself is reported with substituted=True.
    """
    if is_undefined(training_metric):
        return RatioEntry(value=UNDEFINED, substituted=False)
    if training_metric == 0:
        return RatioEntry(value=prediction_metric, substituted=True)
    if is_undefined(prediction_metric):
        return RatioEntry(value=UNDEFINED, substituted=False)
    return RatioEntry(value=prediction_metric / training_metric, substituted=False)


@dataclass(frozen=True)
class RatioReport:
    cvs_ratio: MetricValue
    cvs_ratio_abs: MetricValue
    cvs_substituted: bool
    npi_ratio: MetricValue
    npi_substituted: bool

    def as_dict(self) -> Dict[str, object]:
        return {
            'cvs_ratio': self.cvs_ratio,
            'cvs_ratio_abs': self.cvs_ratio_abs,
            'cvs_substituted': self.cvs_substituted,
            'npi_ratio': self.npi_ratio,
            'npi_substituted': self.npi_substituted,
        }


def fairness_ratios(prediction: Tuple[MetricValue, MetricValue], training: Tuple[MetricValue, MetricValue]) -> RatioReport:
    """Ratios for (cvs, npi) pairs"""
    cvs_entry = fairness_ratio(prediction[0], training[0])
    npi_entry = fairness_ratio(prediction[1], training[1])
    return RatioReport(
        cvs_ratio=cvs_entry.value,
        cvs_ratio_abs=UNDEFINED if is_undefined(cvs_entry.value) else abs(cvs_entry.value),
        cvs_substituted=cvs_entry.substituted,
        npi_ratio=npi_entry.value,
        npi_substituted=npi_entry.substituted,
    )
