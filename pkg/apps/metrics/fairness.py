"""
Group fairness of binary outcomes w.r.t. a binary sensitive attribute

Outcomes are true labels (data-level fairness) or predictions (model-level
fairness); sensitive 1 is the privileged group and outcome 1 the favourable label.
"""
from dataclasses import dataclass
from typing import Dict, Tuple
import logging
import math

import numpy as np
from django.core.exceptions import ValidationError
from scipy.stats import entropy

from .markers import UNDEFINED, MetricValue, is_undefined

logger = logging.getLogger(__name__)

FAIRNESS_METRICS = ('cvs', 'di', 'npi')

# Disparate impact strictly inside (0.8, 1.25) passes the 80% rule.
DI_LOWER = 0.8
DI_UPPER = 1.25


def joint_table(outcomes, sensitive) -> np.ndarray:
    """2x2 counts indexed [outcome, sensitive]"""
    outcomes = np.asarray(outcomes).astype(np.int64)
    sensitive = np.asarray(sensitive).astype(np.int64)
    if outcomes.shape != sensitive.shape or outcomes.ndim != 1:
        raise ValidationError("Outcomes and sensitive vectors differ in length", code='length_mismatch')
    if outcomes.size and (outcomes.min() < 0 or outcomes.max() > 1 or sensitive.min() < 0 or sensitive.max() > 1):
        raise ValidationError("Outcomes and sensitive values must be binary", code='not_binary')
    return np.bincount(2 * outcomes + sensitive, minlength=4).reshape(2, 2)


def group_rates(outcomes, sensitive) -> Tuple[float, float]:
    """(P(outcome=1 | privileged), P(outcome=1 | unprivileged))"""
    table = joint_table(outcomes, sensitive)
    group_sizes = table.sum(axis=0)
    if (group_sizes == 0).any():
        raise ValidationError("Both sensitive groups need at least one instance", code='empty_group')
    return table[1, 1] / group_sizes[1], table[1, 0] / group_sizes[0]


def cvs(outcomes, sensitive) -> float:
    """Calders-Verwer score: privileged favourable rate minus unprivileged favourable rate"""
    privileged, unprivileged = group_rates(outcomes, sensitive)
    return float(privileged - unprivileged)


def disparate_impact(outcomes, sensitive) -> MetricValue:
    privileged, unprivileged = group_rates(outcomes, sensitive)
    if privileged == 0:
        return UNDEFINED
    return float(unprivileged / privileged)


def passes_80_rule(di: MetricValue) -> bool:
    return not is_undefined(di) and DI_LOWER < di < DI_UPPER


def npi_from_table(table: np.ndarray) -> MetricValue:
    """Mutual information normalised by sqrt(H(outcome) H(sensitive)), natural log"""
    table = np.asarray(table, dtype=float)
    total = table.sum()
    if total == 0:
        return UNDEFINED
    h_outcome = entropy(table.sum(axis=1))
    h_sensitive = entropy(table.sum(axis=0))
    if h_outcome == 0 or h_sensitive == 0:
        return UNDEFINED
    joint = table / total
    independent = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    # KL(joint || product of marginals); exactly zero on balanced tables
    mutual_information = max(float(entropy(joint.ravel(), independent.ravel())), 0.0)
    return float(min(mutual_information / math.sqrt(h_outcome * h_sensitive), 1.0))


def npi(outcomes, sensitive) -> MetricValue:
    return npi_from_table(joint_table(outcomes, sensitive))


@dataclass(frozen=True)
class FairnessReport:
    cvs: float
    di: MetricValue
    npi: MetricValue
    passes_80_rule: bool
    privileged_rate: float
    unprivileged_rate: float

    def as_dict(self) -> Dict[str, object]:
        return {
            'cvs': self.cvs,
            'di': self.di,
            'npi': self.npi,
            'passes_80_rule': self.passes_80_rule,
            'privileged_rate': self.privileged_rate,
            'unprivileged_rate': self.unprivileged_rate,
        }


def fairness_report(outcomes, sensitive) -> FairnessReport:
    privileged, unprivileged = group_rates(outcomes, sensitive)
    di = disparate_impact(outcomes, sensitive)
    return FairnessReport(
        cvs=float(privileged - unprivileged),
        di=di,
        npi=npi(outcomes, sensitive),
        passes_80_rule=passes_80_rule(di),
        privileged_rate=float(privileged),
        unprivileged_rate=float(unprivileged),
    )


@dataclass(frozen=True)
class GroupSummary:
    # counts keyed as in the sampling cell tables
    counts: Dict[str, int]
    unprivileged_share: float
    favourable_share: float
    unprivileged_share_among_favourable: MetricValue


def group_summary(outcomes, sensitive) -> GroupSummary:
    table = joint_table(outcomes, sensitive)
    total = int(table.sum())
    if total == 0:
        raise ValidationError("Cannot summarise empty outcomes", code='empty_data')
    favourable = int(table[1].sum())
    return GroupSummary(
        counts={
            'pos_priv': int(table[1, 1]),
            'pos_unpriv': int(table[1, 0]),
            'neg_priv': int(table[0, 1]),
            'neg_unpriv': int(table[0, 0]),
        },
        unprivileged_share=float(table[:, 0].sum() / total),
        favourable_share=float(favourable / total),
        unprivileged_share_among_favourable=UNDEFINED if favourable == 0 else float(table[1, 0] / favourable),
    )
