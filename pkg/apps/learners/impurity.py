"""
Gini impurity and binary category-subset split search
"""
from dataclasses import dataclass
from typing import FrozenSet, Optional, Sequence
import logging

import numpy as np
from django.core.exceptions import ValidationError

logger = logging.getLogger(__name__)

GINI = 'gini'
IMPURITY_CHOICES = (
    (GINI, 'Gini index'),
)

# Accepted splits must beat the parent by more than float noise.
MIN_GAIN = 1e-12


def gini(counts: Sequence[int]) -> float:
    """1 - sum(p_i^2) over class proportions"""
    counts = np.asarray(counts, dtype=float)
    if (counts < 0).any():
        raise ValidationError("Class counts must be non-negative", code='invalid_counts')
    total = counts.sum()
    if total <= 0:
        raise ValidationError("Gini index is undefined for an empty node", code='empty_node')
    proportions = counts / total
    return float(1.0 - np.sum(proportions ** 2))


@dataclass(frozen=True)
class Split:
    feature: int
    left_categories: FrozenSet[int]
    right_categories: FrozenSet[int]
    gain: float
    n_left: int
    n_right: int


def best_split(
    features: np.ndarray,
    labels: np.ndarray,
    rows: np.ndarray,
    feature_subset: Sequence[int],
    cardinalities: np.ndarray,
    impurity: str = GINI,
    min_instances: int = 1,
) -> Optional[Split]:
    """
    Best binary category-subset split of rows over the candidate features.

    Categories observed at the node are ordered by their favourable-label rate (ties
    by code) and every prefix of that order is scored as a left child. For two
    classes under Gini this ordering contains the optimal subset split. Ties between
    candidates resolve to the earliest feature in feature_subset, then the shortest prefix.
    Returns None when no split improves impurity.
    """
    if impurity != GINI:
        raise ValidationError(f"Unsupported impurity {impurity}", code='invalid_impurity')
    rows = np.asarray(rows, dtype=np.int64)
    subset = np.asarray(feature_subset, dtype=np.int64)
    if rows.size == 0 or subset.size == 0:
        return None

    y = labels[rows].astype(np.int64)
    n = rows.size
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == n:
        return None
    parent = 2.0 * n_pos * (n - n_pos) / (n * n)

    k_max = int(cardinalities[subset].max())
    block = features[np.ix_(rows, subset)].astype(np.int64)
    offsets = (np.arange(subset.size, dtype=np.int64) * k_max * 2)[None, :]
    flat = np.bincount((block * 2 + y[:, None] + offsets).ravel(), minlength=subset.size * k_max * 2)
    table = flat.reshape(subset.size, k_max, 2).astype(float)
    neg, pos = table[:, :, 0], table[:, :, 1]
    totals = neg + pos
    observed = totals > 0

    with np.errstate(invalid='ignore', divide='ignore'):
        rate = np.where(observed, pos / totals, np.inf)
    order = np.argsort(rate, axis=1, kind='stable')
    pos_sorted = np.take_along_axis(pos, order, axis=1)
    tot_sorted = np.take_along_axis(totals, order, axis=1)

    # prefix j+1 categories go left, for j = 0 .. k_max-2
    left_pos = np.cumsum(pos_sorted, axis=1)[:, :-1]
    left_n = np.cumsum(tot_sorted, axis=1)[:, :-1]
    right_pos = n_pos - left_pos
    right_n = n - left_n
    n_observed = observed.sum(axis=1)
    cut_valid = (np.arange(k_max - 1)[None, :] < (n_observed[:, None] - 1))
    cut_valid &= (left_n >= min_instances) & (right_n >= min_instances)

    with np.errstate(invalid='ignore', divide='ignore'):
        left_term = np.where(left_n > 0, left_pos * (left_n - left_pos) / left_n, 0.0)
        right_term = np.where(right_n > 0, right_pos * (right_n - right_pos) / right_n, 0.0)
    weighted = 2.0 * (left_term + right_term) / n
    gains = np.where(cut_valid, parent - weighted, -np.inf)

    if gains.size == 0:
        return None
    best = int(np.argmax(gains))
    feature_pos, cut = divmod(best, k_max - 1)
    gain = float(gains[feature_pos, cut])
    if not gain > MIN_GAIN:
        return None

    n_obs = int(n_observed[feature_pos])
    ranked = order[feature_pos, :n_obs]
    left = frozenset(int(c) for c in ranked[:cut + 1])
    right = frozenset(int(c) for c in ranked[cut + 1:])
    return Split(
        feature=int(subset[feature_pos]),
        left_categories=left,
        right_categories=right,
        gain=gain,
        n_left=int(left_n[feature_pos, cut]),
        n_right=int(right_n[feature_pos, cut]),
    )
