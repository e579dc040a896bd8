"""
Random undersampling of a training fold w.r.t. labels, the sensitive attribute, or both
"""
from dataclasses import dataclass, field
from typing import Dict, Tuple
import logging

import numpy as np
from django.core.exceptions import ValidationError

logger = logging.getLogger(__name__)

WITHOUT_RESAMPLING = 'without_resampling'
UNDERSAMPLING_LABEL = 'undersampling_label'
UNDERSAMPLING_PROTECTED = 'undersampling_protected'
UNDERSAMPLING_MULTIVARIATE = 'undersampling_multivariate'

STRATEGY_CHOICES = (
    (WITHOUT_RESAMPLING, 'Without resampling'),
    (UNDERSAMPLING_LABEL, 'Undersampling w.r.t. the true labels'),
    (UNDERSAMPLING_PROTECTED, 'Undersampling w.r.t. the sensitive attribute'),
    (UNDERSAMPLING_MULTIVARIATE, 'Undersampling w.r.t. labels and sensitive attribute'),
)
STRATEGIES = tuple(choice for choice, _ in STRATEGY_CHOICES)


@dataclass(frozen=True)
class SampledSubset:
    indices: np.ndarray = field(repr=False)
    strategy: str
    seed: int

    def __len__(self) -> int:
        return len(self.indices)


def _grouping_key(labels: np.ndarray, sensitive: np.ndarray, strategy: str) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Group code per row and the group codes the strategy must equalise"""
    if strategy == UNDERSAMPLING_LABEL:
        return labels.astype(np.int64), (0, 1)
    if strategy == UNDERSAMPLING_PROTECTED:
        return sensitive.astype(np.int64), (0, 1)
    # (label, sensitive) -> 2 * label + sensitive, matching the canonical cell order
    return 2 * labels.astype(np.int64) + sensitive.astype(np.int64), (0, 1, 2, 3)


def undersample(fold: np.ndarray, labels: np.ndarray, sensitive: np.ndarray, strategy: str, seed: int) -> SampledSubset:
    """
    Keep the smallest group whole and draw that many rows from every other group.

    labels and sensitive are indexed by the parent dataset's row positions; fold holds
    the positions eligible for sampling. The result is sorted by position.
    """
    if strategy not in STRATEGIES:
        raise ValidationError(f"Unknown sampling strategy {strategy}", code='invalid_strategy')
    fold = np.asarray(fold, dtype=np.int64)
    if fold.size == 0:
        raise ValidationError("Cannot sample an empty fold", code='empty_fold')
    if strategy == WITHOUT_RESAMPLING:
        return SampledSubset(indices=np.sort(fold), strategy=strategy, seed=seed)

    keys, groups = _grouping_key(labels[fold], sensitive[fold], strategy)
    members = {group: fold[keys == group] for group in groups}
    empty = [group for group, rows in members.items() if rows.size == 0]
    if empty:
        raise ValidationError(f"{strategy}: group(s) {empty} have no instances in the fold", code='empty_cell')

    target = min(rows.size for rows in members.values())
    rng = np.random.default_rng(seed)
    kept = []
    for group in groups:
        rows = np.sort(members[group])
        kept.append(rows if rows.size == target else rng.permutation(rows)[:target])
    indices = np.sort(np.concatenate(kept))

    logger.debug(f"{strategy} (seed={seed}): {fold.size} -> {indices.size} rows, {target} per group")
    return SampledSubset(indices=indices, strategy=strategy, seed=seed)


def cell_counts(indices: np.ndarray, labels: np.ndarray, sensitive: np.ndarray) -> Dict[str, int]:
    """Joint (label, sensitive) counts keyed pos_priv / pos_unpriv / neg_priv / neg_unpriv"""
    y = labels[indices]
    s = sensitive[indices]
    return {
        'pos_priv': int(np.sum((y == 1) & (s == 1))),
        'pos_unpriv': int(np.sum((y == 1) & (s == 0))),
        'neg_priv': int(np.sum((y == 0) & (s == 1))),
        'neg_unpriv': int(np.sum((y == 0) & (s == 0))),
    }


def verify_balance(subset: SampledSubset, labels: np.ndarray, sensitive: np.ndarray) -> Dict[str, object]:
    """Cell/class/group counts of a subset and whether the strategy's equality contract holds"""
    cells = cell_counts(subset.indices, labels, sensitive)
    classes = {'pos': cells['pos_priv'] + cells['pos_unpriv'], 'neg': cells['neg_priv'] + cells['neg_unpriv']}
    groups = {'priv': cells['pos_priv'] + cells['neg_priv'], 'unpriv': cells['pos_unpriv'] + cells['neg_unpriv']}

    labels_equal = classes['pos'] == classes['neg']
    groups_equal = groups['priv'] == groups['unpriv']
    cells_equal = len(set(cells.values())) == 1
    contract = {
        WITHOUT_RESAMPLING: True,
        UNDERSAMPLING_LABEL: labels_equal,
        UNDERSAMPLING_PROTECTED: groups_equal,
        UNDERSAMPLING_MULTIVARIATE: cells_equal,
    }[subset.strategy]

    return {
        'strategy': subset.strategy,
        'seed': subset.seed,
        'rows': len(subset),
        'cells': cells,
        'classes': classes,
        'groups': groups,
        'labels_equal': labels_equal,
        'groups_equal': groups_equal,
        'cells_equal': cells_equal,
        'contract_holds': contract,
    }
