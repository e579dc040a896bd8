"""
k-fold cross-validation splits, plain or stratified on the labels
"""
from dataclasses import dataclass, field
from typing import List
import logging

import numpy as np
from django.core.exceptions import ValidationError
from sklearn.model_selection import KFold, StratifiedKFold

logger = logging.getLogger(__name__)

NORMAL = 'normal'
STRATIFIED = 'stratified'
CV_MODE_CHOICES = (
    (NORMAL, 'Normal cross-validation'),
    (STRATIFIED, 'Stratified cross-validation'),
)
CV_MODES = tuple(choice for choice, _ in CV_MODE_CHOICES)


@dataclass(frozen=True)
class CVConfig:
    k: int = 5
    stratified: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValidationError("Cross-validation needs at least 2 folds", code='invalid_folds')

    @property
    def mode(self) -> str:
        return STRATIFIED if self.stratified else NORMAL


@dataclass(frozen=True)
class Fold:
    index: int
    train: np.ndarray = field(repr=False)
    validation: np.ndarray = field(repr=False)


def fold_splitter(cv: CVConfig):
    """Shuffled scikit-learn splitter seeded with the run seed"""
    splitter = StratifiedKFold if cv.stratified else KFold
    return splitter(n_splits=cv.k, shuffle=True, random_state=cv.seed)


def make_folds(labels: np.ndarray, cv: CVConfig) -> List[Fold]:
    """k disjoint validation folds covering every row; each training side is the complement"""
    labels = np.asarray(labels)
    n = labels.shape[0]
    if n < cv.k:
        raise ValidationError(f"Cannot make {cv.k} folds from {n} rows", code='too_few_rows')
    try:
        splits = list(fold_splitter(cv).split(np.zeros((n, 1)), labels))
    except ValueError as e:
        # StratifiedKFold refuses when no class has k members
        raise ValidationError(f"Cannot make {cv.k} {cv.mode} folds: {e}", code='too_few_rows')
    folds = [
        Fold(index=number, train=np.sort(train), validation=np.sort(validation))
        for number, (train, validation) in enumerate(splits)
    ]
    logger.debug(f"{cv.mode} {cv.k}-fold split (seed={cv.seed}): "
                 f"validation sizes {[fold.validation.size for fold in folds]}")
    return folds
