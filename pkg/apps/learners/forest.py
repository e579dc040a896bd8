"""
Random forest: bootstrapped trees with per-split random feature subsets
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence
import logging
import math

import numpy as np
from django.core.exceptions import ValidationError

from .tree import RANDOM_FOREST, FittedModel, TreeConfig, _check_training_data, grow_tree, infer_cardinalities

logger = logging.getLogger(__name__)


def sqrt_candidates(n_features: int) -> int:
    return max(1, int(math.floor(math.sqrt(n_features))))


@dataclass(frozen=True)
class ForestConfig:
    tree_config: TreeConfig = field(default_factory=TreeConfig)
    n_trees: int = 10
    # None means floor(sqrt(number of features))
    candidates_per_split: Optional[int] = None
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValidationError("n_trees must be at least 1", code='invalid_config')
        if self.candidates_per_split is not None and self.candidates_per_split < 1:
            raise ValidationError("candidates_per_split must be at least 1", code='invalid_config')

    def candidates_for(self, n_features: int) -> int:
        if self.candidates_per_split is None:
            return sqrt_candidates(n_features)
        return min(self.candidates_per_split, n_features)


def fit_forest(
    features: np.ndarray,
    labels: np.ndarray,
    config: ForestConfig = ForestConfig(),
    cardinalities: Optional[np.ndarray] = None,
    feature_names: Sequence[str] = (),
) -> FittedModel:
    """
    Fit n_trees trees. Each tree draws its own generator from the forest seed, so
    the fitted forest depends only on (data, config) and not on fitting order.
    """
    _check_training_data(features, labels)
    cardinalities = infer_cardinalities(features) if cardinalities is None else np.asarray(cardinalities)
    n_rows, n_features = features.shape
    candidates = config.candidates_for(n_features)

    roots = []
    for child in np.random.SeedSequence(config.tree_config.seed).spawn(config.n_trees):
        rng = np.random.default_rng(child)
        rows = np.sort(rng.integers(0, n_rows, size=n_rows)) if config.bootstrap else np.arange(n_rows)
        roots.append(grow_tree(features, labels, rows, cardinalities, config.tree_config, candidates, rng))

    logger.debug(f"Fitted forest of {config.n_trees} trees on {n_rows} rows, {candidates}/{n_features} features per split")
    return FittedModel(kind=RANDOM_FOREST, roots=tuple(roots), n_features=n_features,
                       feature_names=tuple(feature_names))
