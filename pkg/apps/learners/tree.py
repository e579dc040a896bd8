"""
Decision tree over categorical features with binary category-subset splits
"""
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from django.core.exceptions import ValidationError

from .impurity import GINI, best_split

logger = logging.getLogger(__name__)

DECISION_TREE = 'decision_tree'
RANDOM_FOREST = 'random_forest'
MODEL_KIND_CHOICES = (
    (DECISION_TREE, 'Decision Tree'),
    (RANDOM_FOREST, 'Random Forest'),
)


@dataclass(frozen=True)
class Leaf:
    predicted_label: int
    class_counts: Tuple[int, int]  # (unfavourable, favourable)


@dataclass(frozen=True)
class Internal:
    feature: int
    left_categories: FrozenSet[int]
    right_categories: FrozenSet[int]
    left: 'TreeNode'
    right: 'TreeNode'
    class_counts: Tuple[int, int]
    n_left: int
    n_right: int

    @property
    def heavier_is_left(self) -> bool:
        return self.n_left >= self.n_right


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 30
    impurity: str = GINI
    min_instances_per_node: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValidationError("max_depth must be at least 1", code='invalid_config')
        if self.min_instances_per_node < 1:
            raise ValidationError("min_instances_per_node must be at least 1", code='invalid_config')


@dataclass(frozen=True)
class FittedModel:
    kind: str
    roots: Tuple[TreeNode, ...]
    n_features: int
    feature_names: Tuple[str, ...] = field(default=())

    @property
    def n_trees(self) -> int:
        return len(self.roots)


def _leaf(labels: np.ndarray, rows: np.ndarray) -> Leaf:
    n_pos = int(labels[rows].sum())
    n_neg = int(rows.size - n_pos)
    # ties go to the unfavourable label
    return Leaf(predicted_label=int(n_pos > n_neg), class_counts=(n_neg, n_pos))


def grow_tree(
    features: np.ndarray,
    labels: np.ndarray,
    rows: np.ndarray,
    cardinalities: np.ndarray,
    config: TreeConfig,
    candidates: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    depth: int = 0,
) -> TreeNode:
    """Recursive binary splitting until depth limit, purity, or no improving split"""
    n_pos = int(labels[rows].sum())
    if depth >= config.max_depth or n_pos in (0, rows.size) or rows.size < 2 * config.min_instances_per_node:
        return _leaf(labels, rows)

    n_features = features.shape[1]
    if candidates is None or candidates >= n_features:
        subset: Sequence[int] = np.arange(n_features)
    else:
        subset = np.sort(rng.choice(n_features, size=candidates, replace=False))

    split = best_split(features, labels, rows, subset, cardinalities, config.impurity, config.min_instances_per_node)
    if split is None:
        return _leaf(labels, rows)

    goes_left = np.isin(features[rows, split.feature], list(split.left_categories))
    left_rows, right_rows = rows[goes_left], rows[~goes_left]
    return Internal(
        feature=split.feature,
        left_categories=split.left_categories,
        right_categories=split.right_categories,
        left=grow_tree(features, labels, left_rows, cardinalities, config, candidates, rng, depth + 1),
        right=grow_tree(features, labels, right_rows, cardinalities, config, candidates, rng, depth + 1),
        class_counts=(int(rows.size - n_pos), n_pos),
        n_left=int(left_rows.size),
        n_right=int(right_rows.size),
    )


def _check_training_data(features: np.ndarray, labels: np.ndarray):
    if features.ndim != 2 or features.shape[0] == 0:
        raise ValidationError("Cannot fit a model on empty data", code='empty_data')
    if labels.shape != (features.shape[0],):
        raise ValidationError("Labels need one entry per row", code='shape_mismatch')


def infer_cardinalities(features: np.ndarray) -> np.ndarray:
    return (features.max(axis=0).astype(np.int64) + 1) if features.size else np.zeros(features.shape[1], dtype=np.int64)


def fit_tree(
    features: np.ndarray,
    labels: np.ndarray,
    config: TreeConfig = TreeConfig(),
    cardinalities: Optional[np.ndarray] = None,
    feature_names: Sequence[str] = (),
) -> FittedModel:
    _check_training_data(features, labels)
    cardinalities = infer_cardinalities(features) if cardinalities is None else np.asarray(cardinalities)
    root = grow_tree(features, labels, np.arange(features.shape[0]), cardinalities, config)
    return FittedModel(kind=DECISION_TREE, roots=(root,), n_features=features.shape[1],
                       feature_names=tuple(feature_names))


def route(node: TreeNode, features: np.ndarray, rows: np.ndarray, out: np.ndarray):
    """Write each row's leaf prediction into out; unseen categories follow the heavier child"""
    if isinstance(node, Leaf):
        out[rows] = node.predicted_label
        return
    values = features[rows, node.feature]
    in_left = np.isin(values, list(node.left_categories))
    in_right = np.isin(values, list(node.right_categories))
    unseen = ~(in_left | in_right)
    goes_left = in_left | (unseen & node.heavier_is_left)
    if goes_left.any():
        route(node.left, features, rows[goes_left], out)
    if (~goes_left).any():
        route(node.right, features, rows[~goes_left], out)


def _check_rows(model: FittedModel, features: np.ndarray):
    if features.ndim != 2 or features.shape[1] != model.n_features:
        raise ValidationError(
            f"Rows must have {model.n_features} features, got shape {features.shape}", code='malformed_row'
        )


def tree_votes(model: FittedModel, features: np.ndarray) -> np.ndarray:
    """Number of trees predicting the favourable label, per row"""
    features = np.asarray(features)
    _check_rows(model, features)
    votes = np.zeros(features.shape[0], dtype=np.int64)
    rows = np.arange(features.shape[0])
    for root in model.roots:
        out = np.zeros(features.shape[0], dtype=np.int64)
        route(root, features, rows, out)
        votes += out
    return votes


def predict(model: FittedModel, features: np.ndarray) -> np.ndarray:
    """Majority vote over the model's trees; ties go to the unfavourable label"""
    votes = tree_votes(model, features)
    return (2 * votes > model.n_trees).astype(np.int8)


def depth(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(depth(node.left), depth(node.right))


def dump_tree(model: FittedModel, category_names: Optional[Sequence[Sequence[str]]] = None) -> str:
    """Indented text rendering: split feature, left category subset and class counts per node"""
    lines: List[str] = []

    def feature_label(index: int) -> str:
        return model.feature_names[index] if index < len(model.feature_names) else f"x{index}"

    def category_label(feature: int, codes: FrozenSet[int]) -> str:
        names = category_names[feature] if category_names is not None else None
        return ', '.join(names[c] if names is not None and c < len(names) else str(c) for c in sorted(codes))

    def visit(node: TreeNode, indent: int):
        pad = '  ' * indent
        neg, pos = node.class_counts
        if isinstance(node, Leaf):
            lines.append(f"{pad}leaf -> {node.predicted_label} (neg={neg}, pos={pos})")
            return
        lines.append(f"{pad}{feature_label(node.feature)} in {{{category_label(node.feature, node.left_categories)}}} "
                     f"(neg={neg}, pos={pos})")
        visit(node.left, indent + 1)
        lines.append(f"{pad}else")
        visit(node.right, indent + 1)

    for number, root in enumerate(model.roots):
        if model.n_trees > 1:
            lines.append(f"tree {number}")
        visit(root, 1 if model.n_trees > 1 else 0)
    return '\n'.join(lines) + '\n'
