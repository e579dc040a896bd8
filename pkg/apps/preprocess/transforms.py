"""
Attribute transformations applied before encoding: discretisation, pooling and column removal
"""
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple
import logging

import numpy as np
from django.core.exceptions import ValidationError

from apps.datasets.schema import CATEGORICAL, MISSING, NUMERICAL, Column, Dataset

logger = logging.getLogger(__name__)

POOL_VALUE = 'Pool'
DEFAULT_POOL_THRESHOLD = 50
AGE_THRESHOLD = 25
QUARTILES = (0.25, 0.5, 0.75)


def _format_bound(value: float) -> str:
    return f"{value:g}"


@dataclass(frozen=True)
class BinRule:
    column: str
    boundaries: Tuple[float, ...]
    bin_labels: Tuple[str, ...]

    def __post_init__(self):
        if any(later <= earlier for earlier, later in zip(self.boundaries, self.boundaries[1:])):
            raise ValidationError(f"Bin boundaries for {self.column} must be strictly increasing",
                                  code='invalid_bins')
        if len(self.bin_labels) != len(self.boundaries) + 1:
            raise ValidationError(f"{self.column}: {len(self.boundaries)} boundaries need "
                                  f"{len(self.boundaries) + 1} labels", code='invalid_bins')

    @classmethod
    def from_boundaries(cls, column: str, boundaries: Iterable[float]) -> 'BinRule':
        """Label bins as right-closed intervals between consecutive boundaries"""
        cuts = [float(b) for b in boundaries]
        edges = ['-inf'] + [_format_bound(b) for b in cuts] + ['inf']
        labels = []
        for i in range(len(cuts) + 1):
            closing = ']' if i < len(cuts) else ')'
            labels.append(f"({edges[i]}, {edges[i + 1]}{closing}")
        return cls(column=column, boundaries=tuple(cuts), bin_labels=tuple(labels))

    def assign(self, values: np.ndarray) -> np.ndarray:
        """Bin index per value: boundaries[i-1] < x <= boundaries[i]"""
        return np.searchsorted(np.asarray(self.boundaries, dtype=float), values, side='left')


def quartile_bins(dataset: Dataset, column: str) -> BinRule:
    """Quartile cut points with linear interpolation between order statistics; ties collapse bins"""
    if dataset.schema.column(column).kind != NUMERICAL:
        raise ValidationError(f"Column {column} is not numerical", code='not_numerical')
    values = dataset.frame[column].dropna().to_numpy(dtype=float)
    if values.size == 0:
        raise ValidationError(f"Column {column} has no values to discretise", code='empty')
    cuts = np.unique(np.quantile(values, QUARTILES, method='linear'))
    if values.min() == values.max():
        cuts = np.array([], dtype=float)
    rule = BinRule.from_boundaries(column, cuts)
    logger.debug(f"Quartile bins for {dataset.name}.{column}: {rule.boundaries}")
    return rule


def discretise(dataset: Dataset, rules: Iterable[BinRule]) -> Dataset:
    """Replace each ruled numerical column by its bin labels; missing cells stay missing"""
    frame = dataset.frame.copy()
    schema = dataset.schema
    for rule in rules:
        if schema.column(rule.column).kind != NUMERICAL:
            raise ValidationError(f"Column {rule.column} is already categorical", code='not_numerical')
        values = frame[rule.column]
        present = values.notna().to_numpy()
        labelled = np.full(len(frame), MISSING, dtype=object)
        indices = rule.assign(values[present].to_numpy(dtype=float))
        labelled[present] = np.asarray(rule.bin_labels, dtype=object)[indices]
        frame[rule.column] = labelled
        schema = schema.replacing_column(Column(rule.column, CATEGORICAL, rule.bin_labels))
    return dataset.with_frame(frame, schema)


def discretise_quartiles(train: Dataset, others: Iterable[Dataset] = ()) -> Tuple[Dataset, List[Dataset], List[BinRule]]:
    """Compute quartile rules on train only, then apply the frozen rules to train and others"""
    rules = [quartile_bins(train, column.name) for column in train.schema.columns if column.kind == NUMERICAL]
    return discretise(train, rules), [discretise(other, rules) for other in others], rules


def binarise_age(dataset: Dataset, threshold: int = AGE_THRESHOLD) -> Dataset:
    """age >= threshold becomes 'aged', below it 'young'"""
    column = dataset.schema.column('age')
    if column.kind != NUMERICAL:
        raise ValidationError(f"Dataset {dataset.name}: age is already categorical", code='not_numerical')
    ages = dataset.frame['age']
    if ages.isna().any():
        raise ValidationError(f"Dataset {dataset.name}: age cannot be missing", code='missing_value')

    frame = dataset.frame.copy()
    frame['age'] = np.where(ages.to_numpy(dtype=float) >= threshold, 'aged', 'young').astype(object)
    schema = dataset.schema.replacing_column(Column('age', CATEGORICAL, ('aged', 'young')))
    return dataset.with_frame(frame, schema)


def pool_rare_bins(dataset: Dataset, threshold: int = DEFAULT_POOL_THRESHOLD,
                   columns: Optional[List[str]] = None) -> Dataset:
    """
    Merge every category seen fewer than threshold times into a single Pool category.

    By default applies to the categorical feature columns other than the sensitive
    attribute; numerical columns must not be passed (bins are never pooled).
    """
    schema = dataset.schema
    if columns is None:
        columns = [column.name for column in schema.columns
                   if column.kind == CATEGORICAL and column.name not in (schema.label_column, schema.sensitive_column)]

    frame = dataset.frame.copy()
    for name in columns:
        column = schema.column(name)
        if column.kind != CATEGORICAL:
            raise ValidationError(f"Column {name} is numerical and cannot be pooled", code='not_categorical')
        counts = dataset.category_counts(name)
        rare = sorted(category for category, count in counts.items() if count < threshold)
        if not rare:
            continue
        values = frame[name]
        frame[name] = values.where(~values.isin(rare), POOL_VALUE)
        vocabulary = tuple(c for c in (column.vocabulary or tuple(counts)) if c not in rare) + (POOL_VALUE,)
        schema = schema.replacing_column(Column(name, CATEGORICAL, vocabulary))
        logger.info(f"Pooled {len(rare)} rare categories of {dataset.name}.{name} into {POOL_VALUE}")
    return dataset.with_frame(frame, schema)


def remove_personal_status(dataset: Dataset) -> Dataset:
    """Drop personal-status-sex once sex has been derived from it"""
    if not dataset.schema.has_column('sex'):
        raise ValidationError(f"Dataset {dataset.name}: derive sex before removing personal-status-sex",
                              code='sex_not_derived')
    if not dataset.schema.has_column('personal-status-sex'):
        raise ValidationError(f"Dataset {dataset.name}: personal-status-sex already removed",
                              code='already_removed')
    frame = dataset.frame.drop(columns=['personal-status-sex'])
    return dataset.with_frame(frame, dataset.schema.without_column('personal-status-sex'))
