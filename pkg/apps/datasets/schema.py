"""
Canonical tabular representation shared by every stage of the pipeline
"""
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError

logger = logging.getLogger(__name__)

NUMERICAL = 'numerical'
CATEGORICAL = 'categorical'

ATTRIBUTE_KIND_CHOICES = (
    (NUMERICAL, 'Numerical'),
    (CATEGORICAL, 'Categorical'),
)

# Missing cells hold pandas' NA sentinel; downstream code tests with isna(), never by value.
MISSING = pd.NA


@dataclass(frozen=True)
class Column:
    name: str
    kind: str
    vocabulary: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.kind not in dict(ATTRIBUTE_KIND_CHOICES):
            raise ValidationError(f"Unknown attribute kind '{self.kind}' for column {self.name}", code='invalid_schema')


@dataclass(frozen=True)
class Schema:
    columns: Tuple[Column, ...]
    label_column: str
    sensitive_column: str
    label_values: Tuple[str, str]
    favourable_label: str
    sensitive_values: Tuple[str, str]
    unprivileged_value: str
    allows_missing: bool = False

    def __post_init__(self):
        names = self.names()
        if len(set(names)) != len(names):
            raise ValidationError("Column names must be unique", code='invalid_schema')
        if self.label_column == self.sensitive_column:
            raise ValidationError("Label and sensitive columns must be distinct", code='invalid_schema')
        for required in (self.label_column, self.sensitive_column):
            if required not in names:
                raise ValidationError(f"Column {required} is not part of the schema", code='invalid_schema')
        if len(set(self.label_values)) != 2 or self.favourable_label not in self.label_values:
            raise ValidationError("Favourable label must be one of exactly two label values", code='invalid_schema')
        if len(set(self.sensitive_values)) != 2 or self.unprivileged_value not in self.sensitive_values:
            raise ValidationError("Unprivileged value must be one of exactly two sensitive values", code='invalid_schema')

    def names(self) -> List[str]:
        return [column.name for column in self.columns]

    def feature_names(self) -> List[str]:
        return [column.name for column in self.columns if column.name != self.label_column]

    def column(self, name: str) -> Column:
        for column in self.columns:
            if column.name == name:
                return column
        raise ValidationError(f"Column {name} is not part of the schema", code='missing_column')

    def has_column(self, name: str) -> bool:
        return name in self.names()

    @property
    def unfavourable_label(self) -> str:
        return next(value for value in self.label_values if value != self.favourable_label)

    @property
    def privileged_value(self) -> str:
        return next(value for value in self.sensitive_values if value != self.unprivileged_value)

    def with_column(self, column: Column, after: Optional[str] = None) -> 'Schema':
        """Return a schema with column appended (or inserted after another column)"""
        columns = list(self.columns)
        position = len(columns) if after is None else self.names().index(after) + 1
        columns.insert(position, column)
        return replace(self, columns=tuple(columns))

    def without_column(self, name: str) -> 'Schema':
        self.column(name)
        return replace(self, columns=tuple(column for column in self.columns if column.name != name))

    def replacing_column(self, column: Column) -> 'Schema':
        self.column(column.name)
        return replace(self, columns=tuple(column if existing.name == column.name else existing
                                           for existing in self.columns))


@dataclass(frozen=True)
class Dataset:
    name: str
    schema: Schema
    frame: pd.DataFrame = field(repr=False)

    def __post_init__(self):
        if list(self.frame.columns) != self.schema.names():
            raise ValidationError(
                f"Dataset {self.name}: frame columns {list(self.frame.columns)} do not match schema",
                code='invalid_schema',
            )
        if self.frame[self.schema.label_column].isna().any():
            raise ValidationError(f"Dataset {self.name}: label cells cannot be missing", code='missing_label')
        if not self.schema.allows_missing and self.frame.isna().any().any():
            raise ValidationError(f"Dataset {self.name}: missing values are not declared for this dataset",
                                  code='unexpected_missing')

    def __len__(self) -> int:
        return len(self.frame)

    def with_frame(self, frame: pd.DataFrame, schema: Optional[Schema] = None) -> 'Dataset':
        return Dataset(name=self.name, schema=schema or self.schema, frame=frame.reset_index(drop=True))

    def subset(self, positions: np.ndarray) -> 'Dataset':
        return self.with_frame(self.frame.iloc[np.sort(np.asarray(positions, dtype=np.int64))])

    def missing_rows(self) -> np.ndarray:
        return self.frame.isna().any(axis=1).to_numpy()

    def label_vector(self) -> np.ndarray:
        """1 where the row carries the favourable label, 0 otherwise"""
        return (self.frame[self.schema.label_column] == self.schema.favourable_label).to_numpy(dtype=np.int8)

    def sensitive_vector(self) -> np.ndarray:
        """1 for the privileged group, 0 for the unprivileged group"""
        column = self.frame[self.schema.sensitive_column]
        known = column.isin(self.schema.sensitive_values)
        if not known.all():
            raise ValidationError(
                f"Dataset {self.name}: sensitive column {self.schema.sensitive_column} is not binary yet",
                code='sensitive_not_binary',
            )
        return (column != self.schema.unprivileged_value).to_numpy(dtype=np.int8)

    def category_counts(self, name: str) -> Dict[str, int]:
        return {str(key): int(value) for key, value in self.frame[name].value_counts(dropna=True).items()}


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
