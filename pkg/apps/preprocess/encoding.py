"""
Integer and one-hot encodings of a fully categorical Dataset
"""
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import logging

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError

from apps.datasets.schema import NUMERICAL, Dataset

logger = logging.getLogger(__name__)

INTEGER = 'integer'
ONE_HOT = 'one_hot'

ENCODING_CHOICES = (
    (INTEGER, 'Integer'),
    (ONE_HOT, 'One-hot'),
)


@dataclass(frozen=True)
class FeatureColumn:
    """Provenance of one encoded column"""
    source: str
    categories: Tuple[str, ...]
    category: Optional[str] = None

    @property
    def name(self) -> str:
        return self.source if self.category is None else f"{self.source}={self.category}"

    @property
    def cardinality(self) -> int:
        """Number of distinct codes the column can hold"""
        return len(self.categories) if self.category is None else 2


@dataclass(frozen=True)
class EncodedDataset:
    name: str
    kind: str
    features: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    sensitive: np.ndarray = field(repr=False)
    columns: Tuple[FeatureColumn, ...]
    sensitive_column: str
    sensitive_included: bool = True

    def __post_init__(self):
        if self.kind not in dict(ENCODING_CHOICES):
            raise ValidationError(f"Unknown encoding kind {self.kind}", code='invalid_encoding')
        rows = self.features.shape[0]
        if self.labels.shape != (rows,) or self.sensitive.shape != (rows,):
            raise ValidationError("Labels and sensitive vectors need one entry per feature row",
                                  code='shape_mismatch')
        if self.features.shape[1] != len(self.columns):
            raise ValidationError("Every feature column needs a provenance entry", code='shape_mismatch')
        for array in (self.features, self.labels, self.sensitive):
            array.setflags(write=False)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def column_names(self) -> List[str]:
        return [column.name for column in self.columns]

    def cardinalities(self) -> np.ndarray:
        return np.array([column.cardinality for column in self.columns], dtype=np.int64)

    def sensitive_positions(self) -> List[int]:
        return [i for i, column in enumerate(self.columns) if column.source == self.sensitive_column]

    def take(self, rows: np.ndarray) -> 'EncodedDataset':
        rows = np.asarray(rows, dtype=np.int64)
        return replace(self, features=self.features[rows], labels=self.labels[rows], sensitive=self.sensitive[rows])

    def decode_row(self, row: int) -> Dict[str, Optional[str]]:
        """Recover the source category of every attribute for one row (None where it was missing)"""
        decoded: Dict[str, Optional[str]] = {}
        for position, column in enumerate(self.columns):
            value = int(self.features[row, position])
            if column.category is None:
                decoded[column.source] = column.categories[value]
            else:
                decoded.setdefault(column.source, None)
                if value == 1:
                    decoded[column.source] = column.category
        return decoded


def _check_discretised(dataset: Dataset):
    numerical = [column.name for column in dataset.schema.columns if column.kind == NUMERICAL]
    if numerical:
        raise ValidationError(f"Dataset {dataset.name}: numerical columns {numerical} must be discretised first",
                              code='not_discretised')


def _factorize(values: pd.Series) -> Tuple[np.ndarray, Tuple[str, ...]]:
    """Codes by order of first occurrence; missing cells get -1"""
    codes, uniques = pd.factorize(values, sort=False, use_na_sentinel=True)
    return codes.astype(np.int64), tuple(str(category) for category in uniques)


def encode_integer(dataset: Dataset) -> EncodedDataset:
    """One small-integer code per category; rows with any missing cell are dropped"""
    _check_discretised(dataset)
    missing = dataset.missing_rows()
    if missing.any():
        logger.info(f"Integer encoding of {dataset.name}: dropping {int(missing.sum())} rows with missing values")
        dataset = dataset.subset(np.flatnonzero(~missing))

    schema = dataset.schema
    blocks, columns = [], []
    for name in schema.feature_names():
        codes, categories = _factorize(dataset.frame[name])
        blocks.append(codes)
        columns.append(FeatureColumn(source=name, categories=categories))

    features = np.column_stack(blocks).astype(np.int16) if blocks else np.zeros((len(dataset), 0), dtype=np.int16)
    return EncodedDataset(
        name=dataset.name,
        kind=INTEGER,
        features=features,
        labels=dataset.label_vector(),
        sensitive=dataset.sensitive_vector(),
        columns=tuple(columns),
        sensitive_column=schema.sensitive_column,
    )


def encode_one_hot(dataset: Dataset) -> EncodedDataset:
    """One indicator column per (attribute, category); missing cells leave all indicators at zero"""
    _check_discretised(dataset)
    schema = dataset.schema
    blocks, columns = [], []
    for name in schema.feature_names():
        codes, categories = _factorize(dataset.frame[name])
        indicators = (codes[:, None] == np.arange(len(categories))[None, :]).astype(np.int8)
        blocks.append(indicators)
        columns.extend(FeatureColumn(source=name, categories=categories, category=category) for category in categories)

    features = np.hstack(blocks) if blocks else np.zeros((len(dataset), 0), dtype=np.int8)
    return EncodedDataset(
        name=dataset.name,
        kind=ONE_HOT,
        features=features,
        labels=dataset.label_vector(),
        sensitive=dataset.sensitive_vector(),
        columns=tuple(columns),
        sensitive_column=schema.sensitive_column,
    )


ENCODERS = {
    INTEGER: encode_integer,
    ONE_HOT: encode_one_hot,
}


def encode(dataset: Dataset, kind: str) -> EncodedDataset:
    try:
        encoder = ENCODERS[kind]
    except KeyError:
        raise ValidationError(f"Unknown encoding kind {kind}", code='invalid_encoding')
    return encoder(dataset)


def remove_sensitive(encoded: EncodedDataset) -> EncodedDataset:
    """Drop the sensitive-derived feature columns; the sensitive vector is kept for metrics"""
    if not encoded.sensitive_included:
        raise ValidationError(f"Sensitive columns of {encoded.name} were already removed", code='already_removed')
    keep = [i for i, column in enumerate(encoded.columns) if column.source != encoded.sensitive_column]
    return replace(
        encoded,
        features=encoded.features[:, keep],
        columns=tuple(encoded.columns[i] for i in keep),
        sensitive_included=False,
    )


def flip_sensitive(encoded: EncodedDataset, rows: np.ndarray) -> EncodedDataset:
    """Swap the sensitive group of the given rows, in the feature columns and in the sensitive vector"""
    if not encoded.sensitive_included:
        raise ValidationError(f"Sensitive columns of {encoded.name} were already removed", code='already_removed')
    rows = np.asarray(rows, dtype=np.int64)
    features = encoded.features.copy()
    positions = encoded.sensitive_positions()

    if encoded.kind == INTEGER:
        position = positions[0]
        if encoded.columns[position].cardinality != 2:
            raise ValidationError("Only a binary sensitive attribute can be flipped", code='sensitive_not_binary')
        features[rows, position] = 1 - features[rows, position]
    else:
        if len(positions) != 2:
            raise ValidationError("Only a binary sensitive attribute can be flipped", code='sensitive_not_binary')
        first, second = positions
        features[rows, first], features[rows, second] = encoded.features[rows, second], encoded.features[rows, first]

    sensitive = encoded.sensitive.copy()
    sensitive[rows] = 1 - sensitive[rows]
    return replace(encoded, features=features, sensitive=sensitive)


def write_encoded(encoded: EncodedDataset, path: Union[str, Path]) -> Path:
    """Columnar text dump; integer-encoded headers list their code table"""
    headers = []
    for column in encoded.columns:
        if column.category is None:
            table = ';'.join(f"{code}:{category}" for code, category in enumerate(column.categories))
            headers.append(f"{column.source}{{{table}}}")
        else:
            headers.append(column.name)
    frame = pd.DataFrame(encoded.features, columns=headers)
    frame['label'] = encoded.labels
    frame['sensitive'] = encoded.sensitive
    path = Path(path)
    frame.to_csv(path, index=False, lineterminator='\n')
    logger.info(f"Wrote {encoded.kind} encoding of {encoded.name} to {path}")
    return path
