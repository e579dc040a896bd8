"""
Canonical comma-separated form of a Dataset (header row, empty field for missing cells)
"""
from io import StringIO
from pathlib import Path
from typing import Union

import pandas as pd

from .schema import MISSING, NUMERICAL, Dataset, Schema


def to_canonical_csv(dataset: Dataset) -> str:
    buffer = StringIO()
    dataset.frame.to_csv(buffer, index=False, na_rep='', lineterminator='\n')
    return buffer.getvalue()


def read_canonical_csv(source: Union[str, Path, StringIO], schema: Schema, name: str) -> Dataset:
    frame = pd.read_csv(source, dtype=str, keep_default_na=False)
    frame = frame.mask(frame == '', MISSING)
    for column in schema.columns:
        if column.kind == NUMERICAL:
            numeric = pd.to_numeric(frame[column.name].mask(frame[column.name].isna()))
            frame[column.name] = numeric.astype('Int64') if (numeric.dropna() % 1 == 0).all() else numeric
        else:
            frame[column.name] = frame[column.name].astype(object)
    return Dataset(name=name, schema=schema, frame=frame)
