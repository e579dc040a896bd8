"""
Loaders for the UCI Adult Income and German Credit Data files
"""
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import logging

import pandas as pd
from django.core.exceptions import ValidationError

from .schema import CATEGORICAL, MISSING, NUMERICAL, Column, Dataset, Schema

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

ADULT_MISSING_TOKEN = '?'

ADULT_VOCABULARIES: Dict[str, Tuple[str, ...]] = {
    'workclass': (
        'Private', 'Self-emp-not-inc', 'Self-emp-inc', 'Federal-gov', 'Local-gov', 'State-gov',
        'Without-pay', 'Never-worked',
    ),
    'education': (
        'Bachelors', 'Some-college', '11th', 'HS-grad', 'Prof-school', 'Assoc-acdm', 'Assoc-voc', '9th',
        '7th-8th', '12th', 'Masters', '1st-4th', '10th', 'Doctorate', '5th-6th', 'Preschool',
    ),
    'marital-status': (
        'Married-civ-spouse', 'Divorced', 'Never-married', 'Separated', 'Widowed', 'Married-spouse-absent',
        'Married-AF-spouse',
    ),
    'occupation': (
        'Tech-support', 'Craft-repair', 'Other-service', 'Sales', 'Exec-managerial', 'Prof-specialty',
        'Handlers-cleaners', 'Machine-op-inspct', 'Adm-clerical', 'Farming-fishing', 'Transport-moving',
        'Priv-house-serv', 'Protective-serv', 'Armed-Forces',
    ),
    'relationship': ('Wife', 'Own-child', 'Husband', 'Not-in-family', 'Other-relative', 'Unmarried'),
    'race': ('White', 'Asian-Pac-Islander', 'Amer-Indian-Eskimo', 'Other', 'Black'),
    'sex': ('Female', 'Male'),
    'native-country': (
        'United-States', 'Cambodia', 'England', 'Puerto-Rico', 'Canada', 'Germany',
        'Outlying-US(Guam-USVI-etc)', 'India', 'Japan', 'Greece', 'South', 'China', 'Cuba', 'Iran',
        'Honduras', 'Philippines', 'Italy', 'Poland', 'Jamaica', 'Vietnam', 'Mexico', 'Portugal', 'Ireland',
        'France', 'Dominican-Republic', 'Laos', 'Ecuador', 'Taiwan', 'Haiti', 'Columbia', 'Hungary',
        'Guatemala', 'Nicaragua', 'Scotland', 'Thailand', 'Yugoslavia', 'El-Salvador', 'Trinadad&Tobago',
        'Peru', 'Hong', 'Holand-Netherlands',
    ),
    'income': ('>50K', '<=50K'),
}

ADULT_COLUMNS: Tuple[Column, ...] = (
    Column('age', NUMERICAL),
    Column('workclass', CATEGORICAL, ADULT_VOCABULARIES['workclass']),
    Column('fnlwgt', NUMERICAL),
    Column('education', CATEGORICAL, ADULT_VOCABULARIES['education']),
    Column('education-num', NUMERICAL),
    Column('marital-status', CATEGORICAL, ADULT_VOCABULARIES['marital-status']),
    Column('occupation', CATEGORICAL, ADULT_VOCABULARIES['occupation']),
    Column('relationship', CATEGORICAL, ADULT_VOCABULARIES['relationship']),
    Column('race', CATEGORICAL, ADULT_VOCABULARIES['race']),
    Column('sex', CATEGORICAL, ADULT_VOCABULARIES['sex']),
    Column('capital-gain', NUMERICAL),
    Column('capital-loss', NUMERICAL),
    Column('hours-per-week', NUMERICAL),
    Column('native-country', CATEGORICAL, ADULT_VOCABULARIES['native-country']),
    Column('income', CATEGORICAL, ADULT_VOCABULARIES['income']),
)

ADULT_SCHEMA = Schema(
    columns=ADULT_COLUMNS,
    label_column='income',
    sensitive_column='sex',
    label_values=('>50K', '<=50K'),
    favourable_label='>50K',
    sensitive_values=('Male', 'Female'),
    unprivileged_value='Female',
    allows_missing=True,
)

GERMAN_VOCABULARIES: Dict[str, Tuple[str, ...]] = {
    'status': ('A11', 'A12', 'A13', 'A14'),
    'credit-history': ('A30', 'A31', 'A32', 'A33', 'A34'),
    'purpose': ('A40', 'A41', 'A42', 'A43', 'A44', 'A45', 'A46', 'A47', 'A48', 'A49', 'A410'),
    'savings': ('A61', 'A62', 'A63', 'A64', 'A65'),
    'employment-since': ('A71', 'A72', 'A73', 'A74', 'A75'),
    'personal-status-sex': ('A91', 'A92', 'A93', 'A94', 'A95'),
    'other-debtors': ('A101', 'A102', 'A103'),
    'property': ('A121', 'A122', 'A123', 'A124'),
    'other-installment-plans': ('A141', 'A142', 'A143'),
    'housing': ('A151', 'A152', 'A153'),
    'job': ('A171', 'A172', 'A173', 'A174'),
    'telephone': ('A191', 'A192'),
    'foreign-worker': ('A201', 'A202'),
    'credit': ('good', 'bad'),
}

GERMAN_COLUMNS: Tuple[Column, ...] = (
    Column('status', CATEGORICAL, GERMAN_VOCABULARIES['status']),
    Column('duration', NUMERICAL),
    Column('credit-history', CATEGORICAL, GERMAN_VOCABULARIES['credit-history']),
    Column('purpose', CATEGORICAL, GERMAN_VOCABULARIES['purpose']),
    Column('credit-amount', NUMERICAL),
    Column('savings', CATEGORICAL, GERMAN_VOCABULARIES['savings']),
    Column('employment-since', CATEGORICAL, GERMAN_VOCABULARIES['employment-since']),
    Column('installment-rate', NUMERICAL),
    Column('personal-status-sex', CATEGORICAL, GERMAN_VOCABULARIES['personal-status-sex']),
    Column('other-debtors', CATEGORICAL, GERMAN_VOCABULARIES['other-debtors']),
    Column('residence-since', NUMERICAL),
    Column('property', CATEGORICAL, GERMAN_VOCABULARIES['property']),
    Column('age', NUMERICAL),
    Column('other-installment-plans', CATEGORICAL, GERMAN_VOCABULARIES['other-installment-plans']),
    Column('housing', CATEGORICAL, GERMAN_VOCABULARIES['housing']),
    Column('existing-credits', NUMERICAL),
    Column('job', CATEGORICAL, GERMAN_VOCABULARIES['job']),
    Column('people-liable', NUMERICAL),
    Column('telephone', CATEGORICAL, GERMAN_VOCABULARIES['telephone']),
    Column('foreign-worker', CATEGORICAL, GERMAN_VOCABULARIES['foreign-worker']),
    Column('credit', CATEGORICAL, GERMAN_VOCABULARIES['credit']),
)

# The sensitive column only becomes binary once binarise_age has run.
GERMAN_SCHEMA = Schema(
    columns=GERMAN_COLUMNS,
    label_column='credit',
    sensitive_column='age',
    label_values=('good', 'bad'),
    favourable_label='good',
    sensitive_values=('aged', 'young'),
    unprivileged_value='young',
    allows_missing=False,
)

GERMAN_LABEL_CODES = {'1': 'good', '2': 'bad'}

# UCI codebook: A91 male divorced/separated, A92 female divorced/separated/married,
# A93 male single, A94 male married/widowed, A95 female single.
PERSONAL_STATUS_SEX = {
    'A91': 'male',
    'A92': 'female',
    'A93': 'male',
    'A94': 'male',
    'A95': 'female',
}


def _read_table(path: PathLike, width: int, sep: str, comment: Optional[str] = None) -> pd.DataFrame:
    """Read a headerless text table as strings, enforcing the expected row width"""
    try:
        frame = pd.read_csv(
            path,
            header=None,
            sep=sep,
            dtype=str,
            skipinitialspace=True,
            keep_default_na=False,
            skip_blank_lines=True,
            comment=comment,
            engine='python' if len(sep) > 1 else 'c',
        )
    except pd.errors.EmptyDataError:
        raise ValidationError(f"{path}: file contains no rows", code='empty')
    except pd.errors.ParserError as e:
        raise ValidationError(f"{path}: malformed row ({str(e)})", code='malformed_row')
    except OSError as e:
        raise ValidationError(f"{path}: cannot read file ({str(e)})", code='unreadable')

    if frame.empty:
        raise ValidationError(f"{path}: file contains no rows", code='empty')
    if frame.shape[1] != width:
        raise ValidationError(f"{path}: expected {width} fields per row, found {frame.shape[1]}", code='malformed_row')
    frame = frame.apply(lambda values: values.str.strip())
    # with keep_default_na=False pandas pads short rows with '' rather than NaN
    short_rows = (frame.isna() | frame.eq('')).any(axis=1)
    if short_rows.any():
        first = int(short_rows.to_numpy().nonzero()[0][0]) + 1
        raise ValidationError(f"{path}: row {first} has fewer than {width} fields", code='malformed_row')
    return frame


def _coerce(frame: pd.DataFrame, columns: Tuple[Column, ...], path: PathLike) -> pd.DataFrame:
    """Convert raw string cells into numbers / vocabulary categories"""
    frame.columns = [column.name for column in columns]
    for column in columns:
        values = frame[column.name]
        if column.kind == NUMERICAL:
            try:
                numeric = pd.to_numeric(values.mask(values.isna()), errors='raise')
            except (ValueError, TypeError) as e:
                raise ValidationError(f"{path}: non-numeric value in column {column.name} ({str(e)})",
                                      code='malformed_row')
            frame[column.name] = numeric.astype('Int64') if (numeric.dropna() % 1 == 0).all() else numeric
        else:
            unknown = sorted(set(values.dropna()) - set(column.vocabulary)) if column.vocabulary else []
            if unknown:
                raise ValidationError(
                    f"{path}: unknown category {unknown[0]!r} in column {column.name}",
                    code='unknown_category',
                )
            frame[column.name] = values.where(values.notna(), MISSING).astype(object)
    return frame


def read_adult_file(path: PathLike) -> pd.DataFrame:
    """Parse one UCI Adult file (adult.data or adult.test) into typed columns"""
    # adult.test starts with a '|1x3 Cross validator' line
    frame = _read_table(path, width=len(ADULT_COLUMNS), sep=',', comment='|')
    frame.iloc[:, -1] = frame.iloc[:, -1].str.rstrip('.')
    frame = frame.mask(frame == ADULT_MISSING_TOKEN, MISSING)
    frame = _coerce(frame, ADULT_COLUMNS, path)
    if frame['income'].isna().any():
        raise ValidationError(f"{path}: label cells cannot be missing", code='missing_label')
    return frame


def load_adult(train_path: PathLike, test_path: Optional[PathLike] = None) -> Dataset:
    """Load the Adult training portion; the test file is parsed for validation only"""
    frame = read_adult_file(train_path)
    if test_path is not None:
        test_rows = len(read_adult_file(test_path))
        logger.info(f"Adult test file {test_path} validated ({test_rows} rows, not used in experiments)")

    missing = int(frame.isna().any(axis=1).sum())
    logger.info(f"Loaded Adult training data from {train_path}: {len(frame)} rows, {missing} with missing values")
    return Dataset(name='adult', schema=ADULT_SCHEMA, frame=frame.reset_index(drop=True))


def load_german(path: PathLike) -> Dataset:
    """Load german.data (space-separated, coded categoricals, label 1=good / 2=bad)"""
    frame = _read_table(path, width=len(GERMAN_COLUMNS), sep=r'\s+')
    labels = frame.iloc[:, -1]
    unknown_labels = sorted(set(labels) - set(GERMAN_LABEL_CODES))
    if unknown_labels:
        raise ValidationError(f"{path}: unknown label code {unknown_labels[0]!r}", code='unknown_category')
    frame.iloc[:, -1] = labels.map(GERMAN_LABEL_CODES)
    frame = _coerce(frame, GERMAN_COLUMNS, path)

    logger.info(f"Loaded German Credit data from {path}: {len(frame)} rows")
    return Dataset(name='german', schema=GERMAN_SCHEMA, frame=frame.reset_index(drop=True))


def derive_sex(dataset: Dataset) -> Dataset:
    """Add a sex column derived from personal-status-sex; the source column is kept"""
    if not dataset.schema.has_column('personal-status-sex'):
        raise ValidationError(f"Dataset {dataset.name} has no personal-status-sex column", code='missing_column')
    if dataset.schema.has_column('sex'):
        raise ValidationError(f"Dataset {dataset.name} already has a sex column", code='already_derived')

    codes = dataset.frame['personal-status-sex']
    unknown = sorted(set(codes.dropna()) - set(PERSONAL_STATUS_SEX))
    if unknown:
        raise ValidationError(f"Unknown personal-status-sex code {unknown[0]!r}", code='unknown_category')

    frame = dataset.frame.copy()
    frame.insert(frame.columns.get_loc('personal-status-sex') + 1, 'sex', codes.map(PERSONAL_STATUS_SEX).astype(object))
    schema = dataset.schema.with_column(Column('sex', CATEGORICAL, ('male', 'female')), after='personal-status-sex')
    return dataset.with_frame(frame, schema)


def dataset_paths(data_dir: PathLike) -> Dict[str, List[Path]]:
    """Expected UCI file locations under a data directory"""
    root = Path(data_dir)
    return {
        'adult': [root / 'adult.data', root / 'adult.test'],
        'german': [root / 'german.data'],
    }
