"""
Builds the encoded dataset versions used by verification and by experiments
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple
import logging

from django.conf import settings
from django.core.exceptions import ValidationError

from apps.datasets.loaders import dataset_paths, derive_sex, load_adult, load_german
from apps.datasets.schema import Dataset
from apps.datasets.splitting import german_training_split

from .encoding import EncodedDataset, encode
from .transforms import BinRule, binarise_age, discretise_quartiles, pool_rare_bins, remove_personal_status

logger = logging.getLogger(__name__)

ADULT = 'adult'
GERMAN = 'german'
DATASET_CHOICES = (
    (ADULT, 'Adult Income'),
    (GERMAN, 'German Credit Data'),
)


@dataclass(frozen=True)
class PreparedDataset:
    """Training data of one dataset, discretised and ready for either encoding"""
    dataset: Dataset
    bin_rules: Tuple[BinRule, ...]


class DatasetVersionService:
    """Prepares training data once per dataset and encodes it on demand"""

    def __init__(self, data_dir: Optional[str] = None, split_seed: Optional[int] = None,
                 pool_threshold: Optional[int] = None):
        self.data_dir = Path(data_dir or settings.FAIRPREP_DATA_DIR)
        self.split_seed = settings.FAIRPREP_GERMAN_SPLIT_SEED if split_seed is None else split_seed
        self.pool_threshold = settings.FAIRPREP_POOL_THRESHOLD if pool_threshold is None else pool_threshold
        self._prepared: Dict[str, PreparedDataset] = {}
        self._versions: Dict[Tuple[str, str], EncodedDataset] = {}

    def missing_files(self, dataset_name: str) -> List[Path]:
        paths = dataset_paths(self.data_dir).get(dataset_name)
        if paths is None:
            raise ValidationError(f"Unknown dataset {dataset_name}", code='unknown_dataset')
        return [path for path in paths if not path.exists()]

    def load_training_data(self, dataset_name: str) -> Dataset:
        """Training portion before discretisation, with a binary sensitive attribute"""
        missing = self.missing_files(dataset_name)
        if missing:
            raise ValidationError(f"Missing dataset files: {', '.join(str(path) for path in missing)}",
                                  code='missing_files')
        paths = dataset_paths(self.data_dir)[dataset_name]

        if dataset_name == ADULT:
            return load_adult(*paths)

        german = load_german(paths[0])
        german = remove_personal_status(binarise_age(derive_sex(german)))
        return german_training_split(german, self.split_seed).train

    def prepare(self, dataset_name: str) -> PreparedDataset:
        if dataset_name in self._prepared:
            return self._prepared[dataset_name]

        train = self.load_training_data(dataset_name)
        if dataset_name == ADULT:
            train = pool_rare_bins(train, self.pool_threshold)
        discretised, _, rules = discretise_quartiles(train)
        prepared = PreparedDataset(dataset=discretised, bin_rules=tuple(rules))
        self._prepared[dataset_name] = prepared
        logger.info(f"Prepared {dataset_name}: {len(discretised)} rows, "
                    f"{len(discretised.schema.feature_names())} features, {len(rules)} discretised columns")
        return prepared

    def build_version(self, dataset_name: str, encoding: str) -> EncodedDataset:
        if (dataset_name, encoding) in self._versions:
            return self._versions[(dataset_name, encoding)]
        encoded = encode(self.prepare(dataset_name).dataset, encoding)
        logger.info(f"Built {encoding} version of {dataset_name}: {len(encoded)} rows x {encoded.n_features} columns")
        self._versions[(dataset_name, encoding)] = encoded
        return encoded
