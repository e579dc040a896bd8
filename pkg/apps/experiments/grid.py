"""
Experiment configurations and the grid presets that expand into them
"""
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Tuple
import logging

from django.core.exceptions import ValidationError

from apps.learners.services import LEARNERS, LearnerSpec
from apps.preprocess.encoding import INTEGER, ONE_HOT
from apps.preprocess.services import ADULT, DATASET_CHOICES, GERMAN
from apps.sampling.strategies import STRATEGIES

from .folds import CV_MODES, STRATIFIED, CVConfig

logger = logging.getLogger(__name__)

ENCODINGS = (INTEGER, ONE_HOT)
DATASETS = tuple(choice for choice, _ in DATASET_CHOICES)

FULL_ADULT = 'paper-adult'
FULL_GERMAN = 'paper-german'
SMOKE = 'smoke'
GRID_PRESET_CHOICES = (
    (FULL_ADULT, 'Full Adult grid, 64 configurations x 30 seeds'),
    (FULL_GERMAN, 'Full German Credit grid, 64 configurations x 30 seeds'),
    (SMOKE, 'German Credit grid, 64 configurations x 2 seeds'),
)

FULL_SEEDS = tuple(range(1, 31))

# Preset values override the axes and seeds of a run; every other setting is kept.
GRID_PRESETS: Dict[str, Dict[str, tuple]] = {
    FULL_ADULT: {'datasets': (ADULT,), 'seeds': FULL_SEEDS},
    FULL_GERMAN: {'datasets': (GERMAN,), 'seeds': FULL_SEEDS},
    SMOKE: {'datasets': (GERMAN,), 'seeds': (1, 2)},
}
PRESET_AXES = {
    'encodings': ENCODINGS,
    'samplings': STRATEGIES,
    'cv_modes': CV_MODES,
    'learners': LEARNERS,
}


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    encoding: str
    sampling: str
    cv_mode: str
    learner: LearnerSpec
    seeds: Tuple[int, ...]
    k: int = 5

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ValidationError(f"Unknown dataset {self.dataset}", code='unknown_dataset')
        if self.encoding not in ENCODINGS:
            raise ValidationError(f"Unknown encoding {self.encoding}", code='invalid_encoding')
        if self.sampling not in STRATEGIES:
            raise ValidationError(f"Unknown sampling strategy {self.sampling}", code='invalid_strategy')
        if self.cv_mode not in CV_MODES:
            raise ValidationError(f"Unknown cross-validation mode {self.cv_mode}", code='invalid_cv_mode')
        if not self.seeds:
            raise ValidationError("At least one seed is required", code='no_seeds')

    @property
    def config_id(self) -> str:
        return '|'.join((self.dataset, self.encoding, self.sampling, self.cv_mode, self.learner.name))

    @property
    def drops_sensitive(self) -> bool:
        return self.learner.drops_sensitive

    def cv_config(self, seed: int) -> CVConfig:
        return CVConfig(k=self.k, stratified=self.cv_mode == STRATIFIED, seed=seed)


def expand_grid(
    datasets, encodings, samplings, cv_modes, learners, seeds, k: int = 5, learner_options: Dict = None
) -> List[ExperimentConfig]:
    """Cartesian product of the axes, sorted by config id"""
    learner_options = learner_options or {}
    configs = [
        ExperimentConfig(
            dataset=dataset,
            encoding=encoding,
            sampling=sampling,
            cv_mode=cv_mode,
            learner=LearnerSpec(name=learner, **learner_options),
            seeds=tuple(seeds),
            k=k,
        )
        for dataset, encoding, sampling, cv_mode, learner in product(datasets, encodings, samplings, cv_modes, learners)
    ]
    configs.sort(key=lambda config: config.config_id)
    logger.info(f"Expanded grid into {len(configs)} configurations x {len(seeds)} seeds")
    return configs


def parse_seeds(text: str) -> Tuple[int, ...]:
    """'1-30' or '1, 4, 7-9' -> sorted unique seeds"""
    seeds = set()
    for part in (piece.strip() for piece in str(text).split(',')):
        if not part:
            continue
        start, dash, end = part.partition('-')
        try:
            if dash:
                low, high = int(start), int(end)
                if low > high:
                    raise ValueError(part)
                seeds.update(range(low, high + 1))
            else:
                seeds.add(int(part))
        except ValueError:
            raise ValidationError(f"Invalid seed list entry '{part}'", code='invalid_seeds')
    if not seeds:
        raise ValidationError("At least one seed is required", code='no_seeds')
    if min(seeds) < 0:
        raise ValidationError("Seeds must be non-negative", code='invalid_seeds')
    return tuple(sorted(seeds))


def format_seeds(seeds) -> str:
    """Inverse of parse_seeds, collapsing consecutive runs into ranges"""
    ordered = sorted(set(seeds))
    parts, start = [], None
    for position, seed in enumerate(ordered):
        if start is None:
            start = seed
        following = ordered[position + 1] if position + 1 < len(ordered) else None
        if following != seed + 1:
            parts.append(str(seed) if start == seed else f"{start}-{seed}")
            start = None
    return ', '.join(parts)
