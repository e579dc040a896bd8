"""
Executes experiment configurations: one run per (configuration, seed, fold)
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple
import logging

import numpy as np
from django.core.exceptions import ValidationError

from apps.learners.services import fit_learner, predict_learner
from apps.metrics.fairness import fairness_report
from apps.metrics.performance import confusion, performance
from apps.metrics.ratios import fairness_ratios
from apps.preprocess.encoding import EncodedDataset, flip_sensitive
from apps.preprocess.services import DatasetVersionService
from apps.sampling.strategies import cell_counts, undersample

from .folds import make_folds
from .grid import ExperimentConfig

logger = logging.getLogger(__name__)

STATUS_OK = 'ok'

SAMPLING_STREAM = 0
LEARNER_STREAM = 1

RESULT_COLUMNS = (
    'config_id', 'dataset', 'encoding', 'sampling', 'cv_mode', 'learner', 'seed', 'fold', 'status',
    'train_rows', 'validation_rows',
    'cells_pos_priv', 'cells_pos_unpriv', 'cells_neg_priv', 'cells_neg_unpriv',
    'accuracy', 'precision', 'recall', 'specificity', 'fpr', 'f1',
    'cvs', 'di', 'npi', 'passes_80_rule',
    'train_cvs', 'train_di', 'train_npi',
    'cvs_ratio', 'cvs_ratio_abs', 'cvs_substituted', 'npi_ratio', 'npi_substituted',
    'flip_invariant', 'sampling_seed', 'learner_seed',
)
IDENTITY_COLUMNS = RESULT_COLUMNS[:9]
VALUE_COLUMNS = RESULT_COLUMNS[9:]


@dataclass(frozen=True)
class RunResult:
    config_id: str
    dataset: str
    encoding: str
    sampling: str
    cv_mode: str
    learner: str
    seed: int
    fold: int
    status: str
    values: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    @property
    def sort_key(self) -> Tuple[str, int, int]:
        return self.config_id, self.seed, self.fold

    def as_row(self) -> Dict[str, object]:
        row = {name: getattr(self, name) for name in IDENTITY_COLUMNS}
        row.update({name: self.values.get(name) for name in VALUE_COLUMNS})
        return row


def derive_seed(run_seed: int, fold: int, stream: int) -> int:
    """Independent 32-bit seed for one (run seed, fold, purpose) triple"""
    return int(np.random.SeedSequence([run_seed, fold, stream]).generate_state(1, dtype=np.uint32)[0])


def _result(config: ExperimentConfig, seed: int, fold: int, status: str, values: Dict[str, object] = None) -> RunResult:
    return RunResult(
        config_id=config.config_id,
        dataset=config.dataset,
        encoding=config.encoding,
        sampling=config.sampling,
        cv_mode=config.cv_mode,
        learner=config.learner.name,
        seed=seed,
        fold=fold,
        status=status,
        values=values or {},
    )


def _failure_status(error: Exception) -> str:
    message = '; '.join(error.messages) if isinstance(error, ValidationError) else str(error)
    return f"error: {message or type(error).__name__}"


def evaluate_fold(
    config: ExperimentConfig,
    encoded: EncodedDataset,
    train_rows: np.ndarray,
    validation_rows: np.ndarray,
    sampling_seed: int,
    learner_seed: int,
    resample: bool = True,
) -> Dict[str, object]:
    """Sample the training side, fit, predict the untouched validation side, and score"""
    if resample:
        sampled = undersample(train_rows, encoded.labels, encoded.sensitive, config.sampling, sampling_seed).indices
    else:
        sampled = np.sort(np.asarray(train_rows, dtype=np.int64))
    before = cell_counts(np.asarray(train_rows, dtype=np.int64), encoded.labels, encoded.sensitive)
    cells = cell_counts(sampled, encoded.labels, encoded.sensitive)
    logger.debug(f"{config.config_id} {config.sampling} (seed={sampling_seed}): "
                 f"{len(train_rows)} -> {len(sampled)} training rows, cells {before} -> {cells}")

    training = encoded.take(sampled)
    validation = encoded.take(validation_rows)
    baseline = fairness_report(training.labels, training.sensitive)

    model = fit_learner(config.learner, training, seed=learner_seed)
    predictions = predict_learner(config.learner, model, validation)

    scores = performance(confusion(validation.labels, predictions))
    fairness = fairness_report(predictions, validation.sensitive)
    ratios = fairness_ratios((fairness.cvs, fairness.npi), (baseline.cvs, baseline.npi))

    flip_invariant: Optional[bool] = None
    if config.drops_sensitive:
        flipped = flip_sensitive(validation, np.arange(len(validation)))
        flip_invariant = bool(np.array_equal(predictions, predict_learner(config.learner, model, flipped)))
        if not flip_invariant:
            logger.error(f"{config.config_id}: predictions changed after flipping the sensitive attribute")

    values: Dict[str, object] = {
        'train_rows': int(len(sampled)),
        'validation_rows': int(len(validation_rows)),
        **{f"cells_{name}": count for name, count in cells.items()},
        **scores,
        'cvs': fairness.cvs,
        'di': fairness.di,
        'npi': fairness.npi,
        'passes_80_rule': fairness.passes_80_rule,
        'train_cvs': baseline.cvs,
        'train_di': baseline.di,
        'train_npi': baseline.npi,
        **ratios.as_dict(),
        'flip_invariant': flip_invariant,
        'sampling_seed': sampling_seed,
        'learner_seed': learner_seed,
    }
    return values


def run_seed(config: ExperimentConfig, encoded: EncodedDataset, seed: int, sample_before_cv: bool = False) -> List[RunResult]:
    """All k folds of one seed. Failures become result rows; nothing is raised."""
    results = []
    positions = np.arange(len(encoded))
    try:
        if sample_before_cv:
            # fold slot k is reserved for the whole-dataset draw
            positions = undersample(positions, encoded.labels, encoded.sensitive, config.sampling,
                                    derive_seed(seed, config.k, SAMPLING_STREAM)).indices
        folds = make_folds(encoded.labels[positions], config.cv_config(seed))
    except Exception as e:
        logger.error(f"{config.config_id} seed {seed}: cannot build folds: {e}")
        return [_result(config, seed, fold, _failure_status(e)) for fold in range(config.k)]

    for fold in folds:
        sampling_seed = derive_seed(seed, fold.index, SAMPLING_STREAM)
        learner_seed = derive_seed(seed, fold.index, LEARNER_STREAM)
        try:
            values = evaluate_fold(config, encoded, positions[fold.train], positions[fold.validation],
                                   sampling_seed, learner_seed, resample=not sample_before_cv)
            results.append(_result(config, seed, fold.index, STATUS_OK, values))
        except Exception as e:
            logger.error(f"{config.config_id} seed {seed} fold {fold.index} failed: {e}")
            results.append(_result(config, seed, fold.index, _failure_status(e)))
    return results


def run_config(config: ExperimentConfig, service: DatasetVersionService, sample_before_cv: bool = False,
               seeds: Optional[Iterable[int]] = None) -> List[RunResult]:
    """One RunResult per (seed, fold) of the configuration, in canonical order"""
    seeds = tuple(config.seeds if seeds is None else seeds)
    try:
        encoded = service.build_version(config.dataset, config.encoding)
    except Exception as e:
        logger.error(f"{config.config_id}: cannot build dataset version: {e}")
        return [_result(config, seed, fold, _failure_status(e)) for seed in seeds for fold in range(config.k)]

    results = []
    for seed in seeds:
        results.extend(run_seed(config, encoded, seed, sample_before_cv))
    return sorted(results, key=lambda result: result.sort_key)


# Per-process dataset cache for pooled execution.
_worker_service: Optional[DatasetVersionService] = None


def _init_worker(data_dir: str, split_seed: int, pool_threshold: int):
    global _worker_service
    _worker_service = DatasetVersionService(data_dir=data_dir, split_seed=split_seed, pool_threshold=pool_threshold)


def _run_task(task: Tuple[ExperimentConfig, int, bool]) -> List[RunResult]:
    config, seed, sample_before_cv = task
    return run_config(config, _worker_service, sample_before_cv, seeds=(seed,))


def run_grid(configs: List[ExperimentConfig], service: DatasetVersionService, jobs: int = 1,
             sample_before_cv: bool = False) -> List[RunResult]:
    """Every (configuration, seed) task; output order is canonical whatever the parallelism"""
    tasks = [(config, seed, sample_before_cv) for config in configs for seed in config.seeds]
    logger.info(f"Running {len(tasks)} (configuration, seed) tasks with {jobs} job(s)")

    results: List[RunResult] = []
    if jobs <= 1:
        for config in configs:
            results.extend(run_config(config, service, sample_before_cv))
    else:
        initargs = (str(service.data_dir), service.split_seed, service.pool_threshold)
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=initargs) as executor:
            for batch in executor.map(_run_task, tasks, chunksize=max(1, len(tasks) // (jobs * 4))):
                results.extend(batch)

    results.sort(key=lambda result: result.sort_key)
    failures = sum(1 for result in results if not result.ok)
    if failures:
        logger.warning(f"{failures} of {len(results)} runs failed")
    return results
