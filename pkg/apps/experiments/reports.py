"""
Canonical CSV/JSON output: result rows, aggregates, boxplot data, manifests, plot data
"""
from dataclasses import asdict
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Union
import hashlib
import json
import logging

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.exceptions import ValidationError

from apps.metrics.markers import UNDEFINED, is_undefined

from .aggregation import AGGREGATE_METRICS, AggregateResult, BoxplotRow
from .config import RunSpec, dump_run_spec
from .constants import CONSTANTS_VERSION
from .runner import IDENTITY_COLUMNS, RESULT_COLUMNS, RunResult

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

RESULTS_FILE = 'results.csv'
AGGREGATE_FILE = 'aggregate.csv'
BOXPLOT_FILE = 'boxplot.csv'
MANIFEST_FILE = 'manifest.json'
RUN_CONFIG_FILE = 'config.ini'

AGGREGATE_COLUMNS = ('config_id', 'metric', 'n', 'excluded', 'failed', 'mean', 'sd', 'seed_mean')
BOXPLOT_COLUMNS = ('config_id', 'metric', 'n', 'min', 'q1', 'median', 'q3', 'max',
                   'whisker_low', 'whisker_high', 'outliers', 'extreme_excluded')

SCATTER = 'scatter'
BOXPLOT = 'boxplot'
PLOT_KIND_CHOICES = (
    (SCATTER, 'Mean fairness vs. mean performance per configuration'),
    (BOXPLOT, 'Five-number summaries per configuration'),
)
DEFAULT_SCATTER_FAIRNESS = ('cvs', 'npi', 'di')
DEFAULT_SCATTER_PERFORMANCE = ('accuracy', 'f1')

_INTEGER_COLUMNS = {'seed', 'fold', 'train_rows', 'validation_rows', 'cells_pos_priv', 'cells_pos_unpriv',
                    'cells_neg_priv', 'cells_neg_unpriv', 'sampling_seed', 'learner_seed'}


def format_value(value) -> str:
    """Six significant digits for reals; explicit text for undefined and booleans"""
    if value is None:
        return ''
    if is_undefined(value):
        return 'undefined'
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return f"{0.0 if value == 0 else value:.6g}"
    return str(value)


def parse_value(text: str, column: str = ''):
    if text == '':
        return None
    if text == 'undefined':
        return UNDEFINED
    if text in ('true', 'false'):
        return text == 'true'
    if column in _INTEGER_COLUMNS:
        return int(text)
    return float(text)


def write_table(path: PathLike, columns: Sequence[str], rows: Iterable[Dict[str, object]]) -> Path:
    """Newline-terminated CSV with a fixed column order"""
    frame = pd.DataFrame([[format_value(row.get(name)) for name in columns] for row in rows], columns=list(columns))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator='\n')
    return path


def write_results(path: PathLike, results: Sequence[RunResult]) -> Path:
    ordered = sorted(results, key=lambda result: result.sort_key)
    return write_table(path, RESULT_COLUMNS, (result.as_row() for result in ordered))


def read_results(path: PathLike) -> List[RunResult]:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"Results file {path} does not exist", code='missing_files')
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = [name for name in RESULT_COLUMNS if name not in frame.columns]
    if missing:
        raise ValidationError(f"{path}: missing result columns {missing}", code='malformed_results')

    results = []
    for record in frame.to_dict(orient='records'):
        identity = {name: record[name] for name in IDENTITY_COLUMNS}
        identity['seed'] = int(identity['seed'])
        identity['fold'] = int(identity['fold'])
        values = {name: parse_value(record[name], name) for name in RESULT_COLUMNS if name not in IDENTITY_COLUMNS}
        results.append(RunResult(values=values, **identity))
    return results


def write_aggregate(path: PathLike, aggregate: AggregateResult) -> Path:
    return write_table(path, AGGREGATE_COLUMNS, (asdict(row) for row in aggregate.rows))


def boxplot_record(row: BoxplotRow) -> Dict[str, object]:
    record: Dict[str, object] = {'config_id': row.config_id, 'metric': row.metric}
    stats = row.stats
    if stats is None:
        record['n'] = 0
        return record
    record.update({
        'n': stats.n,
        'min': stats.minimum,
        'q1': stats.q1,
        'median': stats.median,
        'q3': stats.q3,
        'max': stats.maximum,
        'whisker_low': stats.whisker_low,
        'whisker_high': stats.whisker_high,
        'outliers': ';'.join(format_value(value) for value in stats.outliers),
        'extreme_excluded': stats.extreme_excluded,
    })
    return record


def write_boxplots(path: PathLike, rows: Iterable[BoxplotRow]) -> Path:
    return write_table(path, BOXPLOT_COLUMNS, (boxplot_record(row) for row in rows))


def config_hash(spec: RunSpec) -> str:
    return hashlib.sha256(dump_run_spec(spec).encode('utf-8')).hexdigest()


def build_manifest(spec: RunSpec, results: Sequence[RunResult], aggregate: AggregateResult,
                   config_count: int) -> Dict[str, object]:
    """Inputs and counts of a run; no timestamps or host details"""
    failed = sum(1 for result in results if not result.ok)
    flip_violations = sum(1 for result in results if result.values.get('flip_invariant') is False)
    config = spec.as_dict()
    config['seeds'] = list(spec.seeds)
    return {
        'version': settings.VERSION,
        'constants_version': CONSTANTS_VERSION,
        'config_hash': config_hash(spec),
        'config': {key: list(value) if isinstance(value, tuple) else value for key, value in config.items()},
        'seeds': list(spec.seeds),
        'configurations': config_count,
        'runs': len(results),
        'failed_runs': failed,
        'flip_violations': flip_violations,
        'trend_checks': [
            {
                'group': check.group,
                'check': check.check,
                'left': check.left,
                'right': check.right,
                'left_value': format_value(check.left_value),
                'right_value': format_value(check.right_value),
                'verdict': check.verdict,
            }
            for check in aggregate.trends
        ],
        'files': [RESULTS_FILE, AGGREGATE_FILE, BOXPLOT_FILE, RUN_CONFIG_FILE],
    }


def write_run_config(path: PathLike, spec: RunSpec) -> Path:
    """The run configuration as INI; `run --config` on it repeats the run"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_run_spec(spec), encoding='utf-8')
    return path


def write_manifest(path: PathLike, manifest: Dict[str, object]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    return path


def check_metrics(names: Sequence[str], known: Sequence[str] = AGGREGATE_METRICS):
    unknown = [name for name in names if name not in known]
    if unknown:
        raise ValidationError(f"Unknown metric(s) {', '.join(unknown)}; choose from {', '.join(known)}",
                              code='unknown_metric')


def scatter_records(aggregate: AggregateResult, fairness_metrics: Sequence[str] = DEFAULT_SCATTER_FAIRNESS,
                    performance_metrics: Sequence[str] = DEFAULT_SCATTER_PERFORMANCE) -> List[Dict[str, object]]:
    """One row per configuration with the mean of every requested metric"""
    check_metrics(list(fairness_metrics) + list(performance_metrics))
    config_ids = sorted({row.config_id for row in aggregate.rows})
    return [
        {'config_id': config_id,
         **{metric: aggregate.value(config_id, metric) for metric in (*fairness_metrics, *performance_metrics)}}
        for config_id in config_ids
    ]


def write_scatter(path: PathLike, aggregate: AggregateResult, fairness_metrics: Sequence[str] = DEFAULT_SCATTER_FAIRNESS,
                  performance_metrics: Sequence[str] = DEFAULT_SCATTER_PERFORMANCE) -> Path:
    records = scatter_records(aggregate, fairness_metrics, performance_metrics)
    return write_table(path, ('config_id', *fairness_metrics, *performance_metrics), records)

