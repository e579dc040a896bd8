"""
Per-configuration summaries of run results: means, boxplot statistics, trend checks
"""
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from apps.learners.services import DT, DT_NS, RF
from apps.metrics.markers import UNDEFINED, MetricValue, is_undefined

from .runner import RunResult

logger = logging.getLogger(__name__)

AGGREGATE_METRICS = (
    'accuracy', 'precision', 'recall', 'specificity', 'fpr', 'f1',
    'cvs', 'cvs_abs', 'di', 'npi', 'passes_80_rule',
    'train_cvs', 'train_npi',
    'cvs_ratio', 'cvs_ratio_abs', 'npi_ratio',
)
BOXPLOT_METRICS = ('cvs_ratio', 'cvs_ratio_abs', 'npi_ratio')

WHISKER_IQR = 1.5
EXTREME_IQR = 3.0

PASS = 'pass'
WARN = 'warn'
SKIPPED = 'skipped'


@dataclass(frozen=True)
class AggregateRow:
    config_id: str
    metric: str
    n: int
    excluded: int
    failed: int
    mean: MetricValue
    sd: MetricValue
    seed_mean: MetricValue


@dataclass(frozen=True)
class BoxplotStats:
    n: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    whisker_low: float
    whisker_high: float
    outliers: Tuple[float, ...] = ()
    extreme_excluded: int = 0


@dataclass(frozen=True)
class BoxplotRow:
    config_id: str
    metric: str
    stats: Optional[BoxplotStats]


@dataclass(frozen=True)
class TrendCheck:
    group: str
    check: str
    left: str
    right: str
    left_value: MetricValue
    right_value: MetricValue
    verdict: str


@dataclass
class AggregateResult:
    rows: List[AggregateRow] = field(default_factory=list)
    boxplots: List[BoxplotRow] = field(default_factory=list)
    trends: List[TrendCheck] = field(default_factory=list)

    def value(self, config_id: str, metric: str, statistic: str = 'mean') -> MetricValue:
        for row in self.rows:
            if row.config_id == config_id and row.metric == metric:
                return getattr(row, statistic)
        return UNDEFINED


def metric_value(result: RunResult, metric: str) -> MetricValue:
    """Numeric value of a metric for one run; UNDEFINED when absent or undefined"""
    if metric == 'cvs_abs':
        value = result.values.get('cvs')
        return UNDEFINED if value is None or is_undefined(value) else abs(value)
    value = result.values.get(metric)
    if value is None or is_undefined(value):
        return UNDEFINED
    return float(value)


def boxplot_stats(values: Sequence[float], exclude_extreme: bool = False) -> Optional[BoxplotStats]:
    """Quartiles by linear interpolation; whiskers reach the furthest values within 1.5 IQR"""
    data = np.sort(np.asarray(values, dtype=float))
    if data.size == 0:
        return None

    extreme_excluded = 0
    if exclude_extreme:
        q1, q3 = np.percentile(data, [25, 75])
        iqr = q3 - q1
        keep = (data >= q1 - EXTREME_IQR * iqr) & (data <= q3 + EXTREME_IQR * iqr)
        extreme_excluded = int(data.size - keep.sum())
        data = data[keep]

    q1, median, q3 = (float(v) for v in np.percentile(data, [25, 50, 75]))
    iqr = q3 - q1
    low_fence, high_fence = q1 - WHISKER_IQR * iqr, q3 + WHISKER_IQR * iqr
    inside = data[(data >= low_fence) & (data <= high_fence)]
    outliers = data[(data < low_fence) | (data > high_fence)]
    return BoxplotStats(
        n=int(data.size),
        minimum=float(data[0]),
        q1=q1,
        median=median,
        q3=q3,
        maximum=float(data[-1]),
        whisker_low=float(inside.min()),
        whisker_high=float(inside.max()),
        outliers=tuple(float(v) for v in outliers),
        extreme_excluded=extreme_excluded,
    )


def _summarise(config_id: str, metric: str, results: List[RunResult]) -> AggregateRow:
    failed = sum(1 for result in results if not result.ok)
    by_seed: Dict[int, List[float]] = defaultdict(list)
    excluded = 0
    for result in results:
        if not result.ok:
            continue
        value = metric_value(result, metric)
        if is_undefined(value):
            excluded += 1
            continue
        by_seed[result.seed].append(value)

    pooled = np.array([value for values in by_seed.values() for value in values], dtype=float)
    if pooled.size == 0:
        return AggregateRow(config_id, metric, 0, excluded, failed, UNDEFINED, UNDEFINED, UNDEFINED)
    seed_means = [float(np.mean(values)) for _, values in sorted(by_seed.items())]
    return AggregateRow(
        config_id=config_id,
        metric=metric,
        n=int(pooled.size),
        excluded=excluded,
        failed=failed,
        mean=float(pooled.mean()),
        sd=float(pooled.std(ddof=0)),
        seed_mean=float(np.mean(seed_means)),
    )


def aggregate(results: Sequence[RunResult], exclude_extreme: bool = False,
              metrics: Sequence[str] = AGGREGATE_METRICS,
              boxplot_metrics: Sequence[str] = BOXPLOT_METRICS) -> AggregateResult:
    """Failed runs and undefined values are left out of each metric and counted instead"""
    grouped: Dict[str, List[RunResult]] = defaultdict(list)
    for result in results:
        grouped[result.config_id].append(result)

    outcome = AggregateResult()
    for config_id in sorted(grouped):
        runs = grouped[config_id]
        outcome.rows.extend(_summarise(config_id, metric, runs) for metric in metrics)
        for metric in boxplot_metrics:
            values = [metric_value(run, metric) for run in runs if run.ok]
            defined = [value for value in values if not is_undefined(value)]
            outcome.boxplots.append(BoxplotRow(config_id, metric, boxplot_stats(defined, exclude_extreme)))

    outcome.trends = trend_checks(outcome)
    logger.info(f"Aggregated {len(results)} runs into {len(grouped)} configurations")
    return outcome


def _split_config_id(config_id: str) -> Tuple[str, str]:
    """(group of dataset|encoding|sampling|cv_mode, learner)"""
    group, _, learner = config_id.rpartition('|')
    return group, learner


def trend_checks(result: AggregateResult, metric: str = 'cvs_abs') -> List[TrendCheck]:
    """
    Directional checks per (dataset, encoding, sampling, cv) group: dropping the
    sensitive attribute should not raise mean |CVS|, and a single tree should not be
    less fair than a forest. A failed check warns; it never fails a run.
    """
    means: Dict[str, Dict[str, MetricValue]] = defaultdict(dict)
    for row in result.rows:
        if row.metric == metric:
            group, learner = _split_config_id(row.config_id)
            means[group][learner] = row.mean

    checks = []
    for group in sorted(means):
        for name, left, right in (('sensitive_removal_reduces_cvs', DT_NS, DT), ('tree_fairer_than_forest', DT, RF)):
            if left not in means[group] or right not in means[group]:
                continue
            left_value, right_value = means[group][left], means[group][right]
            if is_undefined(left_value) or is_undefined(right_value):
                verdict = SKIPPED
            else:
                verdict = PASS if left_value <= right_value else WARN
            if verdict == WARN:
                logger.warning(f"Trend {name} does not hold for {group}: {left}={left_value:.4g} > {right}={right_value:.4g}")
            checks.append(TrendCheck(group, name, left, right, left_value, right_value, verdict))
    return checks
