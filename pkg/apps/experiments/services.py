"""
Orchestration behind the management commands
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence
import logging

import numpy as np
from django.core.exceptions import ValidationError

from apps.metrics.fairness import fairness_report, group_summary
from apps.metrics.markers import is_undefined
from apps.preprocess.services import DatasetVersionService
from apps.sampling.strategies import UNDERSAMPLING_MULTIVARIATE, undersample

from . import reports
from .aggregation import BOXPLOT_METRICS, AggregateResult, aggregate
from .config import RunSpec
from .constants import (
    CVS_TOLERANCE, DI_TOLERANCE, GERMAN_MULTIVARIATE_ROWS, PINNED_VERSIONS, SHARE_TOLERANCE, PinnedVersion,
)
from .runner import RunResult, run_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Deviation:
    quantity: str
    expected: object
    observed: object


@dataclass
class VersionCheck:
    dataset: str
    encoding: str
    anchor: str
    observed: Dict[str, object] = field(default_factory=dict)
    deviations: List[Deviation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.deviations


@dataclass
class VerificationReport:
    checks: List[VersionCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def records(self) -> List[Dict[str, object]]:
        return [
            {'dataset': check.dataset, 'encoding': check.encoding, 'passed': check.passed, **check.observed}
            for check in self.checks
        ]


VERIFICATION_COLUMNS = (
    'dataset', 'encoding', 'passed', 'rows', 'pos_priv', 'pos_unpriv', 'neg_priv', 'neg_unpriv',
    'unprivileged_share', 'favourable_share', 'unprivileged_share_among_favourable',
    'cvs', 'npi', 'di', 'passes_80_rule', 'multivariate_rows', 'multivariate_cvs', 'multivariate_di',
    'multivariate_npi',
)


class DatasetVerificationService:
    """Recomputes the dataset-level statistics of every encoded training version"""

    def __init__(self, versions: DatasetVersionService):
        self.versions = versions

    def _close(self, check: VersionCheck, quantity: str, expected: float, observed, tolerance: float):
        if is_undefined(observed) or abs(observed - expected) > tolerance:
            check.deviations.append(Deviation(quantity, expected, observed))

    def _exact(self, check: VersionCheck, quantity: str, expected, observed):
        if observed != expected:
            check.deviations.append(Deviation(quantity, expected, observed))

    def check_version(self, pinned: PinnedVersion) -> VersionCheck:
        encoded = self.versions.build_version(pinned.dataset, pinned.encoding)
        summary = group_summary(encoded.labels, encoded.sensitive)
        fairness = fairness_report(encoded.labels, encoded.sensitive)

        check = VersionCheck(dataset=pinned.dataset, encoding=pinned.encoding, anchor=pinned.anchor)
        check.observed = {
            'rows': len(encoded),
            **summary.counts,
            'unprivileged_share': summary.unprivileged_share,
            'favourable_share': summary.favourable_share,
            'unprivileged_share_among_favourable': summary.unprivileged_share_among_favourable,
            'cvs': fairness.cvs,
            'npi': fairness.npi,
            'di': fairness.di,
            'passes_80_rule': fairness.passes_80_rule,
        }
        for name, count in pinned.counts.items():
            self._exact(check, name, count, summary.counts[name])
        self._close(check, 'cvs', pinned.cvs, fairness.cvs, CVS_TOLERANCE)
        self._close(check, 'npi', pinned.npi, fairness.npi, pinned.npi_tolerance)
        self._close(check, 'di', pinned.di, fairness.di, DI_TOLERANCE)
        self._exact(check, 'passes_80_rule', pinned.passes_80_rule, fairness.passes_80_rule)
        self._close(check, 'unprivileged_share', pinned.unprivileged_share, summary.unprivileged_share,
                    SHARE_TOLERANCE)
        self._close(check, 'favourable_share', pinned.favourable_share, summary.favourable_share, SHARE_TOLERANCE)
        self._close(check, 'unprivileged_share_among_favourable', pinned.unprivileged_share_among_favourable,
                    summary.unprivileged_share_among_favourable, SHARE_TOLERANCE)

        if pinned.dataset == 'german':
            self._check_multivariate(check, encoded)
        return check

    def _check_multivariate(self, check: VersionCheck, encoded):
        """Balancing all four cells must leave a perfectly fair training set"""
        sampled = undersample(np.arange(len(encoded)), encoded.labels, encoded.sensitive,
                              UNDERSAMPLING_MULTIVARIATE, self.versions.split_seed)
        balanced = encoded.take(sampled.indices)
        fairness = fairness_report(balanced.labels, balanced.sensitive)
        check.observed.update({
            'multivariate_rows': len(sampled),
            'multivariate_cvs': fairness.cvs,
            'multivariate_di': fairness.di,
            'multivariate_npi': fairness.npi,
        })
        self._exact(check, 'multivariate_rows', GERMAN_MULTIVARIATE_ROWS, len(sampled))
        self._exact(check, 'multivariate_cvs', 0.0, fairness.cvs)
        self._exact(check, 'multivariate_di', 1.0, fairness.di)
        self._exact(check, 'multivariate_npi', 0.0, fairness.npi)

    def verify(self, datasets: Optional[Sequence[str]] = None) -> VerificationReport:
        wanted = [pinned for pinned in PINNED_VERSIONS if datasets is None or pinned.dataset in datasets]
        missing = sorted({str(path) for pinned in wanted for path in self.versions.missing_files(pinned.dataset)})
        if missing:
            raise ValidationError(f"Missing dataset files: {', '.join(missing)}", code='missing_files')

        report = VerificationReport()
        for pinned in wanted:
            check = self.check_version(pinned)
            report.checks.append(check)
            if check.passed:
                logger.info(f"{pinned.dataset}/{pinned.encoding}: all pinned statistics reproduced")
            for deviation in check.deviations:
                logger.warning(f"{pinned.dataset}/{pinned.encoding}: {deviation.quantity} expected "
                               f"{deviation.expected}, observed {deviation.observed}")
        return report


@dataclass
class RunOutcome:
    results: List[RunResult]
    aggregate: AggregateResult
    manifest: Dict[str, object]
    paths: Dict[str, Path]

    @property
    def failed(self) -> int:
        return sum(1 for result in self.results if not result.ok)


class ExperimentService:
    def __init__(self, spec: RunSpec, versions: Optional[DatasetVersionService] = None):
        self.spec = spec
        self.versions = versions or DatasetVersionService(
            data_dir=spec.data_dir, split_seed=spec.split_seed, pool_threshold=spec.pool_threshold,
        )

    def run(self) -> RunOutcome:
        spec = self.spec
        configs = spec.experiment_configs()
        results = run_grid(configs, self.versions, jobs=spec.jobs, sample_before_cv=spec.sample_before_cv)
        summary = aggregate(results, exclude_extreme=spec.exclude_extreme_outliers)

        out = Path(spec.output_dir)
        paths = {
            'results': reports.write_results(out / reports.RESULTS_FILE, results),
            'aggregate': reports.write_aggregate(out / reports.AGGREGATE_FILE, summary),
            'boxplot': reports.write_boxplots(out / reports.BOXPLOT_FILE, summary.boxplots),
            'config': reports.write_run_config(out / reports.RUN_CONFIG_FILE, spec),
        }
        manifest = reports.build_manifest(spec, results, summary, len(configs))
        paths['manifest'] = reports.write_manifest(out / reports.MANIFEST_FILE, manifest)
        logger.info(f"Wrote {len(results)} result rows for {len(configs)} configurations to {out}")
        return RunOutcome(results=results, aggregate=summary, manifest=manifest, paths=paths)


def plot_data(results_path, kind: str, out_path, fairness_metrics: Sequence[str] = reports.DEFAULT_SCATTER_FAIRNESS,
              performance_metrics: Sequence[str] = reports.DEFAULT_SCATTER_PERFORMANCE,
              boxplot_metrics: Sequence[str] = BOXPLOT_METRICS, exclude_extreme: bool = False) -> Path:
    """Plot-ready delimited text from a results file"""
    if kind not in dict(reports.PLOT_KIND_CHOICES):
        raise ValidationError(f"Unknown plot kind {kind}", code='unknown_plot_kind')
    reports.check_metrics(list(fairness_metrics) + list(performance_metrics) if kind == reports.SCATTER
                          else list(boxplot_metrics))

    results = reports.read_results(results_path)
    if kind == reports.SCATTER:
        summary = aggregate(results, boxplot_metrics=())
        return reports.write_scatter(out_path, summary, fairness_metrics, performance_metrics)
    summary = aggregate(results, exclude_extreme=exclude_extreme, boxplot_metrics=boxplot_metrics)
    return reports.write_boxplots(out_path, summary.boxplots)
