from io import StringIO
from pathlib import Path
from tempfile import TemporaryDirectory
import json
import unittest

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from apps.datasets.loaders import dataset_paths
from apps.datasets.testing import write_data_dir
from apps.learners.services import DT, DT_NS, RF, LearnerSpec
from apps.metrics.markers import UNDEFINED
from apps.preprocess.encoding import INTEGER, EncodedDataset, FeatureColumn
from apps.sampling.strategies import UNDERSAMPLING_MULTIVARIATE, WITHOUT_RESAMPLING, cell_counts

from . import reports
from .aggregation import PASS, SKIPPED, WARN, AggregateResult, AggregateRow, aggregate, boxplot_stats, trend_checks
from .config import dump_run_spec, load_run_spec, parse_run_spec
from .folds import NORMAL, STRATIFIED, CVConfig, make_folds
from .grid import SMOKE, ExperimentConfig, expand_grid, format_seeds, parse_seeds
from .runner import STATUS_OK, RunResult, derive_seed, evaluate_fold, run_seed


def encoded_population(n=240, seed=0):
    rng = np.random.default_rng(seed)
    sensitive = rng.integers(0, 2, size=n).astype(np.int8)
    colour = rng.integers(0, 3, size=n)
    size = rng.integers(0, 4, size=n)
    labels = ((colour == 0) | ((size > 1) & (rng.random(n) < 0.7))).astype(np.int8)
    return EncodedDataset(
        name='toy',
        kind=INTEGER,
        features=np.column_stack([colour, size, 1 - sensitive]).astype(np.int16),
        labels=labels,
        sensitive=sensitive,
        columns=(FeatureColumn('colour', ('red', 'green', 'blue')), FeatureColumn('size', ('s', 'm', 'l', 'xl')),
                 FeatureColumn('sex', ('Male', 'Female'))),
        sensitive_column='sex',
    )


def toy_config(learner=DT_NS, sampling=UNDERSAMPLING_MULTIVARIATE, cv_mode=NORMAL):
    return ExperimentConfig(dataset='german', encoding=INTEGER, sampling=sampling, cv_mode=cv_mode,
                            learner=LearnerSpec(learner, n_trees=3), seeds=(1,))


def run_result(config_id, seed, fold, status=STATUS_OK, **values):
    dataset, encoding, sampling, cv_mode, learner = config_id.split('|')
    return RunResult(config_id, dataset, encoding, sampling, cv_mode, learner, seed, fold, status, values)


class FoldTests(SimpleTestCase):
    def test_folds_partition_the_rows(self):
        labels = np.random.default_rng(1).integers(0, 2, size=103)
        for stratified in (False, True):
            folds = make_folds(labels, CVConfig(k=5, stratified=stratified, seed=4))
            validation = np.concatenate([fold.validation for fold in folds])
            self.assertEqual(sorted(validation.tolist()), list(range(103)))
            sizes = [fold.validation.size for fold in folds]
            self.assertLessEqual(max(sizes) - min(sizes), 1)
            for fold in folds:
                self.assertEqual(np.intersect1d(fold.train, fold.validation).size, 0)
                self.assertEqual(fold.train.size + fold.validation.size, 103)

    def test_stratified_folds_spread_each_class_evenly(self):
        labels = np.array([1] * 37 + [0] * 68)
        for fold in make_folds(labels, CVConfig(k=5, stratified=True, seed=2)):
            positives = int(labels[fold.validation].sum())
            self.assertIn(positives, (7, 8))

    def test_same_seed_same_folds(self):
        labels = np.zeros(50)
        first = make_folds(labels, CVConfig(k=5, seed=9))
        second = make_folds(labels, CVConfig(k=5, seed=9))
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.validation, b.validation)

    def test_too_few_rows_and_too_few_folds(self):
        with self.assertRaises(ValidationError) as caught:
            make_folds(np.zeros(3), CVConfig(k=5))
        self.assertEqual(caught.exception.code, 'too_few_rows')
        with self.assertRaises(ValidationError) as caught:
            CVConfig(k=1)
        self.assertEqual(caught.exception.code, 'invalid_folds')

    def test_stratified_folds_need_one_class_with_k_members(self):
        with self.assertRaises(ValidationError) as caught:
            make_folds(np.array([1, 1, 0, 0, 0]), CVConfig(k=5, stratified=True))
        self.assertEqual(caught.exception.code, 'too_few_rows')

    def test_stratified_class_counts_differ_by_at_most_one(self):
        rng = np.random.default_rng(17)
        for seed in range(20):
            labels = (rng.random(int(rng.integers(20, 90))) < rng.uniform(0.1, 0.9)).astype(np.int8)
            if min(np.bincount(labels, minlength=2)) < 5:
                continue
            folds = make_folds(labels, CVConfig(k=5, stratified=True, seed=seed))
            for label in (0, 1):
                per_fold = [int((labels[fold.validation] == label).sum()) for fold in folds]
                self.assertLessEqual(max(per_fold) - min(per_fold), 1)
            for fold in folds:
                self.assertTrue(np.all(np.diff(fold.train) > 0))

    def test_different_seeds_shuffle_differently(self):
        labels = np.zeros(60)
        first = make_folds(labels, CVConfig(k=5, seed=1))[0].validation
        second = make_folds(labels, CVConfig(k=5, seed=2))[0].validation
        self.assertFalse(np.array_equal(first, second))


class SeedTests(SimpleTestCase):
    def test_parse_and_format(self):
        self.assertEqual(parse_seeds('1-3, 7, 5'), (1, 2, 3, 5, 7))
        self.assertEqual(format_seeds((1, 2, 3, 5, 7)), '1-3, 5, 7')
        self.assertEqual(parse_seeds(format_seeds(range(1, 31))), tuple(range(1, 31)))

    def test_invalid_seed_lists(self):
        for text, code in (('3-1', 'invalid_seeds'), ('one', 'invalid_seeds'), (' , ', 'no_seeds')):
            with self.assertRaises(ValidationError) as caught:
                parse_seeds(text)
            self.assertEqual(caught.exception.code, code, text)

    def test_derived_seeds_are_stable_and_distinct(self):
        self.assertEqual(derive_seed(3, 1, 0), derive_seed(3, 1, 0))
        seeds = {derive_seed(run, fold, stream) for run in range(1, 6) for fold in range(5) for stream in (0, 1)}
        self.assertEqual(len(seeds), 50)


class GridTests(SimpleTestCase):
    def test_smoke_preset_expands_to_sixty_four_configurations(self):
        spec = load_run_spec(None, overrides={'grid_preset': SMOKE})
        configs = spec.experiment_configs()
        self.assertEqual(len(configs), 64)
        self.assertEqual(spec.seeds, (1, 2))
        self.assertEqual([config.config_id for config in configs], sorted(config.config_id for config in configs))
        self.assertTrue(all(config.dataset == 'german' for config in configs))

    def test_config_id_layout(self):
        config = toy_config(learner=RF, sampling=WITHOUT_RESAMPLING, cv_mode=STRATIFIED)
        self.assertEqual(config.config_id, 'german|integer|without_resampling|stratified|RF')
        self.assertTrue(config.cv_config(4).stratified)

    def test_unknown_axis_value(self):
        with self.assertRaises(ValidationError) as caught:
            expand_grid(['german'], ['integer'], ['oversampling'], [NORMAL], [DT], (1,))
        self.assertEqual(caught.exception.code, 'invalid_strategy')


class RunSpecTests(SimpleTestCase):
    def test_defaults_come_from_settings(self):
        spec = parse_run_spec('')
        self.assertEqual(spec.seeds, parse_seeds(settings.FAIRPREP_DEFAULT_SEEDS))
        self.assertEqual(spec.jobs, settings.FAIRPREP_JOBS)
        self.assertEqual(spec.folds, 5)
        self.assertEqual(len(spec.experiment_configs()), 128)

    def test_dump_and_parse_give_back_the_same_spec(self):
        text = (
            '[run]\ngrid_preset = smoke\njobs = 2\n'
            '[learners]\nnames = DT, RFns\nmax_depth = 12\nbootstrap = false\n'
            '[experiment]\nseeds = 1-4, 9\nfolds = 3\n'
        )
        spec = parse_run_spec(text)
        self.assertEqual(spec.learners, ('DT', 'RFns'))
        self.assertEqual(spec.seeds, (1, 2, 3, 4, 9))
        self.assertEqual(parse_run_spec(dump_run_spec(spec)), spec)

    def test_every_problem_is_reported_with_its_line(self):
        text = '[learners]\nmax_depth = 0\nnames = DT, XGB\n[experiment]\nfolds = 1\n[extras]\ncolour = red\n'
        with self.assertRaises(ValidationError) as caught:
            parse_run_spec(text)
        messages = caught.exception.messages
        self.assertEqual(len(messages), 4)
        self.assertTrue(any(message.startswith('line 2: [learners] max_depth') for message in messages))
        self.assertTrue(any(message.startswith('line 3: [learners] names') for message in messages))
        self.assertTrue(any(message.startswith('line 5: [experiment] folds') for message in messages))
        self.assertIn('line 7: [extras] colour: unknown setting', messages)

    def test_unparseable_text(self):
        with self.assertRaises(ValidationError) as caught:
            parse_run_spec('max_depth = 3\n')
        self.assertTrue(caught.exception.messages[0].startswith('line 1: '))

    def test_duplicate_axis_entries(self):
        with self.assertRaises(ValidationError):
            parse_run_spec('[learners]\nnames = DT, DT\n')

    def test_preset_fills_gaps_and_overrides_win(self):
        text = '[run]\ngrid_preset = smoke\n[dataset]\nnames = adult\n'
        self.assertEqual(parse_run_spec(text).datasets, ('adult',))
        self.assertEqual(parse_run_spec(text, overrides={'grid_preset': SMOKE}).datasets, ('german',))
        overridden = parse_run_spec(text, overrides={'grid_preset': SMOKE, 'seeds': '5'})
        self.assertEqual(overridden.seeds, (5,))

    def test_unreadable_file(self):
        with self.assertRaises(ValidationError) as caught:
            load_run_spec('/nonexistent/run.ini')
        self.assertEqual(caught.exception.code, 'unreadable')


class RunnerTests(SimpleTestCase):
    def test_blind_learner_predictions_ignore_the_sensitive_attribute(self):
        encoded = encoded_population()
        fold = make_folds(encoded.labels, CVConfig(seed=1))[0]
        values = evaluate_fold(toy_config(), encoded, fold.train, fold.validation, 11, 12)
        self.assertTrue(values['flip_invariant'])
        self.assertEqual(len({values[f'cells_{name}'] for name in ('pos_priv', 'pos_unpriv', 'neg_priv',
                                                                       'neg_unpriv')}), 1)
        self.assertEqual(values['validation_rows'], fold.validation.size)

    def test_aware_learner_has_no_flip_probe(self):
        encoded = encoded_population()
        fold = make_folds(encoded.labels, CVConfig(seed=1))[0]
        values = evaluate_fold(toy_config(learner=DT), encoded, fold.train, fold.validation, 11, 12)
        self.assertIsNone(values['flip_invariant'])

    def test_run_seed_is_repeatable(self):
        encoded = encoded_population()
        first = run_seed(toy_config(learner=RF), encoded, seed=3)
        second = run_seed(toy_config(learner=RF), encoded, seed=3)
        self.assertEqual([result.values for result in first], [result.values for result in second])
        self.assertEqual([result.fold for result in first], list(range(5)))

    def test_sampling_before_cross_validation(self):
        encoded = encoded_population()
        results = run_seed(toy_config(), encoded, seed=2, sample_before_cv=True)
        self.assertTrue(all(result.ok for result in results))
        total = sum(result.values['validation_rows'] for result in results)
        self.assertLess(total, len(encoded))

    def test_multivariate_runs_always_report_substituted_ratios(self):
        encoded = encoded_population()
        results = run_seed(toy_config(learner=RF), encoded, seed=4)
        self.assertTrue(all(result.ok for result in results))
        for result in results:
            self.assertEqual(result.values['train_cvs'], 0.0)
            self.assertEqual(result.values['train_npi'], 0.0)
            self.assertTrue(result.values['cvs_substituted'])
            self.assertTrue(result.values['npi_substituted'])
            self.assertEqual(result.values['cvs_ratio'], result.values['cvs'])

    def test_single_class_predictions_still_flag_substitution(self):
        encoded = encoded_population()
        constant = EncodedDataset(
            name='toy', kind=INTEGER,
            features=np.column_stack([np.zeros(len(encoded)), 1 - encoded.sensitive]).astype(np.int16),
            labels=encoded.labels, sensitive=encoded.sensitive,
            columns=(FeatureColumn('constant', ('x',)), FeatureColumn('sex', ('Male', 'Female'))),
            sensitive_column='sex',
        )
        fold = make_folds(constant.labels, CVConfig(seed=1))[0]
        values = evaluate_fold(toy_config(), constant, fold.train, fold.validation, 11, 12)
        self.assertIs(values['npi'], UNDEFINED)
        self.assertIs(values['npi_ratio'], UNDEFINED)
        self.assertTrue(values['npi_substituted'])
        self.assertTrue(values['cvs_substituted'])

    def test_fold_log_records_cells_before_and_after_sampling(self):
        encoded = encoded_population()
        fold = make_folds(encoded.labels, CVConfig(seed=1))[0]
        before = cell_counts(fold.train, encoded.labels, encoded.sensitive)
        with self.assertLogs('apps.experiments.runner', level='DEBUG') as logs:
            values = evaluate_fold(toy_config(), encoded, fold.train, fold.validation, 11, 12)
        after = {name: values[f'cells_{name}'] for name in before}
        self.assertTrue(any(f"cells {before} -> {after}" in line for line in logs.output))

    def test_substitution_follows_a_zero_training_metric(self):
        encoded = encoded_population()
        fold = make_folds(encoded.labels, CVConfig(seed=1))[0]
        values = evaluate_fold(toy_config(sampling=WITHOUT_RESAMPLING), encoded, fold.train, fold.validation, 11, 12)
        self.assertEqual(values['cvs_substituted'], values['train_cvs'] == 0.0)
        self.assertEqual(values['npi_substituted'], values['train_npi'] == 0.0)

    def test_failures_become_result_rows(self):
        encoded = encoded_population()
        only_privileged = EncodedDataset(
            name='toy', kind=INTEGER, features=encoded.features, labels=encoded.labels,
            sensitive=np.ones(len(encoded), dtype=np.int8), columns=encoded.columns, sensitive_column='sex',
        )
        results = run_seed(toy_config(), only_privileged, seed=1)
        self.assertEqual(len(results), 5)
        self.assertTrue(all(result.status.startswith('error:') for result in results))


class AggregationTests(SimpleTestCase):
    def test_quartiles_match_sorted_interpolation(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            values = rng.normal(size=int(rng.integers(1, 40)))
            stats = boxplot_stats(values)
            ordered = sorted(values)
            for fraction, observed in ((0.25, stats.q1), (0.5, stats.median), (0.75, stats.q3)):
                position = (len(ordered) - 1) * fraction
                low = int(np.floor(position))
                high = min(low + 1, len(ordered) - 1)
                expected = ordered[low] + (ordered[high] - ordered[low]) * (position - low)
                self.assertAlmostEqual(observed, expected, delta=1e-12)
            self.assertEqual(stats.minimum, ordered[0])
            self.assertEqual(stats.maximum, ordered[-1])

    def test_constant_values_have_no_spread(self):
        stats = boxplot_stats([0.4] * 6)
        self.assertEqual((stats.q1, stats.median, stats.q3), (0.4, 0.4, 0.4))
        self.assertEqual((stats.whisker_low, stats.whisker_high), (0.4, 0.4))
        self.assertEqual(stats.outliers, ())
        self.assertIsNone(boxplot_stats([]))

    def test_outliers_and_extreme_exclusion(self):
        values = [1, 2, 3, 4, 5, 6, 7, 8, 100]
        stats = boxplot_stats(values)
        self.assertEqual(stats.outliers, (100.0,))
        self.assertEqual(stats.whisker_high, 8.0)
        trimmed = boxplot_stats(values, exclude_extreme=True)
        self.assertEqual(trimmed.extreme_excluded, 1)
        self.assertEqual(trimmed.maximum, 8.0)

    def test_undefined_and_failed_runs_are_counted_not_averaged(self):
        config_id = 'german|integer|without_resampling|normal|DT'
        results = [
            run_result(config_id, 1, 0, cvs=0.2, di=0.5),
            run_result(config_id, 1, 1, cvs=-0.4, di=UNDEFINED),
            run_result(config_id, 2, 0, cvs=0.5, di=0.7),
            run_result(config_id, 2, 1, status='error: empty_cell'),
        ]
        summary = aggregate(results)
        self.assertAlmostEqual(summary.value(config_id, 'cvs'), (0.2 - 0.4 + 0.5) / 3)
        self.assertAlmostEqual(summary.value(config_id, 'cvs_abs'), (0.2 + 0.4 + 0.5) / 3)
        self.assertAlmostEqual(summary.value(config_id, 'cvs', 'seed_mean'), ((0.2 - 0.4) / 2 + 0.5) / 2)
        di_row = next(row for row in summary.rows if row.metric == 'di')
        self.assertEqual((di_row.n, di_row.excluded, di_row.failed), (2, 1, 1))
        self.assertIs(summary.value(config_id, 'recall'), UNDEFINED)

    def test_trend_checks(self):
        group = 'german|integer|without_resampling|normal'

        def row(learner, mean):
            return AggregateRow(f'{group}|{learner}', 'cvs_abs', 5, 0, 0, mean, 0.0, mean)

        summary = AggregateResult(rows=[row(DT, 0.1), row(DT_NS, 0.2), row(RF, UNDEFINED)])
        checks = {check.check: check.verdict for check in trend_checks(summary)}
        self.assertEqual(checks, {'sensitive_removal_reduces_cvs': WARN, 'tree_fairer_than_forest': SKIPPED})
        summary = AggregateResult(rows=[row(DT, 0.1), row(DT_NS, 0.05), row(RF, 0.3)])
        self.assertTrue(all(check.verdict == PASS for check in trend_checks(summary)))


class ReportFormatTests(SimpleTestCase):
    def test_value_formatting(self):
        self.assertEqual(reports.format_value(-0.0), '0')
        self.assertEqual(reports.format_value(0.123456789), '0.123457')
        self.assertEqual(reports.format_value(UNDEFINED), 'undefined')
        self.assertEqual(reports.format_value(np.bool_(True)), 'true')
        self.assertEqual(reports.format_value(None), '')
        self.assertIs(reports.parse_value('undefined'), UNDEFINED)
        self.assertEqual(reports.parse_value('7', 'seed'), 7)

    def test_unknown_metric(self):
        with self.assertRaises(ValidationError) as caught:
            reports.check_metrics(['cvs', 'happiness'])
        self.assertEqual(caught.exception.code, 'unknown_metric')

    def test_missing_results_file(self):
        with self.assertRaises(ValidationError) as caught:
            reports.read_results('/nonexistent/results.csv')
        self.assertEqual(caught.exception.code, 'missing_files')


SMOKE_OPTIONS = dict(grid_preset=SMOKE, seeds='1', encodings='integer', cv_modes='normal', learners='DT,DTns')


class RunCommandTests(SimpleTestCase):
    def setUp(self):
        tmp = TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.root = Path(tmp.name)
        self.data_dir = write_data_dir(self.root / 'data', seed=31, adult_rows=200)

    def run_grid(self, name, **options):
        out = self.root / name
        call_command('run', data_dir=str(self.data_dir), out=str(out), stdout=StringIO(),
                     **{**SMOKE_OPTIONS, **options})
        return out

    def test_run_writes_results_aggregates_and_manifest(self):
        out = self.run_grid('serial')
        results = reports.read_results(out / reports.RESULTS_FILE)
        self.assertEqual(len(results), 8 * 5)
        self.assertTrue(all(result.ok for result in results))
        self.assertEqual(results, sorted(results, key=lambda result: result.sort_key))
        self.assertTrue(all(result.values['flip_invariant'] for result in results if result.learner == DT_NS))

        manifest = json.loads((out / reports.MANIFEST_FILE).read_text())
        self.assertEqual(manifest['configurations'], 8)
        self.assertEqual(manifest['runs'], 40)
        self.assertEqual(manifest['failed_runs'], 0)
        self.assertEqual(manifest['seeds'], [1])
        self.assertEqual(len(manifest['config_hash']), 64)
        self.assertTrue((out / reports.AGGREGATE_FILE).exists())
        self.assertTrue((out / reports.BOXPLOT_FILE).exists())

    def test_written_config_reparses_and_repeats_the_run(self):
        out = self.run_grid('first', samplings='without_resampling')
        written = out / reports.RUN_CONFIG_FILE
        manifest = json.loads((out / reports.MANIFEST_FILE).read_text())
        self.assertIn(reports.RUN_CONFIG_FILE, manifest['files'])

        spec = load_run_spec(str(written))
        self.assertEqual(dump_run_spec(spec), written.read_text())
        self.assertEqual(reports.config_hash(spec), manifest['config_hash'])
        self.assertEqual(spec.output_dir, str(out))

        again = self.root / 'again'
        call_command('run', config=str(written), out=str(again), stdout=StringIO())
        for name in (reports.RESULTS_FILE, reports.AGGREGATE_FILE, reports.BOXPLOT_FILE):
            self.assertEqual((out / name).read_bytes(), (again / name).read_bytes(), name)

    def test_results_do_not_depend_on_worker_count(self):
        serial = self.run_grid('serial', samplings='without_resampling,undersampling_protected')
        pooled = self.run_grid('pooled', samplings='without_resampling,undersampling_protected', jobs=2)
        for name in (reports.RESULTS_FILE, reports.AGGREGATE_FILE, reports.BOXPLOT_FILE):
            self.assertEqual((serial / name).read_bytes(), (pooled / name).read_bytes(), name)

    def test_invalid_configuration_is_a_command_error(self):
        config = self.root / 'run.ini'
        config.write_text('[learners]\nmax_depth = 0\n')
        with self.assertRaises(CommandError):
            call_command('run', config=str(config), stdout=StringIO())

    def test_plot_data_from_results(self):
        out = self.run_grid('serial', samplings='without_resampling')
        results = out / reports.RESULTS_FILE

        call_command('plot_data', results=str(results), kind=reports.SCATTER, stdout=StringIO())
        scatter = (out / 'scatter_plot.csv').read_text().splitlines()
        self.assertEqual(scatter[0], 'config_id,cvs,npi,di,accuracy,f1')
        self.assertEqual(len(scatter), 3)

        boxplot = self.root / 'box.csv'
        call_command('plot_data', results=str(results), kind=reports.BOXPLOT, out=str(boxplot),
                     metrics='cvs_ratio', stdout=StringIO())
        lines = boxplot.read_text().splitlines()
        self.assertEqual(lines[0], ','.join(reports.BOXPLOT_COLUMNS))
        self.assertEqual(len(lines), 3)

        with self.assertRaises(CommandError):
            call_command('plot_data', results=str(results), kind=reports.SCATTER, fairness_metrics='happiness',
                         stdout=StringIO())


class VerifyDatasetsCommandTests(SimpleTestCase):
    def setUp(self):
        tmp = TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.root = Path(tmp.name)
        self.data_dir = write_data_dir(self.root / 'data', seed=41, adult_rows=200)

    def test_german_versions_reproduce_the_pinned_statistics(self):
        stdout = StringIO()
        table = self.root / 'verification.csv'
        call_command('verify_datasets', data_dir=str(self.data_dir), datasets='german', out=str(table),
                     stdout=stdout)
        self.assertIn('✓ german / integer', stdout.getvalue())
        lines = table.read_text().splitlines()
        self.assertEqual(len(lines), 3)
        self.assertIn(',172,0,1,0', lines[1])

    def test_synthetic_adult_data_deviates(self):
        with self.assertRaises(CommandError):
            call_command('verify_datasets', data_dir=str(self.data_dir), datasets='adult', stdout=StringIO())

    def test_missing_files(self):
        with self.assertRaises(CommandError) as caught:
            call_command('verify_datasets', data_dir=str(self.root / 'empty'), stdout=StringIO())
        self.assertIn('Missing dataset files', str(caught.exception))

    def test_unknown_dataset(self):
        with self.assertRaises(CommandError):
            call_command('verify_datasets', data_dir=str(self.data_dir), datasets='iris', stdout=StringIO())

    @unittest.skipUnless(all(path.exists() for paths in dataset_paths(settings.FAIRPREP_DATA_DIR).values()
                             for path in paths), 'UCI files not found in FAIRPREP_DATA_DIR')
    def test_real_datasets(self):
        call_command('verify_datasets', stdout=StringIO())


@override_settings(FAIRPREP_JOBS=3)
class SettingsDefaultsTests(SimpleTestCase):
    def test_jobs_default_follows_settings(self):
        self.assertEqual(parse_run_spec('').jobs, 3)
