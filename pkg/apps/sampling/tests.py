import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from .strategies import (
    STRATEGIES, UNDERSAMPLING_LABEL, UNDERSAMPLING_MULTIVARIATE, UNDERSAMPLING_PROTECTED, WITHOUT_RESAMPLING,
    cell_counts, undersample, verify_balance,
)


def random_population(rng, n):
    """Labels and groups with every (label, group) cell populated"""
    labels = rng.integers(0, 2, size=n).astype(np.int8)
    sensitive = rng.integers(0, 2, size=n).astype(np.int8)
    labels[:4] = [0, 0, 1, 1]
    sensitive[:4] = [0, 1, 0, 1]
    return labels, sensitive


class UndersampleContractTests(SimpleTestCase):
    def test_every_strategy_meets_its_balance_contract(self):
        rng = np.random.default_rng(4)
        for strategy in STRATEGIES:
            for trial in range(200):
                n = int(rng.integers(8, 300))
                labels, sensitive = random_population(rng, n)
                fold = np.sort(rng.choice(n, size=int(rng.integers(n // 2, n + 1)), replace=False))
                fold = np.union1d(fold, np.arange(4))
                subset = undersample(fold, labels, sensitive, strategy, seed=trial)

                self.assertTrue(np.isin(subset.indices, fold).all())
                self.assertEqual(len(np.unique(subset.indices)), len(subset))
                self.assertTrue(np.all(np.diff(subset.indices) > 0))
                self.assertTrue(verify_balance(subset, labels, sensitive)['contract_holds'], (strategy, trial))

    def test_without_resampling_returns_the_whole_fold(self):
        labels, sensitive = random_population(np.random.default_rng(1), 50)
        fold = np.array([9, 3, 4, 0, 1, 2])
        subset = undersample(fold, labels, sensitive, WITHOUT_RESAMPLING, seed=3)
        np.testing.assert_array_equal(subset.indices, np.sort(fold))

    def test_smallest_group_is_kept_whole(self):
        labels = np.array([1] * 10 + [0] * 3, dtype=np.int8)
        sensitive = np.array([1, 0] * 5 + [1, 0, 1], dtype=np.int8)
        fold = np.arange(13)
        subset = undersample(fold, labels, sensitive, UNDERSAMPLING_LABEL, seed=0)
        self.assertEqual(len(subset), 6)
        self.assertTrue(np.isin([10, 11, 12], subset.indices).all())

    def test_multivariate_sizes_every_cell_to_the_smallest(self):
        labels = np.array([1] * 6 + [0] * 6, dtype=np.int8)
        sensitive = np.array([1, 1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 0], dtype=np.int8)
        subset = undersample(np.arange(12), labels, sensitive, UNDERSAMPLING_MULTIVARIATE, seed=5)
        self.assertEqual(cell_counts(subset.indices, labels, sensitive),
                         {'pos_priv': 1, 'pos_unpriv': 1, 'neg_priv': 1, 'neg_unpriv': 1})
        self.assertIn(5, subset.indices)

    def test_same_seed_same_subset(self):
        labels, sensitive = random_population(np.random.default_rng(8), 120)
        fold = np.arange(120)
        first = undersample(fold, labels, sensitive, UNDERSAMPLING_PROTECTED, seed=42)
        second = undersample(fold, labels, sensitive, UNDERSAMPLING_PROTECTED, seed=42)
        np.testing.assert_array_equal(first.indices, second.indices)


class UndersampleErrorTests(SimpleTestCase):
    def setUp(self):
        self.labels = np.array([1, 1, 0, 0], dtype=np.int8)
        self.sensitive = np.array([1, 1, 1, 0], dtype=np.int8)

    def test_empty_cell_is_reported(self):
        with self.assertRaises(ValidationError) as caught:
            undersample(np.arange(4), self.labels, self.sensitive, UNDERSAMPLING_MULTIVARIATE, seed=0)
        self.assertEqual(caught.exception.code, 'empty_cell')

    def test_empty_fold(self):
        with self.assertRaises(ValidationError) as caught:
            undersample(np.array([], dtype=np.int64), self.labels, self.sensitive, UNDERSAMPLING_LABEL, seed=0)
        self.assertEqual(caught.exception.code, 'empty_fold')

    def test_unknown_strategy(self):
        with self.assertRaises(ValidationError) as caught:
            undersample(np.arange(4), self.labels, self.sensitive, 'oversampling', seed=0)
        self.assertEqual(caught.exception.code, 'invalid_strategy')


class VerifyBalanceTests(SimpleTestCase):
    def test_report_counts_classes_and_groups(self):
        labels = np.array([1, 1, 0, 0, 1], dtype=np.int8)
        sensitive = np.array([1, 0, 1, 0, 1], dtype=np.int8)
        subset = undersample(np.arange(4), labels, sensitive, UNDERSAMPLING_MULTIVARIATE, seed=0)
        report = verify_balance(subset, labels, sensitive)
        self.assertEqual(report['classes'], {'pos': 2, 'neg': 2})
        self.assertEqual(report['groups'], {'priv': 2, 'unpriv': 2})
        self.assertTrue(report['cells_equal'])
        self.assertEqual(report['rows'], 4)
