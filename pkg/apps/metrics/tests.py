import math
import pickle

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from .fairness import (
    cvs, disparate_impact, fairness_report, group_summary, joint_table, npi, npi_from_table, passes_80_rule,
)
from .markers import UNDEFINED, is_undefined, ratio
from .performance import ConfusionMatrix, confusion, performance
from .ratios import fairness_ratio, fairness_ratios


def vectors_from_table(table):
    """Outcome and sensitive vectors reproducing a [outcome, sensitive] count table"""
    outcomes, sensitive = [], []
    for outcome in (0, 1):
        for group in (0, 1):
            outcomes += [outcome] * int(table[outcome][group])
            sensitive += [group] * int(table[outcome][group])
    return np.array(outcomes, dtype=np.int8), np.array(sensitive, dtype=np.int8)


def brute_force_npi(table, log=math.log):
    total = sum(sum(row) for row in table)
    p = [[table[i][j] / total for j in (0, 1)] for i in (0, 1)]
    rows = [p[i][0] + p[i][1] for i in (0, 1)]
    cols = [p[0][j] + p[1][j] for j in (0, 1)]
    h_rows = -sum(q * log(q) for q in rows if q > 0)
    h_cols = -sum(q * log(q) for q in cols if q > 0)
    if h_rows == 0 or h_cols == 0:
        return None
    mi = sum(p[i][j] * log(p[i][j] / (rows[i] * cols[j])) for i in (0, 1) for j in (0, 1) if p[i][j] > 0)
    return mi / math.sqrt(h_rows * h_cols)


class MarkerTests(SimpleTestCase):
    def test_undefined_is_a_falsy_singleton_that_survives_pickling(self):
        self.assertFalse(UNDEFINED)
        self.assertIs(pickle.loads(pickle.dumps(UNDEFINED)), UNDEFINED)
        self.assertEqual(str(UNDEFINED), 'undefined')

    def test_ratio_with_zero_denominator(self):
        self.assertIs(ratio(3, 0), UNDEFINED)
        self.assertEqual(ratio(1, 4), 0.25)


class PerformanceTests(SimpleTestCase):
    def test_confusion_counts(self):
        cm = confusion([1, 1, 0, 0, 1], [1, 0, 1, 0, 1])
        self.assertEqual(cm, ConfusionMatrix(tp=2, fn=1, fp=1, tn=1))

    def test_known_metrics(self):
        metrics = performance(ConfusionMatrix(tp=6, fn=2, fp=3, tn=9))
        self.assertAlmostEqual(metrics['accuracy'], 0.75)
        self.assertAlmostEqual(metrics['precision'], 6 / 9)
        self.assertAlmostEqual(metrics['recall'], 0.75)
        self.assertAlmostEqual(metrics['specificity'], 0.75)
        self.assertAlmostEqual(metrics['fpr'], 0.25)

    def test_f1_is_the_harmonic_mean_of_precision_and_recall(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            tp, fn, fp, tn = (int(v) for v in rng.integers(0, 50, size=4))
            if tp + fn + fp + tn == 0:
                continue
            metrics = performance(ConfusionMatrix(tp, fn, fp, tn))
            if tp == 0:
                self.assertTrue(is_undefined(metrics['f1']) or metrics['f1'] == 0)
                continue
            p, r = metrics['precision'], metrics['recall']
            self.assertAlmostEqual(metrics['f1'], 2 * p * r / (p + r), delta=1e-12)

    def test_zero_denominators_are_undefined(self):
        metrics = performance(ConfusionMatrix(tp=0, fn=0, fp=0, tn=5))
        self.assertIs(metrics['precision'], UNDEFINED)
        self.assertIs(metrics['recall'], UNDEFINED)
        self.assertIs(metrics['f1'], UNDEFINED)
        self.assertEqual(metrics['specificity'], 1.0)

    def test_length_mismatch(self):
        with self.assertRaises(ValidationError) as caught:
            confusion([1, 0], [1])
        self.assertEqual(caught.exception.code, 'length_mismatch')


class FairnessTests(SimpleTestCase):
    def test_joint_table_layout(self):
        table = joint_table([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
        np.testing.assert_array_equal(table, [[1, 1], [1, 2]])

    def test_cvs_and_di_on_a_known_table(self):
        outcomes, sensitive = vectors_from_table([[20, 30], [10, 40]])
        self.assertAlmostEqual(cvs(outcomes, sensitive), 40 / 70 - 10 / 30)
        self.assertAlmostEqual(disparate_impact(outcomes, sensitive), (10 / 30) / (40 / 70))

    def test_swapping_groups_negates_cvs_and_inverts_di(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            table = rng.integers(1, 30, size=(2, 2))
            outcomes, sensitive = vectors_from_table(table)
            self.assertAlmostEqual(cvs(outcomes, 1 - sensitive), -cvs(outcomes, sensitive), delta=1e-12)
            self.assertAlmostEqual(disparate_impact(outcomes, 1 - sensitive) * disparate_impact(outcomes, sensitive),
                                   1.0, delta=1e-12)

    def test_di_undefined_when_privileged_group_never_favoured(self):
        outcomes, sensitive = vectors_from_table([[5, 4], [3, 0]])
        self.assertIs(disparate_impact(outcomes, sensitive), UNDEFINED)
        self.assertFalse(passes_80_rule(UNDEFINED))

    def test_80_rule_bounds_are_exclusive(self):
        self.assertFalse(passes_80_rule(0.8))
        self.assertTrue(passes_80_rule(0.81))
        self.assertFalse(passes_80_rule(1.25))

    def test_empty_group(self):
        with self.assertRaises(ValidationError) as caught:
            cvs([1, 0, 1], [1, 1, 1])
        self.assertEqual(caught.exception.code, 'empty_group')

    def test_non_binary_values(self):
        with self.assertRaises(ValidationError) as caught:
            joint_table([2, 0], [1, 0])
        self.assertEqual(caught.exception.code, 'not_binary')


class NpiTests(SimpleTestCase):
    def test_matches_brute_force_on_small_tables(self):
        rng = np.random.default_rng(13)
        tables = [rng.integers(0, 21, size=(2, 2)).tolist() for _ in range(3000)]
        tables += [[[a, 20 - a], [b, 0]] for a in range(21) for b in range(21)]
        for table in tables:
            if sum(map(sum, table)) == 0:
                continue
            expected = brute_force_npi(table)
            observed = npi_from_table(np.array(table))
            if expected is None:
                self.assertIs(observed, UNDEFINED, table)
            else:
                self.assertAlmostEqual(observed, min(expected, 1.0), delta=1e-12, msg=table)

    def test_log_base_does_not_matter(self):
        rng = np.random.default_rng(19)
        for _ in range(200):
            table = rng.integers(1, 40, size=(2, 2)).tolist()
            self.assertAlmostEqual(brute_force_npi(table, math.log2), npi_from_table(np.array(table)), delta=1e-12)

    def test_balanced_table_is_exactly_zero(self):
        self.assertEqual(npi_from_table(np.array([[43, 43], [43, 43]])), 0.0)

    def test_perfect_dependence_is_one_and_symmetric(self):
        self.assertAlmostEqual(npi_from_table(np.array([[7, 0], [0, 7]])), 1.0, delta=1e-12)
        table = np.array([[12, 3], [5, 20]])
        self.assertAlmostEqual(npi_from_table(table), npi_from_table(table.T), delta=1e-12)

    def test_single_group_or_outcome_is_undefined(self):
        self.assertIs(npi([1, 1, 1], [0, 1, 0]), UNDEFINED)
        self.assertIs(npi_from_table(np.zeros((2, 2))), UNDEFINED)

    def test_report_combines_every_measure(self):
        outcomes, sensitive = vectors_from_table([[20, 30], [10, 40]])
        report = fairness_report(outcomes, sensitive)
        self.assertAlmostEqual(report.cvs, cvs(outcomes, sensitive))
        self.assertAlmostEqual(report.npi, npi(outcomes, sensitive))
        self.assertEqual(set(report.as_dict()), {'cvs', 'di', 'npi', 'passes_80_rule', 'privileged_rate',
                                                 'unprivileged_rate'})


class GroupSummaryTests(SimpleTestCase):
    def test_shares(self):
        outcomes, sensitive = vectors_from_table([[20, 30], [10, 40]])
        summary = group_summary(outcomes, sensitive)
        self.assertEqual(summary.counts, {'pos_priv': 40, 'pos_unpriv': 10, 'neg_priv': 30, 'neg_unpriv': 20})
        self.assertAlmostEqual(summary.unprivileged_share, 0.3)
        self.assertAlmostEqual(summary.favourable_share, 0.5)
        self.assertAlmostEqual(summary.unprivileged_share_among_favourable, 0.2)

    def test_no_favourable_outcomes(self):
        summary = group_summary([0, 0], [0, 1])
        self.assertIs(summary.unprivileged_share_among_favourable, UNDEFINED)


class RatioTests(SimpleTestCase):
    def test_plain_ratio(self):
        entry = fairness_ratio(0.1, 0.2)
        self.assertAlmostEqual(entry.value, 0.5)
        self.assertFalse(entry.substituted)

    def test_zero_training_metric_substitutes_the_prediction_metric(self):
        entry = fairness_ratio(0.07, 0.0)
        self.assertEqual(entry.value, 0.07)
        self.assertTrue(entry.substituted)

    def test_undefined_propagates(self):
        self.assertIs(fairness_ratio(UNDEFINED, 0.3).value, UNDEFINED)
        report = fairness_ratios((0.2, UNDEFINED), (0.1, 0.05))
        self.assertIs(report.npi_ratio, UNDEFINED)
        self.assertFalse(report.npi_substituted)
        self.assertFalse(fairness_ratio(0.2, UNDEFINED).substituted)

    def test_zero_training_metric_is_flagged_even_when_the_prediction_metric_is_undefined(self):
        report = fairness_ratios((0.0, UNDEFINED), (0.0, 0.0))
        self.assertTrue(report.cvs_substituted)
        self.assertTrue(report.npi_substituted)
        self.assertIs(report.npi_ratio, UNDEFINED)
        self.assertEqual(report.cvs_ratio, 0.0)

    def test_absolute_cvs_ratio(self):
        report = fairness_ratios((-0.1, 0.02), (0.2, 0.0))
        self.assertAlmostEqual(report.cvs_ratio, -0.5)
        self.assertAlmostEqual(report.cvs_ratio_abs, 0.5)
        self.assertTrue(report.npi_substituted)
        self.assertEqual(report.npi_ratio, 0.02)
