from itertools import combinations

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from apps.preprocess.encoding import INTEGER, EncodedDataset, FeatureColumn

from .forest import ForestConfig, fit_forest, sqrt_candidates
from .impurity import MIN_GAIN, best_split, gini
from .services import DT, DT_NS, RF, RF_NS, LearnerSpec, fit_learner, predict_learner
from .tree import DECISION_TREE, RANDOM_FOREST, TreeConfig, depth, dump_tree, fit_tree, predict, tree_votes


def weighted_gini(labels, groups):
    n = sum(len(group) for group in groups)
    total = 0.0
    for group in groups:
        if len(group):
            y = labels[group]
            total += len(group) / n * gini([int((y == 0).sum()), int((y == 1).sum())])
    return total


def exhaustive_gain(column, labels):
    """Best gain over every proper subset of the observed categories"""
    observed = sorted(set(int(c) for c in column))
    parent = gini([int((labels == 0).sum()), int((labels == 1).sum())])
    best = -np.inf
    for size in range(1, len(observed)):
        for left in combinations(observed, size):
            mask = np.isin(column, left)
            best = max(best, parent - weighted_gini(labels, [np.flatnonzero(mask), np.flatnonzero(~mask)]))
    return best


class GiniTests(SimpleTestCase):
    def test_known_values(self):
        self.assertEqual(gini([5, 5]), 0.5)
        self.assertEqual(gini([0, 7]), 0.0)
        self.assertAlmostEqual(gini([1, 3]), 0.375)

    def test_empty_node_is_rejected(self):
        with self.assertRaises(ValidationError) as caught:
            gini([0, 0])
        self.assertEqual(caught.exception.code, 'empty_node')


class BestSplitTests(SimpleTestCase):
    def test_matches_exhaustive_subset_search(self):
        rng = np.random.default_rng(17)
        for trial in range(500):
            k = int(rng.integers(2, 7))
            n = int(rng.integers(2, 60))
            column = rng.integers(0, k, size=n)
            labels = rng.integers(0, 2, size=n)
            features = column[:, None]
            split = best_split(features, labels, np.arange(n), [0], np.array([k]))
            expected = exhaustive_gain(column, labels)
            if expected <= MIN_GAIN:
                self.assertIsNone(split, trial)
                continue
            self.assertIsNotNone(split, trial)
            self.assertAlmostEqual(split.gain, expected, delta=1e-9, msg=trial)
            left = np.flatnonzero(np.isin(column, list(split.left_categories)))
            right = np.flatnonzero(np.isin(column, list(split.right_categories)))
            self.assertEqual((len(left), len(right)), (split.n_left, split.n_right))
            self.assertEqual(len(left) + len(right), n)

    def test_earliest_feature_wins_ties(self):
        column = np.array([0, 0, 1, 1])
        features = np.column_stack([column, column])
        split = best_split(features, np.array([0, 0, 1, 1]), np.arange(4), [1, 0], np.array([2, 2]))
        self.assertEqual(split.feature, 1)

    def test_min_instances_blocks_small_children(self):
        features = np.array([[0], [1], [1], [1]])
        labels = np.array([1, 0, 0, 0])
        self.assertIsNotNone(best_split(features, labels, np.arange(4), [0], np.array([2])))
        self.assertIsNone(best_split(features, labels, np.arange(4), [0], np.array([2]), min_instances=2))

    def test_pure_node_has_no_split(self):
        features = np.array([[0], [1]])
        self.assertIsNone(best_split(features, np.array([1, 1]), np.arange(2), [0], np.array([2])))


class TreeTests(SimpleTestCase):
    def setUp(self):
        # colour: 0=red (six favourable rows), 1=blue (two unfavourable rows)
        self.features = np.array([[0]] * 6 + [[1]] * 2)
        self.labels = np.array([1] * 6 + [0] * 2)

    def test_deep_tree_fits_distinct_rows_exactly(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(10, 120))
            features = np.column_stack([np.arange(n), rng.integers(0, 3, size=n), rng.integers(0, 4, size=n)])
            labels = rng.integers(0, 2, size=n)
            model = fit_tree(features, labels, TreeConfig(max_depth=30))
            np.testing.assert_array_equal(predict(model, features), labels)
            self.assertLessEqual(depth(model.roots[0]), 30)

    def test_depth_limit_is_respected(self):
        rng = np.random.default_rng(9)
        features = rng.integers(0, 5, size=(200, 6))
        labels = rng.integers(0, 2, size=200)
        model = fit_tree(features, labels, TreeConfig(max_depth=2))
        self.assertLessEqual(depth(model.roots[0]), 2)
        self.assertEqual(model.kind, DECISION_TREE)

    def test_leaf_ties_predict_the_unfavourable_label(self):
        model = fit_tree(np.array([[0], [0]]), np.array([0, 1]))
        self.assertEqual(predict(model, np.array([[0]]))[0], 0)

    def test_unseen_category_follows_the_heavier_child(self):
        model = fit_tree(self.features, self.labels)
        self.assertEqual(predict(model, np.array([[7]]))[0], 1)
        light_positive = fit_tree(np.array([[0]] * 2 + [[1]] * 6), np.array([1] * 2 + [0] * 6))
        self.assertEqual(predict(light_positive, np.array([[7]]))[0], 0)

    def test_wrong_row_width_is_malformed(self):
        model = fit_tree(self.features, self.labels)
        with self.assertRaises(ValidationError) as caught:
            predict(model, np.zeros((3, 2), dtype=int))
        self.assertEqual(caught.exception.code, 'malformed_row')

    def test_empty_training_data(self):
        with self.assertRaises(ValidationError) as caught:
            fit_tree(np.zeros((0, 2), dtype=int), np.zeros(0, dtype=int))
        self.assertEqual(caught.exception.code, 'empty_data')

    def test_invalid_config(self):
        with self.assertRaises(ValidationError) as caught:
            TreeConfig(max_depth=0)
        self.assertEqual(caught.exception.code, 'invalid_config')

    def test_dump_names_features_and_categories(self):
        model = fit_tree(self.features, self.labels, feature_names=('colour',))
        text = dump_tree(model, category_names=[('red', 'blue')])
        self.assertEqual(text, (
            'colour in {blue} (neg=2, pos=6)\n'
            '  leaf -> 0 (neg=2, pos=0)\n'
            'else\n'
            '  leaf -> 1 (neg=0, pos=6)\n'
        ))


class ForestTests(SimpleTestCase):
    def test_single_tree_forest_without_randomness_equals_a_tree(self):
        rng = np.random.default_rng(11)
        for trial in range(100):
            n, d = int(rng.integers(5, 80)), int(rng.integers(1, 6))
            features = rng.integers(0, 4, size=(n, d))
            labels = rng.integers(0, 2, size=n)
            tree_config = TreeConfig(max_depth=int(rng.integers(1, 8)), seed=trial)
            tree = fit_tree(features, labels, tree_config)
            forest = fit_forest(features, labels, ForestConfig(tree_config, n_trees=1, candidates_per_split=d,
                                                               bootstrap=False))
            self.assertEqual(forest.roots, tree.roots, trial)
            self.assertEqual(forest.kind, RANDOM_FOREST)

    def test_same_seed_same_forest(self):
        rng = np.random.default_rng(5)
        features = rng.integers(0, 3, size=(150, 9))
        labels = rng.integers(0, 2, size=150)
        config = ForestConfig(TreeConfig(seed=21), n_trees=7)
        first, second = fit_forest(features, labels, config), fit_forest(features, labels, config)
        self.assertEqual(first.roots, second.roots)
        self.assertEqual(first.n_trees, 7)

    def test_majority_vote(self):
        rng = np.random.default_rng(6)
        features = rng.integers(0, 3, size=(100, 4))
        labels = rng.integers(0, 2, size=100)
        model = fit_forest(features, labels, ForestConfig(TreeConfig(seed=2), n_trees=5))
        votes = tree_votes(model, features)
        np.testing.assert_array_equal(predict(model, features), (votes >= 3).astype(np.int8))

    def test_candidate_defaults(self):
        self.assertEqual(sqrt_candidates(1), 1)
        self.assertEqual(sqrt_candidates(10), 3)
        self.assertEqual(ForestConfig(candidates_per_split=50).candidates_for(4), 4)
        with self.assertRaises(ValidationError):
            ForestConfig(n_trees=0)


def encoded_rows(n=120, seed=0):
    rng = np.random.default_rng(seed)
    sensitive = rng.integers(0, 2, size=n).astype(np.int8)
    colour = rng.integers(0, 3, size=n)
    labels = ((colour == 0) | (sensitive == 1)).astype(np.int8)
    return EncodedDataset(
        name='toy',
        kind=INTEGER,
        features=np.column_stack([colour, 1 - sensitive]).astype(np.int16),
        labels=labels,
        sensitive=sensitive,
        columns=(FeatureColumn('colour', ('red', 'green', 'blue')), FeatureColumn('sex', ('Male', 'Female'))),
        sensitive_column='sex',
    )


class LearnerServiceTests(SimpleTestCase):
    def test_blind_learners_never_see_the_sensitive_column(self):
        encoded = encoded_rows()
        for name in (DT_NS, RF_NS):
            spec = LearnerSpec(name, n_trees=3)
            model = fit_learner(spec, encoded, seed=4)
            self.assertEqual(model.feature_names, ('colour',))
            self.assertEqual(len(predict_learner(spec, model, encoded)), len(encoded))

    def test_aware_tree_uses_the_sensitive_column(self):
        encoded = encoded_rows()
        spec = LearnerSpec(DT)
        model = fit_learner(spec, encoded, seed=4)
        np.testing.assert_array_equal(predict_learner(spec, model, encoded), encoded.labels)

    def test_forest_spec_builds_requested_trees(self):
        spec = LearnerSpec(RF, n_trees=4, bootstrap=False)
        self.assertTrue(spec.is_forest)
        self.assertEqual(fit_learner(spec, encoded_rows(), seed=1).n_trees, 4)

    def test_unknown_learner(self):
        with self.assertRaises(ValidationError) as caught:
            LearnerSpec('SVM')
        self.assertEqual(caught.exception.code, 'invalid_learner')
