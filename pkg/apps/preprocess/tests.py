from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from apps.datasets.loaders import derive_sex, load_adult, load_german
from apps.datasets.schema import CATEGORICAL, NUMERICAL, Column, Dataset, Schema
from apps.datasets.testing import adult_lines, german_lines, write_data_dir

from .encoding import INTEGER, ONE_HOT, encode, flip_sensitive, remove_sensitive, write_encoded
from .services import ADULT, GERMAN, DatasetVersionService
from .transforms import (
    POOL_VALUE, BinRule, binarise_age, discretise, discretise_quartiles, pool_rare_bins, quartile_bins,
    remove_personal_status,
)


def numeric_dataset(values, labels=None, groups=None):
    n = len(values)
    schema = Schema(
        columns=(Column('amount', NUMERICAL), Column('group', CATEGORICAL, ('p', 'u')),
                 Column('label', CATEGORICAL, ('yes', 'no'))),
        label_column='label',
        sensitive_column='group',
        label_values=('yes', 'no'),
        favourable_label='yes',
        sensitive_values=('p', 'u'),
        unprivileged_value='u',
        allows_missing=True,
    )
    frame = pd.DataFrame({
        'amount': pd.array(values, dtype='Int64'),
        'group': list(groups or ['p', 'u'] * (n // 2) + ['p'] * (n % 2)),
        'label': list(labels or ['yes', 'no'] * (n // 2) + ['yes'] * (n % 2)),
    })
    return Dataset(name='numbers', schema=schema, frame=frame)


class BinRuleTests(SimpleTestCase):
    def test_bins_are_right_closed(self):
        rule = BinRule.from_boundaries('amount', [2, 5])
        np.testing.assert_array_equal(rule.assign(np.array([1, 2, 3, 5, 6])), [0, 0, 1, 1, 2])
        self.assertEqual(rule.bin_labels, ('(-inf, 2]', '(2, 5]', '(5, inf)'))

    def test_boundaries_must_increase(self):
        with self.assertRaises(ValidationError) as caught:
            BinRule.from_boundaries('amount', [3, 3])
        self.assertEqual(caught.exception.code, 'invalid_bins')

    def test_quartiles_use_linear_interpolation(self):
        rule = quartile_bins(numeric_dataset([1, 2, 3, 4, 5, 6, 7, 8]), 'amount')
        self.assertEqual(rule.boundaries, (2.75, 4.5, 6.25))

    def test_tied_quartiles_collapse_and_constant_columns_get_one_bin(self):
        self.assertEqual(quartile_bins(numeric_dataset([0, 0, 0, 0, 0, 0, 5, 9]), 'amount').boundaries, (0.0, 1.25))
        self.assertEqual(quartile_bins(numeric_dataset([4, 4, 4, 4]), 'amount').bin_labels, ('(-inf, inf)',))

    def test_rules_learned_on_train_are_applied_to_other_data(self):
        train = numeric_dataset([1, 2, 3, 4, 5, 6, 7, 8])
        other = numeric_dataset([0, 100])
        _, (other_binned,), rules = discretise_quartiles(train, [other])
        self.assertEqual(list(other_binned.frame['amount']), [rules[0].bin_labels[0], rules[0].bin_labels[-1]])
        self.assertEqual(other_binned.schema.column('amount').kind, CATEGORICAL)

    def test_missing_values_stay_missing(self):
        dataset = numeric_dataset([1, None, 3, 4])
        binned = discretise(dataset, [BinRule.from_boundaries('amount', [2])])
        self.assertTrue(pd.isna(binned.frame.loc[1, 'amount']))


class GermanTransformTests(SimpleTestCase):
    def setUp(self):
        tmp = TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        path = Path(tmp.name) / 'german.data'
        path.write_text('\n'.join(german_lines(seed=11)) + '\n')
        self.german = load_german(path)

    def test_age_is_binarised_at_twenty_five(self):
        ages = self.german.frame['age'].to_numpy(dtype=int)
        binarised = binarise_age(self.german)
        np.testing.assert_array_equal(binarised.frame['age'] == 'young', ages < 25)
        self.assertEqual(binarised.sensitive_vector().sum(), int((ages >= 25).sum()))

    def test_personal_status_removal_requires_sex(self):
        with self.assertRaises(ValidationError) as caught:
            remove_personal_status(self.german)
        self.assertEqual(caught.exception.code, 'sex_not_derived')
        removed = remove_personal_status(derive_sex(self.german))
        self.assertFalse(removed.schema.has_column('personal-status-sex'))
        with self.assertRaises(ValidationError) as caught:
            remove_personal_status(removed)
        self.assertEqual(caught.exception.code, 'already_removed')


class PoolingTests(SimpleTestCase):
    def setUp(self):
        tmp = TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        path = Path(tmp.name) / 'adult.data'
        path.write_text('\n'.join(adult_lines(300, seed=12)) + '\n')
        self.adult = load_adult(path)

    def test_rare_categories_are_pooled_and_frequent_ones_kept(self):
        pooled = pool_rare_bins(self.adult, threshold=20)
        for name in ('workclass', 'education', 'native-country'):
            counts = self.adult.category_counts(name)
            after = pooled.category_counts(name)
            for category, count in counts.items():
                if count >= 20:
                    self.assertEqual(after[category], count)
                else:
                    self.assertNotIn(category, after)
            rare_total = sum(count for count in counts.values() if count < 20)
            self.assertEqual(after.get(POOL_VALUE, 0), rare_total)

    def test_sensitive_and_label_columns_are_never_pooled(self):
        pooled = pool_rare_bins(self.adult, threshold=10 ** 6)
        self.assertEqual(pooled.category_counts('sex'), self.adult.category_counts('sex'))
        self.assertEqual(pooled.category_counts('income'), self.adult.category_counts('income'))

    def test_missing_cells_are_not_pooled(self):
        pooled = pool_rare_bins(self.adult, threshold=10 ** 6)
        np.testing.assert_array_equal(pooled.missing_rows(), self.adult.missing_rows())

    def test_numerical_columns_are_refused(self):
        with self.assertRaises(ValidationError) as caught:
            pool_rare_bins(self.adult, columns=['age'])
        self.assertEqual(caught.exception.code, 'not_categorical')


class EncodingTests(SimpleTestCase):
    def setUp(self):
        tmp = TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.tmp = Path(tmp.name)
        path = self.tmp / 'adult.data'
        path.write_text('\n'.join(adult_lines(250, seed=13)) + '\n')
        self.adult, _, _ = discretise_quartiles(load_adult(path))

    def test_integer_encoding_drops_rows_with_missing_values(self):
        encoded = encode(self.adult, INTEGER)
        self.assertEqual(len(encoded), int((~self.adult.missing_rows()).sum()))
        self.assertEqual(encoded.n_features, len(self.adult.schema.feature_names()))
        self.assertTrue((encoded.features >= 0).all())
        self.assertTrue((encoded.features < encoded.cardinalities()[None, :]).all())

    def test_one_hot_keeps_every_row_with_one_indicator_per_known_value(self):
        encoded = encode(self.adult, ONE_HOT)
        self.assertEqual(len(encoded), len(self.adult))
        per_attribute = {}
        for position, column in enumerate(encoded.columns):
            per_attribute.setdefault(column.source, []).append(position)
        for name, positions in per_attribute.items():
            sums = encoded.features[:, positions].sum(axis=1)
            missing = self.adult.frame[name].isna().to_numpy()
            np.testing.assert_array_equal(sums, np.where(missing, 0, 1))

    def test_decode_row_recovers_source_categories(self):
        for kind in (INTEGER, ONE_HOT):
            encoded = encode(self.adult, kind)
            complete = np.flatnonzero(~self.adult.missing_rows())[0]
            row = complete if kind == ONE_HOT else 0
            decoded = encoded.decode_row(row)
            for name in self.adult.schema.feature_names():
                self.assertEqual(decoded[name], self.adult.frame.loc[complete, name])

    def test_numerical_columns_must_be_discretised(self):
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / 'adult.data'
            path.write_text('\n'.join(adult_lines(20)) + '\n')
            raw = load_adult(path)
        with self.assertRaises(ValidationError) as caught:
            encode(raw, ONE_HOT)
        self.assertEqual(caught.exception.code, 'not_discretised')

    def test_remove_sensitive_drops_only_sensitive_columns_and_keeps_the_vector(self):
        for kind in (INTEGER, ONE_HOT):
            encoded = encode(self.adult, kind)
            blind = remove_sensitive(encoded)
            self.assertEqual(blind.n_features, encoded.n_features - len(encoded.sensitive_positions()))
            self.assertNotIn('sex', {column.source for column in blind.columns})
            np.testing.assert_array_equal(blind.sensitive, encoded.sensitive)
            with self.assertRaises(ValidationError) as caught:
                remove_sensitive(blind)
            self.assertEqual(caught.exception.code, 'already_removed')

    def test_flip_sensitive_swaps_group_in_features_and_vector(self):
        for kind in (INTEGER, ONE_HOT):
            encoded = encode(self.adult, kind)
            rows = np.arange(0, len(encoded), 3)
            flipped = flip_sensitive(encoded, rows)
            np.testing.assert_array_equal(flipped.sensitive[rows], 1 - encoded.sensitive[rows])
            untouched = np.setdiff1d(np.arange(len(encoded)), rows)
            np.testing.assert_array_equal(flipped.features[untouched], encoded.features[untouched])
            for row in rows[:5]:
                before = encoded.decode_row(int(row))['sex']
                after = flipped.decode_row(int(row))['sex']
                self.assertEqual({before, after}, {'Male', 'Female'})

    def test_encoded_arrays_are_read_only(self):
        encoded = encode(self.adult, INTEGER)
        with self.assertRaises(ValueError):
            encoded.features[0, 0] = 1

    def test_write_encoded_lists_code_tables(self):
        encoded = encode(self.adult, INTEGER)
        path = write_encoded(encoded, self.tmp / 'adult_integer.csv')
        header = path.read_text().splitlines()[0]
        self.assertIn('sex{', header)
        self.assertTrue(header.endswith('label,sensitive'))


class DatasetVersionServiceTests(SimpleTestCase):
    def setUp(self):
        tmp = TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.data_dir = write_data_dir(Path(tmp.name), seed=21, adult_rows=500)
        self.service = DatasetVersionService(data_dir=str(self.data_dir), split_seed=2019, pool_threshold=10)

    def test_german_version_has_the_pinned_training_cells(self):
        encoded = self.service.build_version(GERMAN, INTEGER)
        self.assertEqual(len(encoded), 700)
        cells = {
            (label, group): int(np.sum((encoded.labels == label) & (encoded.sensitive == group)))
            for label in (0, 1) for group in (0, 1)
        }
        self.assertEqual(cells, {(1, 1): 428, (1, 0): 62, (0, 1): 167, (0, 0): 43})
        self.assertNotIn('personal-status-sex', {column.source for column in encoded.columns})
        self.assertIn('sex', {column.source for column in encoded.columns})

    def test_both_encodings_share_one_preparation(self):
        integer = self.service.build_version(ADULT, INTEGER)
        one_hot = self.service.build_version(ADULT, ONE_HOT)
        self.assertEqual(len(one_hot), 500)
        self.assertLessEqual(len(integer), len(one_hot))
        self.assertIs(self.service.build_version(ADULT, INTEGER), integer)

    def test_missing_files_are_reported(self):
        (self.data_dir / 'german.data').unlink()
        with self.assertRaises(ValidationError) as caught:
            self.service.build_version(GERMAN, ONE_HOT)
        self.assertEqual(caught.exception.code, 'missing_files')
