from io import StringIO
from pathlib import Path
from tempfile import TemporaryDirectory
import unittest

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from apps.preprocess.transforms import binarise_age

from .loaders import (
    ADULT_SCHEMA, GERMAN_SCHEMA, dataset_paths, derive_sex, load_adult, load_german, read_adult_file,
)
from .schema import CATEGORICAL, Column, Dataset, Schema
from .serialization import read_canonical_csv, to_canonical_csv
from .splitting import GERMAN_TRAINING_CELLS, largest_remainder, stratified_split, german_training_split
from .testing import adult_lines, german_lines, write_data_dir


def real_files_present(name):
    return all(path.exists() for path in dataset_paths(settings.FAIRPREP_DATA_DIR)[name])


def toy_dataset(labels, groups, name='toy'):
    schema = Schema(
        columns=(Column('colour', CATEGORICAL, ('red', 'blue')), Column('group', CATEGORICAL, ('p', 'u')),
                 Column('label', CATEGORICAL, ('yes', 'no'))),
        label_column='label',
        sensitive_column='group',
        label_values=('yes', 'no'),
        favourable_label='yes',
        sensitive_values=('p', 'u'),
        unprivileged_value='u',
    )
    frame = pd.DataFrame({
        'colour': ['red' if i % 2 else 'blue' for i in range(len(labels))],
        'group': list(groups),
        'label': list(labels),
    })
    return Dataset(name=name, schema=schema, frame=frame)


class SchemaTests(SimpleTestCase):
    def test_label_and_sensitive_vectors_use_favourable_and_privileged_as_one(self):
        dataset = toy_dataset(['yes', 'no', 'yes'], ['p', 'u', 'u'])
        np.testing.assert_array_equal(dataset.label_vector(), [1, 0, 1])
        np.testing.assert_array_equal(dataset.sensitive_vector(), [1, 0, 0])

    def test_schema_rejects_identical_label_and_sensitive_columns(self):
        with self.assertRaises(ValidationError) as caught:
            Schema(columns=(Column('y', CATEGORICAL, ('a', 'b')),), label_column='y', sensitive_column='y',
                   label_values=('a', 'b'), favourable_label='a', sensitive_values=('a', 'b'),
                   unprivileged_value='b')
        self.assertEqual(caught.exception.code, 'invalid_schema')

    def test_missing_cells_rejected_unless_declared(self):
        dataset = toy_dataset(['yes', 'no'], ['p', 'u'])
        frame = dataset.frame.copy()
        frame.loc[0, 'colour'] = pd.NA
        with self.assertRaises(ValidationError) as caught:
            dataset.with_frame(frame)
        self.assertEqual(caught.exception.code, 'unexpected_missing')

    def test_non_binary_sensitive_column_is_reported(self):
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / 'german.data'
            path.write_text('\n'.join(german_lines()[:20]) + '\n')
            german = load_german(path)
        with self.assertRaises(ValidationError) as caught:
            german.sensitive_vector()
        self.assertEqual(caught.exception.code, 'sensitive_not_binary')


class AdultLoaderTests(SimpleTestCase):
    def setUp(self):
        self.tmp = TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def write(self, name, lines):
        path = self.root / name
        path.write_text('\n'.join(lines) + '\n')
        return path

    def test_question_marks_become_missing_and_rows_are_kept(self):
        lines = adult_lines(200, seed=3)
        expected_missing = sum(1 for line in lines if '?' in line)
        dataset = load_adult(self.write('adult.data', lines))
        self.assertEqual(len(dataset), 200)
        self.assertEqual(int(dataset.missing_rows().sum()), expected_missing)
        self.assertEqual(dataset.schema, ADULT_SCHEMA)

    def test_test_file_header_and_trailing_dots_are_handled(self):
        frame = read_adult_file(self.write('adult.test', adult_lines(30, seed=4, test_file=True)))
        self.assertEqual(len(frame), 30)
        self.assertTrue(frame['income'].isin(['>50K', '<=50K']).all())

    def test_short_row_is_malformed(self):
        lines = adult_lines(5)
        lines[2] = ', '.join(lines[2].split(', ')[:10])
        with self.assertRaises(ValidationError) as caught:
            load_adult(self.write('adult.data', lines))
        self.assertEqual(caught.exception.code, 'malformed_row')

    def test_trailing_short_row_is_malformed_not_an_unknown_category(self):
        lines = adult_lines(5)
        lines[-1] = ', '.join(lines[-1].split(', ')[:14])
        with self.assertRaises(ValidationError) as caught:
            load_adult(self.write('adult.data', lines))
        self.assertEqual(caught.exception.code, 'malformed_row')
        self.assertIn('row 5', caught.exception.message)

    def test_unknown_category_is_rejected(self):
        lines = adult_lines(5)
        fields = lines[1].split(', ')
        fields[9] = 'Unknown-sex'
        lines[1] = ', '.join(fields)
        with self.assertRaises(ValidationError) as caught:
            load_adult(self.write('adult.data', lines))
        self.assertEqual(caught.exception.code, 'unknown_category')

    def test_empty_file(self):
        with self.assertRaises(ValidationError) as caught:
            load_adult(self.write('adult.data', []))
        self.assertEqual(caught.exception.code, 'empty')

    @unittest.skipUnless(real_files_present('adult'), 'UCI Adult files not found in FAIRPREP_DATA_DIR')
    def test_real_adult_training_file(self):
        dataset = load_adult(*dataset_paths(settings.FAIRPREP_DATA_DIR)['adult'])
        self.assertEqual(len(dataset), 32561)
        self.assertEqual(int(dataset.missing_rows().sum()), 32561 - 30162)


class GermanLoaderTests(SimpleTestCase):
    def setUp(self):
        self.tmp = TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = Path(self.tmp.name) / 'german.data'
        self.path.write_text('\n'.join(german_lines(seed=5)) + '\n')

    def test_labels_are_decoded(self):
        dataset = load_german(self.path)
        self.assertEqual(len(dataset), 1000)
        self.assertEqual(dataset.category_counts('credit'), {'good': 700, 'bad': 300})
        self.assertEqual(dataset.schema, GERMAN_SCHEMA)

    def test_derive_sex_keeps_source_column_and_maps_codes(self):
        derived = derive_sex(load_german(self.path))
        names = derived.schema.names()
        self.assertEqual(names.index('sex'), names.index('personal-status-sex') + 1)
        female = derived.frame['personal-status-sex'].isin(['A92', 'A95'])
        self.assertTrue((derived.frame.loc[female, 'sex'] == 'female').all())
        self.assertTrue((derived.frame.loc[~female, 'sex'] == 'male').all())

    def test_derive_sex_twice_fails(self):
        derived = derive_sex(load_german(self.path))
        with self.assertRaises(ValidationError) as caught:
            derive_sex(derived)
        self.assertEqual(caught.exception.code, 'already_derived')

    def test_unknown_label_code(self):
        lines = german_lines()[:10]
        lines[0] = lines[0][:-1] + '3'
        self.path.write_text('\n'.join(lines) + '\n')
        with self.assertRaises(ValidationError) as caught:
            load_german(self.path)
        self.assertEqual(caught.exception.code, 'unknown_category')

    def test_row_missing_its_label_is_malformed(self):
        lines = german_lines()[:10]
        lines[4] = lines[4].rsplit(' ', 1)[0]
        self.path.write_text('\n'.join(lines) + '\n')
        with self.assertRaises(ValidationError) as caught:
            load_german(self.path)
        self.assertEqual(caught.exception.code, 'malformed_row')
        self.assertIn('row 5', caught.exception.message)


class CanonicalCsvTests(SimpleTestCase):
    def test_reload_reproduces_the_frame_including_missing_cells(self):
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / 'adult.data'
            path.write_text('\n'.join(adult_lines(120, seed=9)) + '\n')
            dataset = load_adult(path)
        text = to_canonical_csv(dataset)
        self.assertTrue(text.endswith('\n'))
        reloaded = read_canonical_csv(StringIO(text), ADULT_SCHEMA, 'adult')
        self.assertEqual(to_canonical_csv(reloaded), text)
        np.testing.assert_array_equal(reloaded.missing_rows(), dataset.missing_rows())


class SplittingTests(SimpleTestCase):
    def test_largest_remainder_distributes_the_total(self):
        self.assertEqual(largest_remainder([5, 3, 2], 5), [3, 1, 1])
        self.assertEqual(sum(largest_remainder([7, 11, 13, 17], 33)), 33)
        self.assertEqual(largest_remainder([0, 0], 3), [0, 0])

    def test_proportional_split_keeps_cell_shares(self):
        labels = ['yes'] * 60 + ['no'] * 40
        groups = (['p'] * 45 + ['u'] * 15) + (['p'] * 30 + ['u'] * 10)
        split = stratified_split(toy_dataset(labels, groups), 0.7, seed=1)
        self.assertEqual(len(split.train), 70)
        self.assertEqual(len(split.test), 30)
        train = split.train
        counts = pd.crosstab(train.frame['label'], train.frame['group'])
        # the two .5 remainders tie; the earlier cell (favourable, unprivileged) wins
        self.assertEqual(counts.loc['yes', 'u'], 11)
        self.assertEqual(counts.loc['yes', 'p'], 31)
        self.assertEqual(counts.loc['no', 'u'], 7)

    def test_split_is_deterministic_and_disjoint(self):
        dataset = toy_dataset(['yes', 'no'] * 50, ['p', 'u', 'p', 'p'] * 25)
        first = stratified_split(dataset, 0.6, seed=7)
        second = stratified_split(dataset, 0.6, seed=7)
        pd.testing.assert_frame_equal(first.train.frame, second.train.frame)
        self.assertEqual(len(first.train) + len(first.test), 100)

    def test_invalid_fraction(self):
        with self.assertRaises(ValidationError) as caught:
            stratified_split(toy_dataset(['yes', 'no'], ['p', 'u']), 1.0, seed=0)
        self.assertEqual(caught.exception.code, 'invalid_fraction')

    def test_german_split_matches_pinned_training_cells(self):
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / 'german.data'
            path.write_text('\n'.join(german_lines(seed=2)) + '\n')
            german = binarise_age(derive_sex(load_german(path)))
        split = german_training_split(german, seed=2019)
        self.assertEqual(len(split.train), 700)
        observed = pd.crosstab(split.train.frame['credit'], split.train.frame['age'])
        for (label, group), count in GERMAN_TRAINING_CELLS.items():
            self.assertEqual(observed.loc[label, group], count)

    def test_targets_exceeding_a_cell_are_rejected(self):
        dataset = toy_dataset(['yes'] * 8 + ['no'] * 2, ['p', 'u'] * 5)
        with self.assertRaises(ValidationError) as caught:
            stratified_split(dataset, 0.5, seed=0, cell_targets={('no', 'p'): 4, ('yes', 'p'): 1})
        self.assertEqual(caught.exception.code, 'invalid_targets')


class DataDirFixtureTests(SimpleTestCase):
    def test_written_directory_holds_every_expected_file(self):
        with TemporaryDirectory() as tmp:
            write_data_dir(tmp)
            for paths in dataset_paths(tmp).values():
                self.assertTrue(all(path.exists() for path in paths))
