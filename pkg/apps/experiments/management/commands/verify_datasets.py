"""
Management command that rebuilds every encoded training version and checks its
dataset-level statistics against the pinned reference values.
"""

from pathlib import Path
import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from apps.experiments.reports import format_value, write_table
from apps.experiments.services import VERIFICATION_COLUMNS, DatasetVerificationService
from apps.preprocess.services import DATASET_CHOICES, DatasetVersionService

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Verify group x label counts, CVS, NPI, DI and the 80% rule of every dataset version'

    def add_arguments(self, parser):
        parser.add_argument(
            '--data-dir',
            type=str,
            help='Directory holding adult.data, adult.test and german.data (defaults to FAIRPREP_DATA_DIR)',
        )
        parser.add_argument(
            '--datasets',
            type=str,
            help='Comma-separated subset of datasets to verify',
        )
        parser.add_argument(
            '--split-seed',
            type=int,
            help='Seed of the German Credit train/test split (defaults to FAIRPREP_GERMAN_SPLIT_SEED)',
        )
        parser.add_argument(
            '--out',
            type=str,
            help='Also write the verification table as CSV to this path',
        )

    def handle(self, *args, **options):
        datasets = None
        if options.get('datasets'):
            datasets = [name.strip() for name in options['datasets'].split(',') if name.strip()]
            known = [choice for choice, _ in DATASET_CHOICES]
            unknown = [name for name in datasets if name not in known]
            if unknown:
                raise CommandError(f"Unknown dataset(s): {', '.join(unknown)}")

        versions = DatasetVersionService(data_dir=options.get('data_dir'), split_seed=options.get('split_seed'))
        try:
            report = DatasetVerificationService(versions).verify(datasets)
        except ValidationError as e:
            raise CommandError('; '.join(e.messages))

        for check in report.checks:
            style = self.style.SUCCESS if check.passed else self.style.ERROR
            mark = '✓' if check.passed else '✗'
            self.stdout.write(style(f"{mark} {check.dataset} / {check.encoding}"))
            self.stdout.write(f"  {check.anchor}")
            for name in VERIFICATION_COLUMNS[3:]:
                if name in check.observed:
                    self.stdout.write(f"  {name:<38}{format_value(check.observed[name])}")
            for deviation in check.deviations:
                self.stdout.write(self.style.ERROR(
                    f"  → {deviation.quantity}: expected {format_value(deviation.expected)}, "
                    f"observed {format_value(deviation.observed)}"
                ))

        if options.get('out'):
            path = write_table(Path(options['out']), VERIFICATION_COLUMNS, report.records())
            self.stdout.write(f"Verification table written to {path}")

        if not report.passed:
            raise CommandError('Dataset verification failed: some statistics deviate from the pinned values')
        self.stdout.write(self.style.SUCCESS('\nAll dataset versions match the pinned values'))
