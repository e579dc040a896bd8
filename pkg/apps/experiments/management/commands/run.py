"""
Management command that executes a configuration grid and writes results,
aggregates, boxplot data and a run manifest.
"""

import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from apps.experiments.config import load_run_spec
from apps.experiments.grid import GRID_PRESET_CHOICES
from apps.experiments.services import ExperimentService

logger = logging.getLogger(__name__)

# command-line flag -> run setting it overrides
OVERRIDE_OPTIONS = {
    'out': 'output_dir',
    'seeds': 'seeds',
    'jobs': 'jobs',
    'grid_preset': 'grid_preset',
    'data_dir': 'data_dir',
    'datasets': 'datasets',
    'encodings': 'encodings',
    'samplings': 'samplings',
    'cv_modes': 'cv_modes',
    'learners': 'learners',
}

# Django verbosity -> level of the apps.* loggers during the run
LOG_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}


class Command(BaseCommand):
    help = 'Run every (configuration, seed, fold) of an experiment grid'

    def add_arguments(self, parser):
        parser.add_argument('--config', type=str, help='INI run configuration')
        parser.add_argument('--out', type=str, help='Output directory (defaults to FAIRPREP_OUTPUT_DIR)')
        parser.add_argument('--seeds', type=str, help="Seed list such as '1-30' or '1,2,5'")
        parser.add_argument('--jobs', type=int, help='Number of worker processes')
        parser.add_argument(
            '--grid-preset',
            type=str,
            choices=[choice for choice, _ in GRID_PRESET_CHOICES],
            help='Named grid; explicit flags still override it',
        )
        parser.add_argument('--data-dir', type=str, help='Dataset directory (defaults to FAIRPREP_DATA_DIR)')
        parser.add_argument('--datasets', type=str, help='Comma-separated dataset filter')
        parser.add_argument('--encodings', type=str, help='Comma-separated encoding filter')
        parser.add_argument('--samplings', type=str, help='Comma-separated sampling strategy filter')
        parser.add_argument('--cv-modes', type=str, help='Comma-separated cross-validation mode filter')
        parser.add_argument('--learners', type=str, help='Comma-separated learner filter (DT, DTns, RF, RFns)')

    def handle(self, *args, **options):
        overrides = {
            setting: str(options[option])
            for option, setting in OVERRIDE_OPTIONS.items()
            if options.get(option) is not None
        }
        # -v left at Django's default keeps the verbosity of the config file
        if options.get('verbosity', 1) != 1:
            overrides['verbosity'] = str(options['verbosity'])

        try:
            spec = load_run_spec(options.get('config'), overrides=overrides)
        except ValidationError as e:
            for message in e.messages:
                self.stdout.write(self.style.ERROR(f"  - {message}"))
            raise CommandError(f"Invalid run configuration ({len(e.messages)} problem(s))")

        logging.getLogger('apps').setLevel(LOG_LEVELS[spec.verbosity])

        configs = spec.experiment_configs()
        self.stdout.write(
            f"Running {len(configs)} configurations x {len(spec.seeds)} seeds x {spec.folds} folds "
            f"with {spec.jobs} job(s)"
        )

        outcome = ExperimentService(spec).run()

        self.stdout.write('\n' + '=' * 50)
        self.stdout.write('RUN SUMMARY')
        self.stdout.write('=' * 50)
        self.stdout.write(f"Result rows: {len(outcome.results)}")
        self.stdout.write(f"Failed runs: {outcome.failed}")
        self.stdout.write(f"Sensitive-flip violations: {outcome.manifest['flip_violations']}")
        for check in outcome.aggregate.trends:
            if check.verdict == 'warn':
                self.stdout.write(self.style.WARNING(
                    f"⚠ {check.check} does not hold for {check.group} ({check.left} vs {check.right})"
                ))
        for name, path in outcome.paths.items():
            self.stdout.write(f"  {name}: {path}")

        if outcome.failed or outcome.manifest['flip_violations']:
            raise CommandError(f"{outcome.failed} run(s) failed, "
                               f"{outcome.manifest['flip_violations']} sensitive-flip violation(s)")
        self.stdout.write(self.style.SUCCESS('\nRun completed!'))
