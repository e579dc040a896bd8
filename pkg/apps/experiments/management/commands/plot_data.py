"""
Management command that turns a results file into plot-ready delimited text.
"""

from pathlib import Path
import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from apps.experiments import reports
from apps.experiments.aggregation import BOXPLOT_METRICS
from apps.experiments.services import plot_data

logger = logging.getLogger(__name__)


def _names(value, default):
    if not value:
        return tuple(default)
    return tuple(name.strip() for name in value.split(',') if name.strip())


class Command(BaseCommand):
    help = 'Emit scatter (mean fairness vs. performance) or boxplot (five-number summary) data'

    def add_arguments(self, parser):
        parser.add_argument('--results', type=str, required=True, help='results.csv written by the run command')
        parser.add_argument('--kind', type=str, required=True,
                            choices=[choice for choice, _ in reports.PLOT_KIND_CHOICES])
        parser.add_argument('--out', type=str, help='Output path (defaults to <kind>.csv next to the results)')
        parser.add_argument('--fairness-metrics', type=str, help='Scatter x-axis metrics, e.g. cvs,npi,di')
        parser.add_argument('--performance-metrics', type=str, help='Scatter y-axis metrics, e.g. accuracy,f1')
        parser.add_argument('--metrics', type=str, help='Boxplot metrics, e.g. cvs_ratio,npi_ratio')
        parser.add_argument(
            '--exclude-extreme-outliers',
            action='store_true',
            help='Drop values beyond 3 IQR before computing boxplot statistics',
        )

    def handle(self, *args, **options):
        results_path = Path(options['results'])
        kind = options['kind']
        out = Path(options['out']) if options.get('out') else results_path.with_name(f"{kind}_plot.csv")

        try:
            path = plot_data(
                results_path,
                kind,
                out,
                fairness_metrics=_names(options.get('fairness_metrics'), reports.DEFAULT_SCATTER_FAIRNESS),
                performance_metrics=_names(options.get('performance_metrics'), reports.DEFAULT_SCATTER_PERFORMANCE),
                boxplot_metrics=_names(options.get('metrics'), BOXPLOT_METRICS),
                exclude_extreme=options.get('exclude_extreme_outliers', False),
            )
        except ValidationError as e:
            raise CommandError('; '.join(e.messages))

        self.stdout.write(self.style.SUCCESS(f"{kind} data written to {path}"))
