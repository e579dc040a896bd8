# apps/experiments/serializers.py
from django.conf import settings
from django.core.exceptions import ValidationError as DjangoValidationError
from rest_framework import serializers
import logging

from apps.learners.services import LEARNERS
from apps.preprocess.services import DATASET_CHOICES
from apps.sampling.strategies import STRATEGIES

from .folds import CV_MODES
from .grid import ENCODINGS, GRID_PRESET_CHOICES, parse_seeds

logger = logging.getLogger(__name__)

COMMAND_CHOICES = ('verify_datasets', 'run', 'plot_data')


def _choice_list(choices):
    """Comma-separated axis values; an absent axis spans every choice"""
    choices = list(choices)
    return serializers.ListField(child=serializers.ChoiceField(choices=choices), allow_empty=False,
                                 default=lambda: list(choices))


class RunSpecSerializer(serializers.Serializer):
    """Validates the flattened key/value pairs of a run configuration"""
    command = serializers.ChoiceField(choices=COMMAND_CHOICES, default='run')
    output_dir = serializers.CharField(default=lambda: str(settings.FAIRPREP_OUTPUT_DIR))
    grid_preset = serializers.ChoiceField(choices=GRID_PRESET_CHOICES, required=False, allow_blank=True,
                                          allow_null=True, default=None)
    verbosity = serializers.IntegerField(min_value=0, max_value=3, default=1)
    jobs = serializers.IntegerField(min_value=1, default=lambda: settings.FAIRPREP_JOBS)

    datasets = _choice_list([choice for choice, _ in DATASET_CHOICES])
    data_dir = serializers.CharField(required=False, allow_blank=True, allow_null=True, default=None)
    split_seed = serializers.IntegerField(min_value=0, default=lambda: settings.FAIRPREP_GERMAN_SPLIT_SEED)

    encodings = _choice_list(ENCODINGS)
    pool_threshold = serializers.IntegerField(min_value=0, default=lambda: settings.FAIRPREP_POOL_THRESHOLD)

    samplings = _choice_list(STRATEGIES)
    sample_before_cv = serializers.BooleanField(default=False)

    learners = _choice_list(LEARNERS)
    max_depth = serializers.IntegerField(min_value=1, default=30)
    min_instances_per_node = serializers.IntegerField(min_value=1, default=1)
    n_trees = serializers.IntegerField(min_value=1, default=10)
    bootstrap = serializers.BooleanField(default=True)

    cv_modes = _choice_list(CV_MODES)
    folds = serializers.IntegerField(min_value=2, default=5)
    seeds = serializers.CharField(default=lambda: settings.FAIRPREP_DEFAULT_SEEDS)
    exclude_extreme_outliers = serializers.BooleanField(default=False)

    def validate_seeds(self, value):
        try:
            return parse_seeds(value)
        except DjangoValidationError as e:
            raise serializers.ValidationError(e.messages)

    def validate_grid_preset(self, value):
        return value or None

    def validate_data_dir(self, value):
        return value or None

    def validate(self, data):
        for name in ('datasets', 'encodings', 'samplings', 'learners', 'cv_modes'):
            values = data[name]
            if len(set(values)) != len(values):
                logger.warning(f"Run config lists duplicate {name}: {values}")
                raise serializers.ValidationError({name: f"Duplicate entries in {values}"})
        return data
