"""
Run specifications: INI text <-> validated RunSpec
"""
from configparser import ConfigParser, Error as ConfigParserError
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import logging
import re

from django.core.exceptions import ValidationError

from .grid import GRID_PRESETS, PRESET_AXES, ExperimentConfig, expand_grid, format_seeds
from .serializers import RunSpecSerializer

logger = logging.getLogger(__name__)

# (section, key) -> RunSpec field
INI_LAYOUT: Dict[Tuple[str, str], str] = {
    ('run', 'command'): 'command',
    ('run', 'output_dir'): 'output_dir',
    ('run', 'grid_preset'): 'grid_preset',
    ('run', 'verbosity'): 'verbosity',
    ('run', 'jobs'): 'jobs',
    ('dataset', 'names'): 'datasets',
    ('dataset', 'data_dir'): 'data_dir',
    ('dataset', 'split_seed'): 'split_seed',
    ('preprocess', 'encodings'): 'encodings',
    ('preprocess', 'pool_threshold'): 'pool_threshold',
    ('sampling', 'strategies'): 'samplings',
    ('sampling', 'sample_before_cv'): 'sample_before_cv',
    ('learners', 'names'): 'learners',
    ('learners', 'max_depth'): 'max_depth',
    ('learners', 'min_instances_per_node'): 'min_instances_per_node',
    ('learners', 'n_trees'): 'n_trees',
    ('learners', 'bootstrap'): 'bootstrap',
    ('experiment', 'cv_modes'): 'cv_modes',
    ('experiment', 'folds'): 'folds',
    ('experiment', 'seeds'): 'seeds',
    ('experiment', 'exclude_extreme_outliers'): 'exclude_extreme_outliers',
}
FIELD_LOCATIONS = {name: location for location, name in INI_LAYOUT.items()}
LIST_FIELDS = ('datasets', 'encodings', 'samplings', 'learners', 'cv_modes')

_SECTION_LINE = re.compile(r'^\s*\[(?P<section>[^\]]+)\]')
_KEY_LINE = re.compile(r'^\s*(?P<key>[^=:#;\s][^=:]*?)\s*[=:]')


@dataclass(frozen=True)
class RunSpec:
    command: str
    output_dir: str
    grid_preset: Optional[str]
    verbosity: int
    jobs: int
    datasets: Tuple[str, ...]
    data_dir: Optional[str]
    split_seed: int
    encodings: Tuple[str, ...]
    pool_threshold: int
    samplings: Tuple[str, ...]
    sample_before_cv: bool
    learners: Tuple[str, ...]
    max_depth: int
    min_instances_per_node: int
    n_trees: int
    bootstrap: bool
    cv_modes: Tuple[str, ...]
    folds: int
    seeds: Tuple[int, ...]
    exclude_extreme_outliers: bool
    config_path: Optional[str] = field(default=None, compare=False)

    def learner_options(self) -> Dict[str, object]:
        return {
            'max_depth': self.max_depth,
            'min_instances_per_node': self.min_instances_per_node,
            'n_trees': self.n_trees,
            'bootstrap': self.bootstrap,
        }

    def experiment_configs(self) -> List[ExperimentConfig]:
        return expand_grid(self.datasets, self.encodings, self.samplings, self.cv_modes, self.learners,
                           self.seeds, k=self.folds, learner_options=self.learner_options())

    def as_dict(self) -> Dict[str, object]:
        values = asdict(self)
        values.pop('config_path')
        return values


def key_lines(text: str) -> Dict[Tuple[str, str], int]:
    """1-based line of every (section, key) in INI text"""
    lines: Dict[Tuple[str, str], int] = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        header = _SECTION_LINE.match(line)
        if header:
            section = header.group('section').strip().lower()
            continue
        key = _KEY_LINE.match(line)
        if key and section is not None:
            lines.setdefault((section, key.group('key').strip().lower()), number)
    return lines


def _located(location: Tuple[str, str], lines: Dict[Tuple[str, str], int], message: str) -> str:
    line = lines.get(location)
    prefix = f'line {line}: ' if line is not None else ''
    return f'{prefix}[{location[0]}] {location[1]}: {message}'


def _flatten_errors(errors) -> List[str]:
    if isinstance(errors, dict):
        return [message for value in errors.values() for message in _flatten_errors(value)]
    if isinstance(errors, (list, tuple)):
        return [message for value in errors for message in _flatten_errors(value)]
    return [str(errors)]


def preset_values(preset: str) -> Dict[str, str]:
    """Raw setting values a grid preset stands for"""
    values = {name: ', '.join(axis) for name, axis in PRESET_AXES.items()}
    values['datasets'] = ', '.join(GRID_PRESETS[preset]['datasets'])
    values['seeds'] = format_seeds(GRID_PRESETS[preset]['seeds'])
    return values


def _with_preset(from_text: Dict[str, object], overrides: Dict[str, str]) -> Dict[str, object]:
    """
    A preset fills the settings the text leaves out. A preset given as an override
    also beats the text; explicit overrides always win.
    """
    preset = overrides.get('grid_preset') or from_text.get('grid_preset')
    if preset not in GRID_PRESETS:
        return {**from_text, **overrides}
    if overrides.get('grid_preset'):
        return {**from_text, **preset_values(preset), **overrides}
    return {**preset_values(preset), **from_text, **overrides}


def parse_run_spec(text: str, config_path: Optional[str] = None, overrides: Optional[Dict[str, str]] = None) -> RunSpec:
    """
    Parse and validate INI text. Every problem is collected before raising a single
    ValidationError whose messages carry the offending line where known.
    overrides holds raw field values (as they would appear in the INI) that win over the text.
    """
    parser = ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=config_path or '<config>')
    except ConfigParserError as e:
        line = getattr(e, 'lineno', None)
        prefix = f'line {line}: ' if line is not None else ''
        message = getattr(e, 'message', str(e))
        raise ValidationError([f"{prefix}{message}"], code='invalid_config')

    lines = key_lines(text)
    problems: List[str] = []
    from_text: Dict[str, object] = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            name = INI_LAYOUT.get((section.lower(), key))
            if name is None:
                problems.append(_located((section.lower(), key), lines, 'unknown setting'))
                continue
            from_text[name] = value
    raw = _with_preset(from_text, overrides or {})
    for name in LIST_FIELDS:
        if name in raw:
            raw[name] = [item.strip() for item in str(raw[name]).split(',') if item.strip()]

    serializer = RunSpecSerializer(data=raw)
    if not serializer.is_valid():
        for name, messages in serializer.errors.items():
            location = FIELD_LOCATIONS.get(name)
            for message in _flatten_errors(messages):
                problems.append(_located(location, lines, message) if location else message)

    if problems:
        for problem in problems:
            logger.warning(f"Run config {config_path or '<config>'}: {problem}")
        raise ValidationError(problems, code='invalid_config')

    data = dict(serializer.validated_data)
    for name in LIST_FIELDS:
        data[name] = tuple(data[name])
    return RunSpec(config_path=config_path, **data)


def load_run_spec(path: Union[str, Path, None], overrides: Optional[Dict[str, str]] = None) -> RunSpec:
    if path is None:
        return parse_run_spec('', overrides=overrides)
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ValidationError(f'Cannot read config {path}: {e}', code='unreadable')
    return parse_run_spec(text, config_path=str(path), overrides=overrides)


def _ini_value(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return str(value)


def dump_run_spec(spec: RunSpec) -> str:
    """INI text that parse_run_spec turns back into an equal RunSpec"""
    values = spec.as_dict()
    parser = ConfigParser(interpolation=None)
    for (section, key), name in INI_LAYOUT.items():
        if not parser.has_section(section):
            parser.add_section(section)
        value = values[name]
        if name == 'seeds':
            text = format_seeds(value)
        elif name in LIST_FIELDS:
            text = ', '.join(value)
        else:
            text = _ini_value(value)
        parser.set(section, key, text)

    lines = []
    for section in parser.sections():
        lines.append(f'[{section}]')
        lines.extend(f'{key} = {value}' for key, value in parser.items(section))
        lines.append('')
    return '\n'.join(lines)
