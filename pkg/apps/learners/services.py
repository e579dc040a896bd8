"""
Learner catalogue used by experiments: DT, DTns, RF, RFns
"""
from dataclasses import dataclass
import logging

from django.core.exceptions import ValidationError

from apps.preprocess.encoding import EncodedDataset, remove_sensitive

from .forest import ForestConfig, fit_forest
from .tree import FittedModel, TreeConfig, fit_tree, predict

logger = logging.getLogger(__name__)

DT = 'DT'
DT_NS = 'DTns'
RF = 'RF'
RF_NS = 'RFns'

LEARNER_CHOICES = (
    (DT, 'Decision Tree'),
    (DT_NS, 'Decision Tree without the sensitive attribute'),
    (RF, 'Random Forest'),
    (RF_NS, 'Random Forest without the sensitive attribute'),
)
LEARNERS = tuple(choice for choice, _ in LEARNER_CHOICES)


@dataclass(frozen=True)
class LearnerSpec:
    name: str
    max_depth: int = 30
    min_instances_per_node: int = 1
    n_trees: int = 10
    bootstrap: bool = True

    def __post_init__(self):
        if self.name not in LEARNERS:
            raise ValidationError(f"Unknown learner {self.name}", code='invalid_learner')

    @property
    def is_forest(self) -> bool:
        return self.name in (RF, RF_NS)

    @property
    def drops_sensitive(self) -> bool:
        return self.name in (DT_NS, RF_NS)


def prepare_inputs(spec: LearnerSpec, encoded: EncodedDataset) -> EncodedDataset:
    """The feature view a learner sees; ns learners never see the sensitive columns"""
    if spec.drops_sensitive and encoded.sensitive_included:
        return remove_sensitive(encoded)
    return encoded


def fit_learner(spec: LearnerSpec, training: EncodedDataset, seed: int) -> FittedModel:
    training = prepare_inputs(spec, training)
    tree_config = TreeConfig(max_depth=spec.max_depth, min_instances_per_node=spec.min_instances_per_node, seed=seed)
    cardinalities = training.cardinalities()
    if spec.is_forest:
        config = ForestConfig(tree_config=tree_config, n_trees=spec.n_trees, bootstrap=spec.bootstrap)
        return fit_forest(training.features, training.labels, config, cardinalities, training.column_names())
    return fit_tree(training.features, training.labels, tree_config, cardinalities, training.column_names())


def predict_learner(spec: LearnerSpec, model: FittedModel, rows: EncodedDataset):
    return predict(model, prepare_inputs(spec, rows).features)
