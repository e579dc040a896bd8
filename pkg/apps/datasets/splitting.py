"""
Train/test splitting stratified over the joint (label, sensitive) cells
"""
from typing import Dict, List, Optional, Tuple
import logging
import math

import numpy as np
from django.core.exceptions import ValidationError

from .schema import Dataset, SplitPair

logger = logging.getLogger(__name__)

GERMAN_TRAIN_FRACTION = 0.70

# Reference training-set overview of German Credit (700 rows):
# good/aged 428, good/young 62, bad/aged 167, bad/young 43.
GERMAN_TRAINING_CELLS: Dict[Tuple[str, str], int] = {
    ('good', 'aged'): 428,
    ('good', 'young'): 62,
    ('bad', 'aged'): 167,
    ('bad', 'young'): 43,
}

Cell = Tuple[int, int]
CELL_ORDER: List[Cell] = [(0, 0), (0, 1), (1, 0), (1, 1)]


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def joint_cells(labels: np.ndarray, sensitive: np.ndarray) -> Dict[Cell, np.ndarray]:
    """Row positions of each (label, sensitive) cell, cells in canonical code order"""
    return {
        cell: np.flatnonzero((labels == cell[0]) & (sensitive == cell[1]))
        for cell in CELL_ORDER
    }


def largest_remainder(counts: List[int], total: int) -> List[int]:
    """Apportion total proportionally to counts; leftover units go to the largest remainders, ties by order"""
    n = sum(counts)
    if n == 0:
        return [0 for _ in counts]
    quotas = [count * total / n for count in counts]
    allocation = [int(math.floor(quota)) for quota in quotas]
    leftover = total - sum(allocation)
    order = sorted(range(len(counts)), key=lambda i: (-(quotas[i] - allocation[i]), i))
    for i in order[:leftover]:
        allocation[i] += 1
    return allocation


def _targets_by_code(dataset: Dataset, cell_targets: Dict[Tuple[str, str], int]) -> Dict[Cell, int]:
    schema = dataset.schema
    by_code = {}
    for (label_value, sensitive_value), count in cell_targets.items():
        if label_value not in schema.label_values or sensitive_value not in schema.sensitive_values:
            raise ValidationError(f"Unknown cell ({label_value}, {sensitive_value}) in split targets",
                                  code='invalid_targets')
        cell = (int(label_value == schema.favourable_label), int(sensitive_value != schema.unprivileged_value))
        by_code[cell] = int(count)
    return by_code


def stratified_split(
    dataset: Dataset,
    train_fraction: float,
    seed: int,
    cell_targets: Optional[Dict[Tuple[str, str], int]] = None,
) -> SplitPair:
    """
    Split so that every joint (label, sensitive) cell keeps its share in the training set.

    The training size is round(n * train_fraction); cells receive largest-remainder
    allocations of it. Explicit cell_targets (keyed by label and sensitive values)
    replace the proportional allocation. Rows inside a cell are drawn uniformly under seed.
    """
    if not 0 < train_fraction < 1:
        raise ValidationError(f"train_fraction must lie in (0, 1), got {train_fraction}", code='invalid_fraction')

    labels = dataset.label_vector()
    sensitive = dataset.sensitive_vector()
    cells = joint_cells(labels, sensitive)
    train_size = _round_half_up(len(dataset) * train_fraction)

    if cell_targets is None:
        allocation = dict(zip(CELL_ORDER, largest_remainder([len(cells[cell]) for cell in CELL_ORDER], train_size)))
    else:
        allocation = {cell: 0 for cell in CELL_ORDER}
        allocation.update(_targets_by_code(dataset, cell_targets))
        if sum(allocation.values()) != train_size:
            raise ValidationError(
                f"Split targets sum to {sum(allocation.values())}, expected {train_size} training rows",
                code='invalid_targets',
            )
        for cell, wanted in allocation.items():
            if wanted > len(cells[cell]):
                raise ValidationError(f"Cell {cell} holds {len(cells[cell])} rows, {wanted} requested",
                                      code='invalid_targets')

    rng = np.random.default_rng(seed)
    chosen = []
    for cell in CELL_ORDER:
        positions = rng.permutation(cells[cell])
        chosen.append(positions[:allocation[cell]])
    train_positions = np.sort(np.concatenate(chosen)) if chosen else np.array([], dtype=np.int64)
    test_mask = np.ones(len(dataset), dtype=bool)
    test_mask[train_positions] = False

    logger.info(
        f"Stratified split of {dataset.name} (seed={seed}): train={len(train_positions)}, "
        f"test={int(test_mask.sum())}, cells={[allocation[cell] for cell in CELL_ORDER]}"
    )
    return SplitPair(train=dataset.subset(train_positions), test=dataset.subset(np.flatnonzero(test_mask)))


def german_training_split(dataset: Dataset, seed: int) -> SplitPair:
    """70/30 split of German Credit pinned to the reference training-set cell counts"""
    return stratified_split(dataset, GERMAN_TRAIN_FRACTION, seed, cell_targets=GERMAN_TRAINING_CELLS)
