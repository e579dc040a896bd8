"""
Synthetic UCI-format files for tests that cannot rely on the real downloads
"""
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from .loaders import ADULT_VOCABULARIES, GERMAN_VOCABULARIES

# (label code, age group) -> rows; sized so the pinned German training cells fit
GERMAN_CELL_SIZES: Dict[Tuple[str, str], int] = {
    ('1', 'aged'): 610,
    ('1', 'young'): 90,
    ('2', 'aged'): 240,
    ('2', 'young'): 60,
}


def german_lines(seed: int = 0, cell_sizes: Dict[Tuple[str, str], int] = None) -> List[str]:
    """Space-separated german.data rows; 1000 rows by default"""
    rng = np.random.default_rng(seed)
    cell_sizes = cell_sizes or GERMAN_CELL_SIZES

    def pick(name: str) -> str:
        vocabulary = GERMAN_VOCABULARIES[name]
        return vocabulary[int(rng.integers(len(vocabulary)))]

    lines = []
    for (label, group), size in cell_sizes.items():
        for _ in range(size):
            age = int(rng.integers(25, 76)) if group == 'aged' else int(rng.integers(19, 25))
            # favourable rows lean towards a positive checking status so models have signal
            status = 'A14' if label == '1' and rng.random() < 0.6 else pick('status')
            fields = [
                status, str(int(rng.integers(4, 73))), pick('credit-history'), pick('purpose'),
                str(int(rng.integers(250, 18425))), pick('savings'), pick('employment-since'),
                str(int(rng.integers(1, 5))), pick('personal-status-sex'), pick('other-debtors'),
                str(int(rng.integers(1, 5))), pick('property'), str(age), pick('other-installment-plans'),
                pick('housing'), str(int(rng.integers(1, 5))), pick('job'), str(int(rng.integers(1, 3))),
                pick('telephone'), pick('foreign-worker'), label,
            ]
            lines.append(' '.join(fields))
    order = rng.permutation(len(lines))
    return [lines[i] for i in order]


def adult_lines(n: int = 400, seed: int = 0, test_file: bool = False) -> List[str]:
    """Comma-separated adult.data rows (or adult.test rows with the header line and trailing dots)"""
    rng = np.random.default_rng(seed)

    def pick(name: str) -> str:
        vocabulary = ADULT_VOCABULARIES[name]
        # the first categories dominate so pooling has both frequent and rare values
        weights = np.array([8.0] * min(3, len(vocabulary)) + [1.0] * max(0, len(vocabulary) - 3))
        return vocabulary[int(rng.choice(len(vocabulary), p=weights / weights.sum()))]

    lines = ['|1x3 Cross validator'] if test_file else []
    for _ in range(n):
        sex = 'Male' if rng.random() < 0.67 else 'Female'
        rich = rng.random() < (0.31 if sex == 'Male' else 0.11)
        income = '>50K' if rich else '<=50K'
        workclass = '?' if rng.random() < 0.05 else pick('workclass')
        occupation = '?' if workclass == '?' else pick('occupation')
        country = '?' if rng.random() < 0.02 else pick('native-country')
        fields = [
            str(int(rng.integers(17, 91))), workclass, str(int(rng.integers(12285, 1484705))), pick('education'),
            str(int(rng.integers(1, 17))), pick('marital-status'), occupation, pick('relationship'), pick('race'),
            sex, str(int(rng.choice([0, 0, 0, 2174, 14084]))), str(int(rng.choice([0, 0, 0, 1902]))),
            str(int(rng.integers(1, 100))), country, income + ('.' if test_file else ''),
        ]
        lines.append(', '.join(fields))
    return lines


def write_data_dir(directory: Union[str, Path], seed: int = 0, adult_rows: int = 400) -> Path:
    """Populate directory with adult.data, adult.test and german.data"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / 'adult.data').write_text('\n'.join(adult_lines(adult_rows, seed)) + '\n\n')
    (directory / 'adult.test').write_text('\n'.join(adult_lines(adult_rows // 4, seed + 1, test_file=True)) + '\n')
    (directory / 'german.data').write_text('\n'.join(german_lines(seed)) + '\n')
    return directory
