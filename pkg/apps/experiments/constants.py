"""
Pinned dataset-level statistics of the reference training versions.

Bump CONSTANTS_VERSION whenever a value or tolerance changes; run manifests record it.
Counts are keyed pos_priv / pos_unpriv / neg_priv / neg_unpriv, matching
apps.sampling.strategies.cell_counts. Shares are fractions, not percentages.
"""
from dataclasses import dataclass
from typing import Dict

CONSTANTS_VERSION = '1'

# Absolute tolerances
CVS_TOLERANCE = 5e-5
DI_TOLERANCE = 5e-4
ADULT_NPI_TOLERANCE = 5e-4
GERMAN_NPI_TOLERANCE = 5e-5
SHARE_TOLERANCE = 1e-4


@dataclass(frozen=True)
class PinnedVersion:
    """Expected statistics of one encoded training version"""
    dataset: str
    encoding: str
    anchor: str
    counts: Dict[str, int]
    cvs: float
    npi: float
    di: float
    passes_80_rule: bool
    unprivileged_share: float
    favourable_share: float
    unprivileged_share_among_favourable: float
    npi_tolerance: float


ADULT_ONE_HOT = PinnedVersion(
    dataset='adult',
    encoding='one_hot',
    anchor='Adult training set, all 32,561 rows: "the CVS is 0.1963", "the DI is 35.80%"',
    counts={'pos_priv': 6662, 'pos_unpriv': 1179, 'neg_priv': 15128, 'neg_unpriv': 9592},
    cvs=0.1963,
    npi=4.35e-2,
    di=0.3580,
    passes_80_rule=False,
    unprivileged_share=0.3308,
    favourable_share=0.2408,
    unprivileged_share_among_favourable=0.1504,
    npi_tolerance=ADULT_NPI_TOLERANCE,
)

ADULT_INTEGER = PinnedVersion(
    dataset='adult',
    encoding='integer',
    anchor='Adult training set without rows holding missing values (30,162 rows)',
    counts={'pos_priv': 6396, 'pos_unpriv': 1112, 'neg_priv': 13984, 'neg_unpriv': 8670},
    cvs=0.2002,
    npi=4.36e-2,
    di=0.3622,
    passes_80_rule=False,
    unprivileged_share=0.3243,
    favourable_share=0.2489,
    unprivileged_share_among_favourable=0.1481,
    npi_tolerance=ADULT_NPI_TOLERANCE,
)

_GERMAN_COMMON = dict(
    anchor='German Credit 70% training split (700 rows): "the CVS is 0.1289", "the NPI is 9.47e-03"',
    counts={'pos_priv': 428, 'pos_unpriv': 62, 'neg_priv': 167, 'neg_unpriv': 43},
    cvs=0.1289,
    npi=9.47e-3,
    di=0.8209,
    passes_80_rule=True,
    unprivileged_share=0.1500,
    favourable_share=0.7000,
    unprivileged_share_among_favourable=0.1265,
    npi_tolerance=GERMAN_NPI_TOLERANCE,
)

GERMAN_INTEGER = PinnedVersion(dataset='german', encoding='integer', **_GERMAN_COMMON)
GERMAN_ONE_HOT = PinnedVersion(dataset='german', encoding='one_hot', **_GERMAN_COMMON)

PINNED_VERSIONS = (ADULT_ONE_HOT, ADULT_INTEGER, GERMAN_INTEGER, GERMAN_ONE_HOT)

# Multivariate undersampling of the German training split keeps 43 rows per cell.
GERMAN_MULTIVARIATE_ROWS = 172
