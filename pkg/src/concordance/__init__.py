"""Concordance coefficient test for comparing k unrelated samples.

A Kendall-distance-based alternative to Kruskal-Wallis: the disorder of a
value-ordered label arrangement is the minimum number of pairwise swaps to
make every group consecutive, computed through the Linear Ordering Problem
on the pairwise preference matrix.  Exact null distributions come from
enumerating all distinct label arrangements; Monte Carlo sampling covers
the sizes for which enumeration is out of reach.
"""

from .coefficient import (
    DisorderResult,
    PentagonalParams,
    disorder,
    disorder_oracle,
    max_disorder,
    max_disorder_bruteforce,
    pentagonal,
    preference_matrix,
)
from .errors import (
    CapacityError,
    ConcordanceError,
    ConfigurationError,
    DegenerateStatisticError,
    InputDataError,
)
from .exact import (
    DEFAULT_BUDGET,
    CriticalValueRow,
    ExactDistribution,
    PValueResult,
    critical_values,
    enumerate_distribution,
    exact_kw_pvalue,
    exact_pvalue,
    load_or_enumerate,
)
from .groups import (
    Arrangement,
    GroupSizes,
    RankAssignment,
    arrangement_from_data,
    arrangements_iter,
    group_label_order,
    midranks,
)
from .ingest import IngestResult, ingest_csv, parse_pre_ranked
from .kendall import kendall_correlation, kendall_distance
from .kruskal import KwResult, kruskal_wallis, kw_attainable_max, tie_correction
from .lop import (
    LopSolution,
    PreferenceMatrix,
    lop_bruteforce,
    lop_exact_dp,
    order_values,
)
from .montecarlo import McDistribution, McEstimate, mc_distribution, mc_pvalue
from .report import TestOptions, TestReport, REPORT_SCHEMA, run_test, to_json_dict

__version__ = "0.1.0"

__all__ = [
    "Arrangement",
    "CapacityError",
    "ConcordanceError",
    "ConfigurationError",
    "CriticalValueRow",
    "DEFAULT_BUDGET",
    "DegenerateStatisticError",
    "DisorderResult",
    "ExactDistribution",
    "GroupSizes",
    "IngestResult",
    "InputDataError",
    "KwResult",
    "LopSolution",
    "McDistribution",
    "McEstimate",
    "PValueResult",
    "PentagonalParams",
    "PreferenceMatrix",
    "RankAssignment",
    "REPORT_SCHEMA",
    "TestOptions",
    "TestReport",
    "arrangement_from_data",
    "arrangements_iter",
    "critical_values",
    "disorder",
    "disorder_oracle",
    "enumerate_distribution",
    "exact_kw_pvalue",
    "exact_pvalue",
    "group_label_order",
    "ingest_csv",
    "kendall_correlation",
    "kendall_distance",
    "kruskal_wallis",
    "kw_attainable_max",
    "load_or_enumerate",
    "lop_bruteforce",
    "lop_exact_dp",
    "max_disorder",
    "max_disorder_bruteforce",
    "mc_distribution",
    "mc_pvalue",
    "midranks",
    "order_values",
    "parse_pre_ranked",
    "pentagonal",
    "preference_matrix",
    "run_test",
    "tie_correction",
    "to_json_dict",
]
