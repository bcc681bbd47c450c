"""
Error metrics and hyperparameter search.
"""

from indicator_selection.evaluation.metrics import (
    ERROR_METRICS,
    METRIC_NAMES,
    MetricReport,
    improvement,
    metrics,
    score,
)
from indicator_selection.evaluation.grid_search import GridSearchResult, grid_search

__all__ = [
    "ERROR_METRICS",
    "METRIC_NAMES",
    "GridSearchResult",
    "MetricReport",
    "grid_search",
    "improvement",
    "metrics",
    "score",
]
