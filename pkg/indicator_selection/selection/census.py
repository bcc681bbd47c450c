"""
How often each indicator group appears in the best subsets of many runs.
"""

from typing import Sequence

import pandas as pd

from indicator_selection.selection.results import SelectionResult
from indicator_selection.utils.logger import get_logger

logger = get_logger(__name__)

CENSUS_COLUMNS = ["indicator", "catalogue_number", "count", "percentage"]


def top_indicator_census(results: Sequence[SelectionResult]) -> pd.DataFrame:
    """
    Percentage of results whose best subset contains each group.

    Every group seen in any result is listed, sorted by percentage
    (descending) then name.
    """
    if not results:
        logger.warning("census requested for no selection results")
        return pd.DataFrame(columns=CENSUS_COLUMNS)

    counts = {}
    numbers = {}
    for result in results:
        for group in list(result.groups) + list(result.best_subset):
            counts.setdefault(group, 0)
            numbers.setdefault(group, result.catalogue_numbers.get(group))
        for group in set(result.best_subset):
            counts[group] += 1

    table = pd.DataFrame(
        {
            "indicator": list(counts),
            "catalogue_number": pd.array([numbers[g] for g in counts], dtype="Int64"),
            "count": [counts[g] for g in counts],
        }
    )
    table["percentage"] = 100.0 * table["count"] / len(results)
    table = table.sort_values(["percentage", "indicator"], ascending=[False, True], kind="mergesort")
    return table.reset_index(drop=True)[CENSUS_COLUMNS]
