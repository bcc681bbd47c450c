"""
Wrapper feature selection (SFS/SBS) scored by cross-validation.
"""

from indicator_selection.selection.census import top_indicator_census
from indicator_selection.selection.cross_validation import FitCounter, cross_val_score, kfold_splits
from indicator_selection.selection.results import (
    SelectionConfig,
    SelectionResult,
    SelectionStep,
    load_result,
    load_results,
    save_result,
)
from indicator_selection.selection.sequential import run_selection, sbs, sfs

__all__ = [
    "FitCounter",
    "SelectionConfig",
    "SelectionResult",
    "SelectionStep",
    "cross_val_score",
    "kfold_splits",
    "load_result",
    "load_results",
    "run_selection",
    "save_result",
    "sbs",
    "sfs",
    "top_indicator_census",
]
