"""
Core pipeline components: windowing and the two-phase experiment.
"""

from indicator_selection.core.windowing import WindowedDataset, WindowSpec, make_windows, train_test_split

__all__ = ["WindowSpec", "WindowedDataset", "make_windows", "train_test_split"]
