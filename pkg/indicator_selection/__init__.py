"""
Indicator Selection

Technical-indicator feature selection for stock price regression: indicator
computation from daily OHLCV bars, w-day windowed datasets, SFS/SBS wrapper
selection over ten regressor families and a two-phase evaluation protocol.
"""

__version__ = "1.0.0"
__author__ = "Indicator Selection Team"

from indicator_selection.config.manager import ConfigManager
from indicator_selection.config.models import ExperimentConfig, load_experiment_config
from indicator_selection.core.experiment import ExperimentRunner, run_experiment

__all__ = [
    "ConfigManager",
    "ExperimentConfig",
    "ExperimentRunner",
    "load_experiment_config",
    "run_experiment",
]
