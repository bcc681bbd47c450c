"""
Experiment configuration: layered loading and typed validation.
"""

from indicator_selection.config.manager import ConfigManager
from indicator_selection.config.models import ExperimentConfig, load_experiment_config

__all__ = ["ConfigManager", "ExperimentConfig", "load_experiment_config"]
