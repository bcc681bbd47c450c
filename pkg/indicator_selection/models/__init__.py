"""
Regression estimators behind one fit/predict contract.
"""

from indicator_selection.models.base import RegressorModel, build_estimator, fit, predict
from indicator_selection.models.config import FAMILIES, RegressorConfig, default_params, make_regressor_config
from indicator_selection.models.persistence import load_model, save_model

__all__ = [
    "FAMILIES",
    "RegressorConfig",
    "RegressorModel",
    "build_estimator",
    "default_params",
    "fit",
    "load_model",
    "make_regressor_config",
    "predict",
    "save_model",
]
