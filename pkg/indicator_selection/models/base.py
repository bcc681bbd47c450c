"""
Uniform fit/predict contract over the ten regressor families.
"""

import warnings
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator

from indicator_selection.exceptions import ConvergenceWarning, NumericInputError, ShapeError
from indicator_selection.models.config import RegressorConfig
from indicator_selection.models.ensemble import (
    AdaBoostR2Regressor,
    GradientBoostingRegressor,
    RandomForestRegressor,
)
from indicator_selection.models.linear import LassoRegression, LinearRegression, RidgeRegression
from indicator_selection.models.neighbors import KNNRegressor
from indicator_selection.models.neural import MLPRegressor
from indicator_selection.models.svm import SVRRegressor
from indicator_selection.models.tree import CARTRegressor
from indicator_selection.utils.logger import get_logger

logger = get_logger(__name__)

# record-only fields: squared error is the only criterion and KNN search is brute force
_RECORD_ONLY = {"GBR": {"criterion", "loss"}, "RFR": {"criterion"}, "KNN": {"leaf_size"}}


def _kwargs(config: RegressorConfig) -> Dict[str, Any]:
    skip = _RECORD_ONLY.get(config.family, set())
    return {k: v for k, v in config.resolved.model_dump().items() if k not in skip}


_BUILDERS: Dict[str, Callable[[RegressorConfig], BaseEstimator]] = {
    "LR": lambda c: LinearRegression(**_kwargs(c)),
    "Ridge": lambda c: RidgeRegression(**_kwargs(c)),
    "Lasso": lambda c: LassoRegression(**_kwargs(c)),
    "DTR": lambda c: CARTRegressor(random_state=c.seed, **_kwargs(c)),
    "KNN": lambda c: KNNRegressor(**_kwargs(c)),
    "MLP": lambda c: MLPRegressor(random_state=c.seed, **_kwargs(c)),
    "SVR": lambda c: SVRRegressor(**_kwargs(c)),
    "ADA": lambda c: AdaBoostR2Regressor(random_state=c.seed, **_kwargs(c)),
    "GBR": lambda c: GradientBoostingRegressor(random_state=c.seed, **_kwargs(c)),
    "RFR": lambda c: RandomForestRegressor(random_state=c.seed, **_kwargs(c)),
}


def build_estimator(config: RegressorConfig) -> BaseEstimator:
    """Unfitted estimator for a config."""
    return _BUILDERS[config.family](config)


def check_features(X: Any) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError(f"X must be 2-dimensional, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise NumericInputError("X contains NaN or infinite values")
    return X


def check_training_data(X: Any, y: Any):
    X = check_features(X)
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or len(y) != X.shape[0]:
        raise ShapeError(f"y must be a vector of length {X.shape[0]}, got shape {y.shape}")
    if not np.isfinite(y).all():
        raise NumericInputError("y contains NaN or infinite values")
    if X.shape[0] < 2:
        raise ShapeError(f"need at least 2 samples to fit, got {X.shape[0]}")
    if X.shape[1] < 1:
        raise ShapeError("need at least 1 feature to fit")
    return X, y


@dataclass(frozen=True)
class RegressorModel:
    """
    A fitted estimator.

    Attributes:
        config: Configuration it was fitted with
        estimator: Learned state (treated as read-only)
        n_features: Training column count d
        n_iter: Iterations or members used by the solver
        converged: False when the solver hit its iteration budget
        feature_names: Training column names, when known
    """

    config: RegressorConfig
    estimator: BaseEstimator
    n_features: int
    n_iter: int
    converged: bool
    feature_names: Tuple[str, ...] = ()

    @property
    def family(self) -> str:
        return self.config.family

    def predict(self, X: Any) -> np.ndarray:
        return predict(self, X)


def fit(
    config: RegressorConfig, X: Any, y: Any, feature_names: Optional[Sequence[str]] = None
) -> RegressorModel:
    """
    Fit the configured family on (X, y).

    Raises:
        NumericInputError: non-finite entries
        ShapeError: fewer than 2 rows, no columns, y/X mismatch or wrong name count
    """
    X, y = check_training_data(X, y)
    names = tuple(feature_names or ())
    if names and len(names) != X.shape[1]:
        raise ShapeError(f"{len(names)} feature names for {X.shape[1]} columns")
    estimator = build_estimator(config).fit(X, y)
    converged = bool(getattr(estimator, "converged_", True))
    n_iter = int(getattr(estimator, "n_iter_", 1))
    if not converged:
        message = f"{config.family} stopped after {n_iter} iterations without converging"
        warnings.warn(message, ConvergenceWarning, stacklevel=2)
        logger.warning("solver did not converge", family=config.family, iterations=n_iter)
    return RegressorModel(
        config=config,
        estimator=estimator,
        n_features=X.shape[1],
        n_iter=n_iter,
        converged=converged,
        feature_names=names,
    )


def predict(model: RegressorModel, X: Any) -> np.ndarray:
    """
    Predict with a fitted model.

    Raises:
        ShapeError: column count differs from training
    """
    X = check_features(X)
    if X.shape[1] != model.n_features:
        raise ShapeError(f"model was fitted on {model.n_features} features, got {X.shape[1]}")
    return np.asarray(model.estimator.predict(X), dtype=float)
