"""
Tree ensembles: AdaBoost.R2, gradient boosting and random forest.
"""

from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, RegressorMixin

from indicator_selection.models.tree import CARTRegressor


def weighted_median(predictions: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Per-row weighted median of a (rows, estimators) matrix."""
    order = np.argsort(predictions, axis=1, kind="stable")
    cumulative = np.cumsum(weights[order], axis=1)
    half = 0.5 * cumulative[:, -1:]
    pick = np.argmax(cumulative >= half, axis=1)
    rows = np.arange(predictions.shape[0])
    return predictions[rows, order[rows, pick]]


class AdaBoostR2Regressor(BaseEstimator, RegressorMixin):
    """
    AdaBoost.R2 over depth-limited CART learners.

    Learners are fitted on the full sample with the current sample weights;
    boosting stops early on a perfect fit or when the weighted loss
    reaches 0.5.
    """

    n_iter_ = 1
    converged_ = True

    def __init__(self, n_estimators: int = 2000, learning_rate: float = 0.1, loss: str = "square",
                 max_depth: int = 3, random_state: Optional[int] = None):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.loss = loss
        self.max_depth = max_depth
        self.random_state = random_state

    def _relative_loss(self, error: np.ndarray) -> np.ndarray:
        if self.loss == "square":
            return error ** 2
        if self.loss == "exponential":
            return 1.0 - np.exp(-error)
        return error

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight=None) -> "AdaBoostR2Regressor":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        weights = np.full(len(y), 1.0 / len(y))
        self.estimators_: List[CARTRegressor] = []
        estimator_weights: List[float] = []

        for _ in range(self.n_estimators):
            tree = CARTRegressor(max_depth=self.max_depth, random_state=self.random_state)
            tree.fit(X, y, sample_weight=weights)
            error = np.abs(y - tree.predict(X))
            largest = error.max()
            if largest <= 0.0:
                self.estimators_.append(tree)
                estimator_weights.append(1.0)
                break
            loss = self._relative_loss(error / largest)
            average = float(weights @ loss)
            if average >= 0.5:
                if not self.estimators_:
                    self.estimators_.append(tree)
                    estimator_weights.append(1.0)
                break
            beta = average / (1.0 - average)
            self.estimators_.append(tree)
            if beta <= 0.0:
                estimator_weights.append(1.0)
                break
            estimator_weights.append(self.learning_rate * np.log(1.0 / beta))
            weights = weights * np.power(beta, (1.0 - loss) * self.learning_rate)
            weights /= weights.sum()

        self.estimator_weights_ = np.asarray(estimator_weights)
        self.n_iter_ = len(self.estimators_)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        predictions = np.column_stack([tree.predict(X) for tree in self.estimators_])
        return weighted_median(predictions, self.estimator_weights_)


class GradientBoostingRegressor(BaseEstimator, RegressorMixin):
    """
    Stagewise boosting on squared error starting from the mean.

    ``n_estimators=0`` leaves the constant model F0 = mean(y).
    """

    n_iter_ = 1
    converged_ = True

    def __init__(self, n_estimators: int = 2000, learning_rate: float = 0.1, max_depth: Optional[int] = 3,
                 max_leaf_nodes: Optional[int] = 30, subsample: float = 1.0,
                 random_state: Optional[int] = None):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.max_leaf_nodes = max_leaf_nodes
        self.subsample = subsample
        self.random_state = random_state

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight=None) -> "GradientBoostingRegressor":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        rng = np.random.default_rng(self.random_state)
        m = len(y)
        self.init_ = float(y.mean())
        current = np.full(m, self.init_)
        self.estimators_: List[CARTRegressor] = []
        n_sub = max(1, int(round(self.subsample * m)))

        for _ in range(self.n_estimators):
            rows = np.sort(rng.choice(m, size=n_sub, replace=False)) if n_sub < m else slice(None)
            tree = CARTRegressor(max_depth=self.max_depth, max_leaf_nodes=self.max_leaf_nodes)
            tree.fit(X[rows], (y - current)[rows])
            current = current + self.learning_rate * tree.predict(X)
            self.estimators_.append(tree)

        self.n_iter_ = len(self.estimators_)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.full(X.shape[0], self.init_)
        for tree in self.estimators_:
            out += self.learning_rate * tree.predict(X)
        return out


def _grow_tree(X: np.ndarray, y: np.ndarray, seed: int, bootstrap: bool, params: dict) -> CARTRegressor:
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, len(y), len(y)) if bootstrap else slice(None)
    tree = CARTRegressor(random_state=int(rng.integers(0, 2**31 - 1)), **params)
    return tree.fit(X[rows], y[rows])


class RandomForestRegressor(BaseEstimator, RegressorMixin):
    """
    Bagged CART with per-split feature subsampling.

    Tree i draws its bootstrap rows and feature subsets from seed + i;
    ``max_features`` is clamped to the feature count.
    """

    n_iter_ = 1
    converged_ = True

    def __init__(self, n_estimators: int = 1000, max_features: Optional[int] = 20, bootstrap: bool = True,
                 max_depth: Optional[int] = None, min_samples_leaf: int = 1, min_samples_split: int = 2,
                 n_jobs: int = 1, random_state: int = 0):
        self.n_estimators = n_estimators
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.min_samples_split = min_samples_split
        self.n_jobs = n_jobs
        self.random_state = random_state

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight=None) -> "RandomForestRegressor":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        d = X.shape[1]
        params = {
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "min_samples_split": self.min_samples_split,
            "max_features": None if self.max_features is None else min(self.max_features, d),
        }
        seed = int(self.random_state or 0)
        self.estimators_ = Parallel(n_jobs=self.n_jobs)(
            delayed(_grow_tree)(X, y, seed + i, self.bootstrap, params) for i in range(self.n_estimators)
        )
        self.n_iter_ = len(self.estimators_)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.mean([tree.predict(X) for tree in self.estimators_], axis=0)
