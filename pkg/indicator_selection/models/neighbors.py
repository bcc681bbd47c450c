"""
Brute-force k-nearest-neighbour regression.
"""

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, RegressorMixin

_METRICS = {"manhattan": "cityblock", "euclidean": "euclidean"}


class KNNRegressor(BaseEstimator, RegressorMixin):
    """
    Average of the k nearest training targets.

    Neighbours at equal distance are taken in training-row order. With
    distance weights, any neighbour at distance zero takes the whole vote:
    the prediction is the mean target of the zero-distance neighbours.
    """

    n_iter_ = 1
    converged_ = True

    def __init__(self, n_neighbors: int = 2, weights: str = "distance", metric: str = "manhattan"):
        self.n_neighbors = n_neighbors
        self.weights = weights
        self.metric = metric

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight=None) -> "KNNRegressor":
        self.X_ = np.array(X, dtype=float)
        self.y_ = np.array(y, dtype=float)
        return self

    def kneighbors(self, X: np.ndarray):
        """Return (distances, indices) of the k nearest training rows."""
        k = min(self.n_neighbors, len(self.y_))
        distances = cdist(np.asarray(X, dtype=float), self.X_, metric=_METRICS[self.metric])
        order = np.argsort(distances, axis=1, kind="stable")[:, :k]
        return np.take_along_axis(distances, order, axis=1), order

    def predict(self, X: np.ndarray) -> np.ndarray:
        distances, neighbors = self.kneighbors(X)
        targets = self.y_[neighbors]
        if self.weights == "uniform":
            return targets.mean(axis=1)

        exact = distances == 0.0
        with np.errstate(divide="ignore"):
            weights = np.where(exact.any(axis=1, keepdims=True), exact.astype(float), 1.0 / distances)
        return (weights * targets).sum(axis=1) / weights.sum(axis=1)
