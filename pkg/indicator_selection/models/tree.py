"""
CART regression tree with squared-error impurity.

Split search is vectorized per feature (sorted cumulative sums). Ties are
broken toward the lowest feature index, then the lowest threshold. Samples
with x <= threshold go left; thresholds sit midway between neighbouring
distinct values. With ``max_leaf_nodes`` the tree grows best-first.
"""

import heapq
from typing import List, Optional, Tuple

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

Split = Tuple[float, int, float]  # (child sse, feature, threshold)


class CARTRegressor(BaseEstimator, RegressorMixin):
    n_iter_ = 1
    converged_ = True

    def __init__(
        self,
        max_depth: Optional[int] = None,
        min_samples_leaf: int = 1,
        min_samples_split: int = 2,
        max_leaf_nodes: Optional[int] = None,
        max_features: Optional[int] = None,
        criterion: str = "squared_error",
        random_state: Optional[int] = None,
    ):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.min_samples_split = min_samples_split
        self.max_leaf_nodes = max_leaf_nodes
        self.max_features = max_features
        self.criterion = criterion
        self.random_state = random_state

    # -- growth -------------------------------------------------------------

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight: Optional[np.ndarray] = None) -> "CARTRegressor":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        self._rng = np.random.default_rng(self.random_state)
        self.n_features_in_ = X.shape[1]

        features: List[int] = []
        thresholds: List[float] = []
        left: List[int] = []
        right: List[int] = []
        values: List[float] = []
        counts: List[int] = []
        depths: List[int] = []

        def new_node(idx: np.ndarray, depth: int) -> int:
            features.append(-1)
            thresholds.append(np.nan)
            left.append(-1)
            right.append(-1)
            values.append(float(np.average(y[idx], weights=w[idx])))
            counts.append(len(idx))
            depths.append(depth)
            return len(features) - 1

        frontier: list = []

        def push(node: int, idx: np.ndarray, depth: int) -> None:
            if not self._splittable(y[idx], depth):
                return
            found = self._best_split(X, y, w, idx)
            if found is None:
                return
            parent_sse, (child_sse, feature, threshold) = found
            heapq.heappush(frontier, (-(parent_sse - child_sse), node, feature, threshold, depth, idx))

        root = np.arange(len(y))
        push(new_node(root, 0), root, 0)
        n_leaves = 1
        while frontier:
            if self.max_leaf_nodes is not None and n_leaves >= self.max_leaf_nodes:
                break
            _, node, feature, threshold, depth, idx = heapq.heappop(frontier)
            goes_left = X[idx, feature] <= threshold
            left_idx, right_idx = idx[goes_left], idx[~goes_left]
            features[node] = feature
            thresholds[node] = threshold
            left[node] = new_node(left_idx, depth + 1)
            right[node] = new_node(right_idx, depth + 1)
            n_leaves += 1
            push(left[node], left_idx, depth + 1)
            push(right[node], right_idx, depth + 1)

        self.feature_ = np.asarray(features, dtype=np.intp)
        self.threshold_ = np.asarray(thresholds, dtype=float)
        self.children_left_ = np.asarray(left, dtype=np.intp)
        self.children_right_ = np.asarray(right, dtype=np.intp)
        self.value_ = np.asarray(values, dtype=float)
        self.n_node_samples_ = np.asarray(counts, dtype=np.intp)
        self.n_leaves_ = n_leaves
        self.depth_ = max(depths)
        del self._rng
        return self

    def _splittable(self, y_node: np.ndarray, depth: int) -> bool:
        n = len(y_node)
        if n < self.min_samples_split or n < 2 * self.min_samples_leaf:
            return False
        if self.max_depth is not None and depth >= self.max_depth:
            return False
        return bool(np.ptp(y_node) > 0)

    def _candidate_features(self, d: int) -> np.ndarray:
        if self.max_features is None or self.max_features >= d:
            return np.arange(d)
        return np.sort(self._rng.choice(d, size=self.max_features, replace=False))

    def _best_split(self, X: np.ndarray, y: np.ndarray, w: np.ndarray, idx: np.ndarray):
        n = len(idx)
        wi = w[idx]
        total_w = wi.sum()
        # centre for numerical stability of the sum-of-squares identity
        yi = y[idx] - np.average(y[idx], weights=wi)
        total_wy = wi @ yi
        total_wy2 = wi @ (yi * yi)
        parent_sse = total_wy2 - total_wy ** 2 / total_w
        tol = 1e-12 * max(parent_sse, np.finfo(float).tiny)

        n_left = np.arange(1, n)
        size_ok = (n_left >= self.min_samples_leaf) & (n - n_left >= self.min_samples_leaf)

        # all candidate features at once: (n, F) sorted columns and cumulative sums
        features = self._candidate_features(X.shape[1])
        block = X[np.ix_(idx, features)]
        order = np.argsort(block, axis=0, kind="stable")
        xs = np.take_along_axis(block, order, axis=0)
        ws = wi[order]
        ys = yi[order]
        cw = np.cumsum(ws, axis=0)[:-1]
        cwy = np.cumsum(ws * ys, axis=0)[:-1]
        cwy2 = np.cumsum(ws * ys * ys, axis=0)[:-1]
        rw = total_w - cw
        with np.errstate(divide="ignore", invalid="ignore"):
            sse = (cwy2 - cwy ** 2 / cw) + ((total_wy2 - cwy2) - (total_wy - cwy) ** 2 / rw)
        valid = size_ok[:, None] & (xs[:-1] < xs[1:]) & np.isfinite(sse)
        sse = np.where(valid, sse, np.inf)

        lowest = sse.min()
        if not np.isfinite(lowest):
            return None
        near = sse <= lowest + tol
        column = int(np.flatnonzero(near.any(axis=0))[0])
        position = int(np.flatnonzero(near[:, column])[0])
        lo, hi = xs[position, column], xs[position + 1, column]
        threshold = (lo + hi) / 2.0
        if not lo <= threshold < hi:
            threshold = lo
        best: Split = (float(sse[position, column]), int(features[column]), float(threshold))
        return float(parent_sse), best

    # -- inference ----------------------------------------------------------

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row."""
        X = np.asarray(X, dtype=float)
        node = np.zeros(X.shape[0], dtype=np.intp)
        active = np.flatnonzero(self.feature_[node] >= 0)
        while active.size:
            current = node[active]
            goes_left = X[active, self.feature_[current]] <= self.threshold_[current]
            node[active] = np.where(goes_left, self.children_left_[current], self.children_right_[current])
            active = active[self.feature_[node[active]] >= 0]
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value_[self.apply(X)]
