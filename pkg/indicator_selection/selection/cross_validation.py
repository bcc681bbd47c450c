"""
K-fold cross-validation over the uniform regressor contract.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.model_selection import KFold

from indicator_selection.core.windowing import WindowedDataset
from indicator_selection.evaluation.metrics import score
from indicator_selection.exceptions import InsufficientSamplesError, SchemaError
from indicator_selection.models.base import fit
from indicator_selection.models.config import RegressorConfig

Fold = Tuple[np.ndarray, np.ndarray]


class FitCounter:
    """Running total of model fits."""

    def __init__(self):
        self.count = 0

    def add(self, n: int) -> None:
        self.count += n


def kfold_splits(m: int, folds: int, shuffle: bool = False, seed: Optional[int] = None) -> List[Fold]:
    """
    Train/test row indices for each fold.

    Without shuffling the folds are contiguous near-equal blocks in row order.

    Raises:
        InsufficientSamplesError: m < folds
    """
    if folds < 2:
        raise SchemaError(f"cross-validation needs at least 2 folds, got {folds}")
    if m < folds:
        raise InsufficientSamplesError(f"{m} samples cannot fill {folds} folds")
    splitter = KFold(n_splits=folds, shuffle=shuffle, random_state=seed if shuffle else None)
    return list(splitter.split(np.arange(m)))


def fold_scores(
    X: np.ndarray,
    y: np.ndarray,
    regressor: RegressorConfig,
    metric: str,
    splits: Sequence[Fold],
) -> np.ndarray:
    """Score of each held-out fold (model trained on the other folds)."""
    scores = np.empty(len(splits))
    for k, (train, test) in enumerate(splits):
        model = fit(regressor, X[train], y[train])
        scores[k] = score(metric, y[test], model.predict(X[test]))
    return scores


def cross_val_score(
    dataset: WindowedDataset,
    regressor: RegressorConfig,
    metric: str,
    folds: int = 5,
    seed: Optional[int] = None,
    shuffle: bool = False,
    columns: Optional[Sequence[int]] = None,
    counter: Optional[FitCounter] = None,
) -> float:
    """
    Mean held-out score over ``folds`` folds.

    Args:
        dataset: Windowed samples
        regressor: Estimator configuration
        metric: One of r2, mse, rmse, mae, mape
        folds: Fold count
        seed: Fold shuffling seed (used only with ``shuffle``)
        shuffle: Shuffle rows before cutting folds
        columns: Restrict X to these column indices
        counter: Incremented by the number of fits performed

    Raises:
        InsufficientSamplesError: fewer samples than folds
    """
    X = dataset.X if columns is None else dataset.X[:, list(columns)]
    splits = kfold_splits(dataset.n_samples, folds, shuffle=shuffle, seed=seed)
    scores = fold_scores(X, dataset.y, regressor, metric, splits)
    if counter is not None:
        counter.add(len(splits))
    return float(np.mean(scores))
