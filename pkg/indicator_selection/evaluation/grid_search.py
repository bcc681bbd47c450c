"""
Repeated K-fold grid search over regressor hyperparameters.
"""

from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from indicator_selection.evaluation.metrics import canonical_metric, is_better
from indicator_selection.exceptions import ConfigError, InsufficientSamplesError
from indicator_selection.models.config import make_regressor_config
from indicator_selection.selection.cross_validation import fold_scores, kfold_splits
from indicator_selection.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class GridSearchResult:
    """
    Attributes:
        family: Regressor family searched
        metric: Ranking metric
        candidates: Parameter dicts in grid order
        fold_scores: (candidates, K * repeats) matrix
        mean_scores: Row means of ``fold_scores``
        std_scores: Row population standard deviations
        best_index: Row of the winning candidate
    """

    family: str
    metric: str
    candidates: List[Dict[str, Any]]
    fold_scores: np.ndarray
    mean_scores: np.ndarray
    std_scores: np.ndarray
    best_index: int

    @property
    def best_params(self) -> Dict[str, Any]:
        return dict(self.candidates[self.best_index])

    @property
    def best_score(self) -> float:
        return float(self.mean_scores[self.best_index])

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for k, params in enumerate(self.candidates):
            row = {"candidate": k, "params": ";".join(f"{p}={params[p]}" for p in sorted(params))}
            row["mean"] = self.mean_scores[k]
            row["std"] = self.std_scores[k]
            row["best"] = k == self.best_index
            for j, value in enumerate(self.fold_scores[k]):
                row[f"fold_{j}"] = value
            rows.append(row)
        return pd.DataFrame(rows)

    def to_csv(self, path: Union[str, Path]) -> Path:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(out, index=False, float_format="%.12g", lineterminator="\n")
        return out


def grid_search(
    grid: Mapping[str, Sequence[Any]],
    family: str,
    X: np.ndarray,
    y: np.ndarray,
    K: int = 10,
    repeats: int = 3,
    metric: str = "mse",
    seed: int = 0,
    base_params: Optional[Mapping[str, Any]] = None,
    n_jobs: int = 1,
) -> GridSearchResult:
    """
    Score every grid point with ``repeats`` seeded, shuffled K-fold passes.

    Repeat r shuffles with seed + r, so all candidates see the same folds.
    Candidates follow the product of the grid in its key order, the last
    key varying fastest. The best mean wins; ties go to the first candidate.

    Raises:
        ConfigError: empty grid or invalid parameter values
        InsufficientSamplesError: fewer samples than K
    """
    metric = canonical_metric(metric)
    if not grid or any(len(values) == 0 for values in grid.values()):
        raise ConfigError("grid must name at least one parameter with at least one value")
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) < K:
        raise InsufficientSamplesError(f"{len(y)} samples cannot fill {K} folds")

    names = list(grid)
    candidates = [dict(zip(names, point)) for point in product(*(list(grid[name]) for name in names))]
    configs = [
        make_regressor_config(family, {**dict(base_params or {}), **point}, seed=seed) for point in candidates
    ]
    splits = [split for r in range(repeats) for split in kfold_splits(len(y), K, shuffle=True, seed=seed + r)]

    rows = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(fold_scores)(X, y, config, metric, splits) for config in configs
    )
    scores = np.vstack(rows)
    means = scores.mean(axis=1)
    stds = scores.std(axis=1)

    best = 0
    for k in range(1, len(candidates)):
        if is_better(float(means[k]), float(means[best]), metric):
            best = k

    result = GridSearchResult(
        family=configs[0].family,
        metric=metric,
        candidates=candidates,
        fold_scores=scores,
        mean_scores=means,
        std_scores=stds,
        best_index=best,
    )
    logger.info(
        "grid search finished",
        family=result.family,
        candidates=len(candidates),
        folds=scores.shape[1],
        best=result.best_params,
        score=result.best_score,
    )
    return result
