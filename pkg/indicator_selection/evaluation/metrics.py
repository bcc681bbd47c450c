"""
Regression error metrics: R², MSE, RMSE, MAE and MAPE.
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np
from sklearn.metrics import mean_absolute_error, mean_squared_error, r2_score

from indicator_selection.exceptions import ConfigError, EmptyInputError, NumericInputError, ShapeError

METRIC_NAMES = ("r2", "mse", "rmse", "mae", "mape")
ERROR_METRICS = ("mse", "rmse", "mae", "mape")

# |y| below this is excluded from MAPE
MAPE_EPSILON = 1e-12


@dataclass(frozen=True)
class MetricReport:
    """
    The five metrics on one (y, yhat) pair.

    ``mape`` is None when every target is below the MAPE threshold;
    ``mape_skipped`` counts the excluded entries.
    """

    r2: float
    mse: float
    rmse: float
    mae: float
    mape: Optional[float]
    n: int
    mape_skipped: int = 0

    def get(self, name: str) -> float:
        value = getattr(self, canonical_metric(name))
        return float("nan") if value is None else float(value)

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def canonical_metric(name: str) -> str:
    key = str(name).strip().lower()
    if key not in METRIC_NAMES:
        raise ConfigError(f"unknown metric '{name}', expected one of {list(METRIC_NAMES)}")
    return key


def higher_is_better(name: str) -> bool:
    return canonical_metric(name) == "r2"


def is_better(candidate: float, incumbent: Optional[float], name: str) -> bool:
    """Strict improvement; NaN never wins and anything beats a missing incumbent."""
    if candidate is None or math.isnan(candidate):
        return False
    if incumbent is None or math.isnan(incumbent):
        return True
    return candidate > incumbent if higher_is_better(name) else candidate < incumbent


def _vectors(y_true: Any, y_pred: Any):
    y = np.asarray(y_true, dtype=float).ravel()
    yhat = np.asarray(y_pred, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise ShapeError(f"y has {y.size} entries, yhat has {yhat.size}")
    if y.size == 0:
        raise EmptyInputError("cannot score empty vectors")
    if not (np.isfinite(y).all() and np.isfinite(yhat).all()):
        raise NumericInputError("metrics need finite values")
    return y, yhat


def mape(y_true: Any, y_pred: Any):
    """Return (MAPE in percent or None, skipped count)."""
    y, yhat = _vectors(y_true, y_pred)
    keep = np.abs(y) >= MAPE_EPSILON
    skipped = int((~keep).sum())
    if not keep.any():
        return None, skipped
    return float(100.0 * np.mean(np.abs((y[keep] - yhat[keep]) / y[keep]))), skipped


def metrics(y_true: Any, y_pred: Any) -> MetricReport:
    """
    Compute all five metrics.

    R² is the coefficient of determination 1 - SS_res / SS_tot; a constant
    target gives 1.0 for a perfect fit and 0.0 otherwise.

    Raises:
        ShapeError: lengths differ
        EmptyInputError: no entries
        NumericInputError: non-finite entries
    """
    y, yhat = _vectors(y_true, y_pred)
    mse = float(mean_squared_error(y, yhat))
    mape_value, skipped = mape(y, yhat)
    r2 = float(r2_score(y, yhat)) if y.size > 1 else float("nan")
    return MetricReport(
        r2=r2,
        mse=mse,
        rmse=math.sqrt(mse),
        mae=float(mean_absolute_error(y, yhat)),
        mape=mape_value,
        n=int(y.size),
        mape_skipped=skipped,
    )


def score(name: str, y_true: Any, y_pred: Any) -> float:
    """A single metric; undefined values come back as NaN."""
    return metrics(y_true, y_pred).get(name)


def improvement(baseline: float, selected: float, name: str) -> Optional[float]:
    """
    Percentage improvement of ``selected`` over ``baseline``.

    Error metrics: 100 * (baseline - selected) / baseline.
    R²: 100 * (selected - baseline) / |baseline|.
    None when the baseline is zero or either value is undefined.
    """
    if baseline is None or selected is None or math.isnan(baseline) or math.isnan(selected) or baseline == 0:
        return None
    if higher_is_better(name):
        return 100.0 * (selected - baseline) / abs(baseline)
    return 100.0 * (baseline - selected) / baseline
