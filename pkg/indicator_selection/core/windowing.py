"""
Sliding-window supervised datasets.

Row i of a WindowedDataset flattens the k indicator columns over days
i..i+w-1, indicator-major with lag ascending (``sma@0, sma@1, sma@2,
rsi@0, ...``; lag 0 is the most recent day). The target of row i is the
close on day i+w-1+h.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view
from sklearn.model_selection import train_test_split as sk_train_test_split

from indicator_selection.data.series import FeatureFrame
from indicator_selection.exceptions import (
    GroupReferenceError,
    InsufficientHistoryError,
    InsufficientSamplesError,
    SchemaError,
)
from indicator_selection.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class WindowSpec:
    """Window size ``w`` and target horizon ``h`` in days."""

    w: int = 3
    h: int = 3

    def __post_init__(self):
        if int(self.w) != self.w or self.w < 1:
            raise SchemaError(f"window size must be an integer >= 1, got {self.w}")
        if int(self.h) != self.h or self.h < 1:
            raise SchemaError(f"horizon must be an integer >= 1, got {self.h}")

    def n_samples(self, n: int) -> int:
        return n - self.w - self.h + 1


def feature_name(column: str, lag: int) -> str:
    return f"{column}@{lag}"


@dataclass(frozen=True)
class WindowedDataset:
    """
    Flattened design matrix with its targets.

    Attributes:
        X: (m, k*w) features
        y: (m,) targets
        feature_names: ``column@lag`` per X column
        sample_dates: last in-window date per row
        target_dates: date the target close is read from
        groups: feature name -> selectable group
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: Tuple[str, ...]
    sample_dates: pd.DatetimeIndex
    target_dates: pd.DatetimeIndex
    groups: Mapping[str, str] = field(default_factory=dict)
    window: Optional[WindowSpec] = None

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.ndim != 1 or self.X.shape[0] != self.y.shape[0]:
            raise SchemaError(f"X {self.X.shape} and y {self.y.shape} do not align")
        if len(self.feature_names) != self.X.shape[1]:
            raise SchemaError("feature_names must name every column of X")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise SchemaError("feature names must be unique")
        if len(self.sample_dates) != self.X.shape[0] or len(self.target_dates) != self.X.shape[0]:
            raise SchemaError("sample and target dates must have one entry per row")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def group_of(self, name: str) -> str:
        return self.groups.get(name, name.split("@", 1)[0])

    @property
    def group_names(self) -> List[str]:
        """Selectable groups in first-column order."""
        seen: Dict[str, None] = {}
        for name in self.feature_names:
            seen.setdefault(self.group_of(name), None)
        return list(seen)

    def group_columns(self) -> Dict[str, List[int]]:
        """Group -> X column indices, groups in first-column order."""
        columns: Dict[str, List[int]] = {}
        for index, name in enumerate(self.feature_names):
            columns.setdefault(self.group_of(name), []).append(index)
        return columns

    def by_column(self) -> "WindowedDataset":
        """Every indicator output column becomes its own group."""
        groups = {name: name.split("@", 1)[0] for name in self.feature_names}
        return replace(self, groups=groups)

    def select_groups(self, groups: Sequence[str]) -> "WindowedDataset":
        """Keep the named groups' columns in their original X order."""
        index = self.group_columns()
        unknown = [g for g in groups if g not in index]
        if unknown:
            raise GroupReferenceError(f"unknown feature groups: {unknown}")
        keep = sorted(i for g in set(groups) for i in index[g])
        return self.select_columns(keep)

    def select_features(self, names: Sequence[str]) -> "WindowedDataset":
        """Keep the named ``column@lag`` features in the given order."""
        position = {name: i for i, name in enumerate(self.feature_names)}
        unknown = [n for n in names if n not in position]
        if unknown:
            raise GroupReferenceError(f"unknown features: {unknown[:5]}")
        return self.select_columns([position[n] for n in names])

    def select_columns(self, columns: Sequence[int]) -> "WindowedDataset":
        keep = list(columns)
        names = tuple(self.feature_names[i] for i in keep)
        return replace(
            self,
            X=self.X[:, keep],
            feature_names=names,
            groups={n: self.group_of(n) for n in names},
        )

    def take(self, rows: Union[Sequence[int], np.ndarray, slice]) -> "WindowedDataset":
        """Subset of rows (order preserved)."""
        return replace(
            self,
            X=self.X[rows],
            y=self.y[rows],
            sample_dates=self.sample_dates[rows],
            target_dates=self.target_dates[rows],
        )

    def with_arrays(self, X: Optional[np.ndarray] = None, y: Optional[np.ndarray] = None) -> "WindowedDataset":
        return replace(
            self,
            X=self.X if X is None else np.asarray(X, dtype=float),
            y=self.y if y is None else np.asarray(y, dtype=float),
        )

    def to_frame(self) -> pd.DataFrame:
        """Features as a DataFrame indexed by sample date."""
        return pd.DataFrame(self.X, index=self.sample_dates, columns=list(self.feature_names))

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write ``feature_names + target``, one row per sample."""
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(self.X, columns=list(self.feature_names))
        frame["target"] = self.y
        frame.to_csv(out, index=False, float_format="%.12g", lineterminator="\n")
        return out


def make_windows(frame: FeatureFrame, targets: pd.Series, spec: WindowSpec) -> WindowedDataset:
    """
    Flatten a complete FeatureFrame into w-day windows with h-day-ahead targets.

    Args:
        frame: Indicator values with no missing cells
        targets: Close series on (at least) the frame's dates
        spec: Window size and horizon

    Returns:
        Dataset with m = n - w - h + 1 rows and k*w columns

    Raises:
        InsufficientHistoryError: n < w + h
        SchemaError: missing values or targets not covering the frame's dates
    """
    n, k = frame.data.shape
    if n < spec.w + spec.h:
        raise InsufficientHistoryError(
            f"window w={spec.w}, h={spec.h} needs at least {spec.w + spec.h} rows, got {n}"
        )
    if k == 0:
        raise SchemaError("frame has no columns to window")

    values = frame.data.to_numpy(dtype=float)
    if np.isnan(values).any():
        raise SchemaError("frame has missing values; drop warm-up and impute before windowing")

    aligned = targets.reindex(frame.dates)
    if aligned.isna().any():
        raise SchemaError("targets must have a value on every frame date")
    close = aligned.to_numpy(dtype=float)

    m = spec.n_samples(n)
    # (n-w+1, k, w) with the last axis running oldest -> newest; flip so lag 0 comes first
    windows = sliding_window_view(values, spec.w, axis=0)[:m, :, ::-1]
    X = np.ascontiguousarray(windows.reshape(m, k * spec.w))

    last = np.arange(m) + spec.w - 1
    names = tuple(feature_name(c, lag) for c in frame.columns for lag in range(spec.w))
    groups = {
        feature_name(c, lag): frame.group_of(c) for c in frame.columns for lag in range(spec.w)
    }
    dataset = WindowedDataset(
        X=X,
        y=close[last + spec.h],
        feature_names=names,
        sample_dates=frame.dates[last],
        target_dates=frame.dates[last + spec.h],
        groups=groups,
        window=spec,
    )
    logger.debug("windows built", rows=m, features=X.shape[1], w=spec.w, h=spec.h)
    return dataset


def window_size_sweep(
    frame: FeatureFrame,
    targets: pd.Series,
    sizes: Sequence[int],
    horizon: int = 3,
) -> Dict[int, WindowedDataset]:
    """One dataset per window size, same horizon and targets."""
    return {int(w): make_windows(frame, targets, WindowSpec(w=int(w), h=horizon)) for w in sizes}


def train_test_split(
    dataset: WindowedDataset,
    train_fraction: float = 0.7,
    shuffle: bool = False,
    seed: Optional[int] = None,
) -> Tuple[WindowedDataset, WindowedDataset]:
    """
    Split rows into train and test parts.

    The default split is chronological: the first ``floor(m * fraction)``
    rows train. With ``shuffle`` the row sets are drawn with the seed and
    each part keeps chronological order.

    Raises:
        InsufficientSamplesError: fewer than two rows
    """
    train_rows, test_rows = split_rows(dataset.n_samples, train_fraction, shuffle, seed)
    return dataset.take(train_rows), dataset.take(test_rows)


def split_rows(
    m: int,
    train_fraction: float = 0.7,
    shuffle: bool = False,
    seed: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Row indices of the train and test parts (see ``train_test_split``)."""
    if not 0.0 < train_fraction < 1.0:
        raise SchemaError(f"train fraction must be in (0, 1), got {train_fraction}")
    if m < 2:
        raise InsufficientSamplesError(f"need at least 2 samples to split, got {m}")

    n_train = min(max(int(np.floor(m * train_fraction)), 1), m - 1)
    rows = np.arange(m)
    if not shuffle:
        return rows[:n_train], rows[n_train:]
    train_rows, test_rows = sk_train_test_split(rows, train_size=n_train, shuffle=True, random_state=seed)
    return np.sort(train_rows), np.sort(test_rows)
