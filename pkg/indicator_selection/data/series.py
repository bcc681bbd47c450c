"""
Dated containers shared by ingest, indicators and windowing.

PriceSeries holds the raw OHLCV bars, FeatureFrame holds named indicator
columns on the same kind of date axis. Both wrap a pandas DataFrame indexed
by a strictly increasing DatetimeIndex; operations return new instances.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from indicator_selection.exceptions import (
    EmptyInputError,
    GroupReferenceError,
    InvalidPriceError,
    OrderingError,
    SchemaError,
)

PRICE_COLUMNS = ("open", "high", "low", "close", "adj_close", "volume")
DateLike = Union[str, pd.Timestamp, None]


def _check_dates(index: pd.Index) -> None:
    if not isinstance(index, pd.DatetimeIndex):
        raise SchemaError("index must be a DatetimeIndex of calendar dates")
    if len(index) > 1 and not (index[1:] > index[:-1]).all():
        raise OrderingError("dates must be strictly increasing")


def _slice(data: pd.DataFrame, start: DateLike, end: DateLike) -> pd.DataFrame:
    mask = np.ones(len(data), dtype=bool)
    if start is not None:
        mask &= data.index >= pd.Timestamp(start)
    if end is not None:
        mask &= data.index <= pd.Timestamp(end)
    return data.loc[mask]


@dataclass(frozen=True)
class PriceSeries:
    """Daily OHLCV bars. Missing cells are NaN until imputed."""

    data: pd.DataFrame

    def __post_init__(self):
        frame = self.data
        if list(frame.columns) != list(PRICE_COLUMNS):
            raise SchemaError(
                f"price columns must be {list(PRICE_COLUMNS)}, got {list(frame.columns)}"
            )
        if len(frame) == 0:
            raise EmptyInputError("price series has no rows")
        _check_dates(frame.index)

        high = frame["high"].to_numpy()
        low = frame["low"].to_numpy()
        both = ~(np.isnan(high) | np.isnan(low))
        if np.any(high[both] < low[both]):
            bad = frame.index[both][high[both] < low[both]][0]
            raise InvalidPriceError(f"high < low on {bad.date()}")
        volume = frame["volume"].to_numpy()
        if np.any(volume[~np.isnan(volume)] < 0):
            raise InvalidPriceError("volume must be non-negative")

    def __len__(self) -> int:
        return len(self.data)

    @property
    def dates(self) -> pd.DatetimeIndex:
        return self.data.index

    @property
    def open(self) -> pd.Series:
        return self.data["open"]

    @property
    def high(self) -> pd.Series:
        return self.data["high"]

    @property
    def low(self) -> pd.Series:
        return self.data["low"]

    @property
    def close(self) -> pd.Series:
        return self.data["close"]

    @property
    def adj_close(self) -> pd.Series:
        return self.data["adj_close"]

    @property
    def volume(self) -> pd.Series:
        return self.data["volume"]

    def with_data(self, data: pd.DataFrame) -> "PriceSeries":
        return PriceSeries(data)

    def head(self, n: int) -> "PriceSeries":
        """First ``n`` bars."""
        return PriceSeries(self.data.iloc[:n].copy())

    def slice(self, start: DateLike = None, end: DateLike = None) -> "PriceSeries":
        """Bars with start <= date <= end (either bound optional)."""
        return PriceSeries(_slice(self.data, start, end).copy())

    @classmethod
    def from_arrays(
        cls,
        dates: Sequence,
        open: Sequence[float],
        high: Sequence[float],
        low: Sequence[float],
        close: Sequence[float],
        adj_close: Optional[Sequence[float]] = None,
        volume: Optional[Sequence[float]] = None,
    ) -> "PriceSeries":
        """Build a series from parallel arrays (adj_close defaults to close)."""
        index = pd.DatetimeIndex(pd.to_datetime(list(dates)), name="date")
        frame = pd.DataFrame(
            {
                "open": np.asarray(open, dtype=float),
                "high": np.asarray(high, dtype=float),
                "low": np.asarray(low, dtype=float),
                "close": np.asarray(close, dtype=float),
                "adj_close": np.asarray(close if adj_close is None else adj_close, dtype=float),
                "volume": np.asarray(
                    np.zeros(len(index)) if volume is None else volume, dtype=float
                ),
            },
            index=index,
        )
        return cls(frame)

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write the bars back in the external CSV layout."""
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        frame = self.data.rename(
            columns={
                "open": "Open",
                "high": "High",
                "low": "Low",
                "close": "Close",
                "adj_close": "Adj Close",
                "volume": "Volume",
            }
        )
        frame.index = frame.index.strftime("%Y-%m-%d")
        frame.index.name = "Date"
        frame.to_csv(out, float_format="%.10g", lineterminator="\n")
        return out


@dataclass(frozen=True)
class FeatureFrame:
    """
    Named indicator columns on a date axis.

    ``groups`` maps a column to the indicator group it belongs to; columns
    without an entry form their own group. Warm-up rows are NaN.
    """

    data: pd.DataFrame
    groups: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        columns = list(self.data.columns)
        if len(set(columns)) != len(columns):
            dupes = sorted({c for c in columns if columns.count(c) > 1})
            raise SchemaError(f"duplicate feature columns: {dupes}")
        _check_dates(self.data.index)

    def __len__(self) -> int:
        return len(self.data)

    @property
    def dates(self) -> pd.DatetimeIndex:
        return self.data.index

    @property
    def columns(self) -> List[str]:
        return list(self.data.columns)

    def group_of(self, column: str) -> str:
        return self.groups.get(column, column)

    @property
    def group_names(self) -> List[str]:
        """Indicator groups in first-column order."""
        seen: Dict[str, None] = {}
        for column in self.data.columns:
            seen.setdefault(self.group_of(column), None)
        return list(seen)

    def columns_of(self, group: str) -> List[str]:
        return [c for c in self.data.columns if self.group_of(c) == group]

    def with_data(self, data: pd.DataFrame) -> "FeatureFrame":
        groups = {c: g for c, g in self.groups.items() if c in data.columns}
        return FeatureFrame(data, groups)

    def select_groups(self, groups: Sequence[str]) -> "FeatureFrame":
        """Keep only the columns of the named groups, in frame order."""
        known = set(self.group_names)
        unknown = [g for g in groups if g not in known]
        if unknown:
            raise GroupReferenceError(f"unknown indicator groups: {unknown}")
        wanted = set(groups)
        keep = [c for c in self.data.columns if self.group_of(c) in wanted]
        return self.with_data(self.data[keep].copy())

    def slice(self, start: DateLike = None, end: DateLike = None) -> "FeatureFrame":
        return self.with_data(_slice(self.data, start, end).copy())

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write the frame with ``Date`` as first column."""
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        frame = self.data.copy()
        frame.index = frame.index.strftime("%Y-%m-%d")
        frame.index.name = "Date"
        frame.to_csv(out, float_format="%.12g", lineterminator="\n")
        return out

    @classmethod
    def read_csv(cls, path: Union[str, Path]) -> "FeatureFrame":
        frame = pd.read_csv(path)
        if "Date" not in frame.columns:
            raise SchemaError(f"{path}: first column must be Date")
        frame.index = pd.DatetimeIndex(pd.to_datetime(frame.pop("Date"), format="%Y-%m-%d"), name="date")
        return cls(frame.astype(float))
