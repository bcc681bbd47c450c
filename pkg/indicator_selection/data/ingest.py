"""
OHLCV ingestion, mean imputation and Min-Max scaling.

All functions are pure: they never mutate their inputs.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple, TypeVar, Union

import numpy as np
import pandas as pd

from indicator_selection.data.series import PRICE_COLUMNS, FeatureFrame, PriceSeries
from indicator_selection.exceptions import (
    DegenerateColumnError,
    EmptyInputError,
    InputNotFoundError,
    OrderingError,
    SchemaError,
)
from indicator_selection.utils.logger import get_logger

logger = get_logger(__name__)

CSV_HEADER = ("Date", "Open", "High", "Low", "Close", "Adj Close", "Volume")

Dated = TypeVar("Dated", PriceSeries, FeatureFrame)
Frameish = Union[FeatureFrame, pd.DataFrame]


def load_ohlcv(path: Union[str, Path]) -> PriceSeries:
    """
    Load a daily OHLCV CSV.

    The header must be exactly ``Date,Open,High,Low,Close,Adj Close,Volume``.
    Blank or unparseable numeric cells become NaN and are imputed later.

    Args:
        path: CSV file location

    Returns:
        Validated PriceSeries

    Raises:
        InputNotFoundError: no file at ``path``
        EmptyInputError: file or body is empty
        SchemaError: header mismatch or unparseable date
        OrderingError: dates not strictly increasing
    """
    csv_path = Path(path)
    if not csv_path.exists():
        raise InputNotFoundError(f"OHLCV file not found: {csv_path}")

    try:
        raw = pd.read_csv(
            csv_path,
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
            skipinitialspace=False,
        )
    except pd.errors.EmptyDataError as exc:
        raise EmptyInputError(f"{csv_path}: file is empty") from exc

    header = tuple(raw.columns)
    if header != CSV_HEADER:
        missing = [c for c in CSV_HEADER if c not in header]
        extra = [c for c in header if c not in CSV_HEADER]
        raise SchemaError(
            f"{csv_path}: header must be {','.join(CSV_HEADER)} "
            f"(missing={missing}, extra={extra})"
        )
    if raw.empty:
        raise EmptyInputError(f"{csv_path}: no data rows")

    try:
        dates = pd.to_datetime(raw["Date"].str.strip(), format="%Y-%m-%d")
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{csv_path}: dates must be YYYY-MM-DD ({exc})") from exc

    index = pd.DatetimeIndex(dates, name="date")
    if len(index) > 1 and not (index[1:] > index[:-1]).all():
        position = int(np.argmax(~(index[1:] > index[:-1]))) + 1
        raise OrderingError(
            f"{csv_path}: dates not strictly increasing at row {position + 1} "
            f"({index[position].date()})"
        )

    values = {
        name: pd.to_numeric(raw[column].str.strip(), errors="coerce").to_numpy(dtype=float)
        for name, column in zip(PRICE_COLUMNS, CSV_HEADER[1:])
    }
    frame = pd.DataFrame(values, index=index, columns=list(PRICE_COLUMNS))

    missing_cells = int(frame.isna().sum().sum())
    logger.info("ohlcv loaded", path=str(csv_path), rows=len(frame), missing_cells=missing_cells)
    return PriceSeries(frame)


def impute_missing(series: Dated) -> Dated:
    """
    Replace every missing entry with the mean of its column's present entries.

    On a PriceSeries an imputed high is raised to the bar's largest present
    price and an imputed low lowered to its smallest, so high >= low holds.

    Args:
        series: PriceSeries or FeatureFrame

    Returns:
        Same type with no missing values

    Raises:
        DegenerateColumnError: a column has no present value
    """
    data = series.data
    empty = [c for c in data.columns if data[c].notna().sum() == 0]
    if empty:
        raise DegenerateColumnError(f"columns with no values to average: {empty}")

    means = data.mean(axis=0, skipna=True)
    filled = data.fillna(means)
    n_filled = int(data.isna().sum().sum())
    if n_filled:
        logger.debug("imputed missing cells", cells=n_filled)
    if isinstance(series, PriceSeries):
        filled = _clamp_imputed_range(data, filled)
    return series.with_data(filled)


def _clamp_imputed_range(raw: pd.DataFrame, filled: pd.DataFrame) -> pd.DataFrame:
    """Keep imputed highs and lows on the outside of their bar."""
    bar = filled[["open", "close"]]
    high_gap = raw["high"].isna()
    low_gap = raw["low"].isna()
    filled.loc[high_gap, "high"] = pd.concat(
        [filled["high"], filled["low"], bar["open"], bar["close"]], axis=1
    ).max(axis=1)[high_gap]
    filled.loc[low_gap, "low"] = pd.concat(
        [filled["low"], filled["high"], bar["open"], bar["close"]], axis=1
    ).min(axis=1)[low_gap]
    return filled


@dataclass(frozen=True)
class ScalerParams:
    """Per-column minimum and maximum observed on the fitting set."""

    columns: Tuple[str, ...]
    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        if np.any(self.maximum < self.minimum):
            raise SchemaError("scaler maximum below minimum")

    @property
    def span(self) -> np.ndarray:
        return self.maximum - self.minimum

    def transform_values(self, values: np.ndarray) -> np.ndarray:
        """Scale a (rows x columns) array laid out in ``columns`` order."""
        values = np.asarray(values, dtype=float)
        span = self.span
        safe = np.where(span > 0, span, 1.0)
        scaled = (values - self.minimum) / safe
        # zero-range columns map to 0
        return np.where(span > 0, scaled, 0.0)

    def inverse_values(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return values * self.span + self.minimum


def _as_dataframe(frame: Frameish) -> pd.DataFrame:
    return frame.data if isinstance(frame, FeatureFrame) else frame


def minmax_fit(frame: Frameish) -> ScalerParams:
    """
    Learn per-column minimum and maximum, ignoring missing cells.

    Raises:
        EmptyInputError: frame has no rows
        DegenerateColumnError: a column is entirely missing
    """
    data = _as_dataframe(frame)
    if len(data) == 0:
        raise EmptyInputError("cannot fit a scaler on an empty frame")
    values = data.to_numpy(dtype=float)
    if np.any(np.all(np.isnan(values), axis=0)):
        raise DegenerateColumnError("cannot fit a scaler on an all-missing column")
    return ScalerParams(
        columns=tuple(data.columns),
        minimum=np.nanmin(values, axis=0),
        maximum=np.nanmax(values, axis=0),
    )


def _aligned(data: pd.DataFrame, params: ScalerParams) -> pd.DataFrame:
    if set(data.columns) != set(params.columns) or len(data.columns) != len(params.columns):
        raise SchemaError(
            f"columns {list(data.columns)} do not match scaler columns {list(params.columns)}"
        )
    return data[list(params.columns)]


def minmax_transform(frame: Frameish, params: ScalerParams):
    """
    Map each column through (x - min) / (max - min); no clipping.

    Returns the same container type it was given, columns in input order.
    """
    data = _as_dataframe(frame)
    aligned = _aligned(data, params)
    scaled = pd.DataFrame(
        params.transform_values(aligned.to_numpy(dtype=float)),
        index=data.index,
        columns=aligned.columns,
    )[list(data.columns)]
    return frame.with_data(scaled) if isinstance(frame, FeatureFrame) else scaled


def minmax_inverse_transform(frame: Frameish, params: ScalerParams):
    """Undo ``minmax_transform`` (zero-range columns return their minimum)."""
    data = _as_dataframe(frame)
    aligned = _aligned(data, params)
    restored = pd.DataFrame(
        params.inverse_values(aligned.to_numpy(dtype=float)),
        index=data.index,
        columns=aligned.columns,
    )[list(data.columns)]
    return frame.with_data(restored) if isinstance(frame, FeatureFrame) else restored


def scale_target(
    targets: pd.Series, fit_on: Sequence[bool]
) -> Tuple[pd.Series, ScalerParams]:
    """Min-Max scale a target series with params fitted on the masked rows."""
    mask = np.asarray(fit_on, dtype=bool)
    name = targets.name or "target"
    params = minmax_fit(targets[mask].to_frame(name))
    scaled = params.transform_values(targets.to_numpy(dtype=float)[:, None])[:, 0]
    return pd.Series(scaled, index=targets.index, name=name), params
