"""
Price and feature containers, ingestion and scaling.
"""

from indicator_selection.data.ingest import (
    ScalerParams,
    impute_missing,
    load_ohlcv,
    minmax_fit,
    minmax_inverse_transform,
    minmax_transform,
)
from indicator_selection.data.series import FeatureFrame, PriceSeries

__all__ = [
    "FeatureFrame",
    "PriceSeries",
    "ScalerParams",
    "impute_missing",
    "load_ohlcv",
    "minmax_fit",
    "minmax_inverse_transform",
    "minmax_transform",
]
