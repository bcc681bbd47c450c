"""
Data Factory for generating synthetic pipeline inputs.

Provides seeded OHLCV random walks and planted-signal regression datasets
for demos, CI runs and tests.
"""

from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from indicator_selection.core.windowing import WindowedDataset, WindowSpec, feature_name
from indicator_selection.data.series import PriceSeries
from indicator_selection.utils.logger import get_logger


class DataFactory:
    """
    Factory for reproducible synthetic data.

    Features:
    - OHLCV random walks on a business-day calendar
    - CSV files in the external OHLCV layout
    - Windowed datasets with planted informative groups
    - Plain linear regression problems
    """

    def __init__(self, config_manager=None, seed: int = 42):
        """
        Initialize data factory.

        Args:
            config_manager: Configuration manager instance
            seed: Default seed for every generator call
        """
        self.config = config_manager
        self.seed = seed
        self.logger = get_logger(self.__class__.__name__)

    def _rng(self, seed: Optional[int]) -> np.random.Generator:
        return np.random.default_rng(self.seed if seed is None else seed)

    def create_ohlcv(
        self,
        n_days: int = 300,
        start: str = "2010-01-04",
        seed: Optional[int] = None,
        start_price: float = 100.0,
        volatility: float = 0.015,
    ) -> PriceSeries:
        """
        Create a geometric random walk of daily bars.

        Args:
            n_days: Number of business days
            start: First date
            seed: Generator seed (factory seed when omitted)
            start_price: Close on the day before the first bar
            volatility: Daily log-return standard deviation

        Returns:
            PriceSeries with high >= max(open, close) and low <= min(open, close)
        """
        rng = self._rng(seed)
        dates = pd.bdate_range(start=start, periods=n_days)
        returns = rng.normal(0.0003, volatility, n_days)
        close = start_price * np.exp(np.cumsum(returns))
        prev_close = np.concatenate([[start_price], close[:-1]])
        open_ = prev_close * np.exp(rng.normal(0.0, volatility / 3.0, n_days))
        top = np.maximum(open_, close)
        bottom = np.minimum(open_, close)
        high = top * (1.0 + np.abs(rng.normal(0.0, volatility / 2.0, n_days)))
        low = bottom * (1.0 - np.abs(rng.normal(0.0, volatility / 2.0, n_days)))
        volume = np.round(rng.lognormal(14.0, 0.3, n_days))

        series = PriceSeries.from_arrays(
            dates, open_, high, low, close, adj_close=close * 0.98, volume=volume
        )
        self.logger.debug("Created synthetic OHLCV", days=n_days, seed=self.seed if seed is None else seed)
        return series

    def create_ohlcv_csv(self, path: Union[str, Path], **kwargs) -> Path:
        """Write ``create_ohlcv(**kwargs)`` to ``path`` in the external CSV layout."""
        return self.create_ohlcv(**kwargs).to_csv(path)

    def create_planted_dataset(
        self,
        m: int = 300,
        n_groups: int = 20,
        coefficients: Optional[Mapping[str, float]] = None,
        noise: float = 0.01,
        width: int = 1,
        seed: Optional[int] = None,
    ) -> WindowedDataset:
        """
        Create a windowed dataset whose target depends on a few groups.

        Groups are named ``g1..gG``; each spans ``width`` lag columns and the
        target reads only lag 0: y = sum(coef * g@0) + N(0, noise).

        Args:
            m: Sample count
            n_groups: Number of groups G
            coefficients: Group -> coefficient (default g1: 3, g5: -2, keeping
                only the groups that exist)
            noise: Noise standard deviation
            width: Lag columns per group
            seed: Generator seed
        """
        rng = self._rng(seed)
        names = [f"g{j + 1}" for j in range(n_groups)]
        if coefficients is None:
            coefficients = {g: c for g, c in (("g1", 3.0), ("g5", -2.0)) if g in names}

        X = rng.normal(size=(m, n_groups * width))
        y = rng.normal(0.0, noise, m)
        for group, coef in coefficients.items():
            y += coef * X[:, names.index(group) * width]

        feature_names = tuple(feature_name(g, lag) for g in names for lag in range(width))
        dates = pd.bdate_range(start="2010-01-04", periods=m + width + 1)
        return WindowedDataset(
            X=X,
            y=y,
            feature_names=feature_names,
            sample_dates=dates[width - 1:width - 1 + m],
            target_dates=dates[width:width + m],
            groups={f: f.split("@", 1)[0] for f in feature_names},
            window=WindowSpec(w=width, h=1),
        )

    def create_mixed_dataset(
        self,
        m: int = 300,
        n_informative: int = 10,
        n_noise: int = 10,
        width: int = 5,
        noise: float = 0.5,
        seed: Optional[int] = None,
    ) -> Tuple[WindowedDataset, Dict[str, float]]:
        """
        Create informative groups ``g1..`` followed by pure-noise groups.

        Returns:
            (dataset, coefficients of the informative groups)
        """
        rng = self._rng(seed)
        coefficients = {
            f"g{j + 1}": float(c) * s
            for j, (c, s) in enumerate(
                zip(rng.uniform(1.0, 2.0, n_informative), rng.choice([-1.0, 1.0], n_informative))
            )
        }
        dataset = self.create_planted_dataset(
            m=m,
            n_groups=n_informative + n_noise,
            coefficients=coefficients,
            noise=noise,
            width=width,
            seed=int(rng.integers(0, 2**31 - 1)),
        )
        return dataset, coefficients

    def create_regression(
        self,
        m: int = 100,
        d: int = 3,
        noise: float = 0.0,
        intercept: float = 0.0,
        seed: Optional[int] = None,
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``X, y, beta`` with y = X beta + intercept + N(0, noise)."""
        rng = self._rng(seed)
        X = rng.normal(size=(m, d))
        beta = rng.uniform(-2.0, 2.0, d)
        y = X @ beta + intercept + (rng.normal(0.0, noise, m) if noise else 0.0)
        return X, y, beta
