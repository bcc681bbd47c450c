"""
Native technical indicators.

Each indicator takes a PriceSeries plus keyword parameters and returns a
Series (single output) or a DataFrame whose columns are output suffixes.
Entry t only ever reads bars 0..t. Warm-up entries are NaN.

Conventions:
- EMA uses alpha = 2 / (length + 1) and is seeded with the SMA of the first
  ``length`` valid observations.
- Wilder smoothing (RSI, ATR) is the same recursion with alpha = 1 / length.
- Standard deviations are population (ddof=0) deviations.
- Boolean flags are emitted as 0.0/1.0 and are NaN while their inputs are.
"""

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from indicator_selection.data.series import PriceSeries


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------

def sma_of(x: pd.Series, length: int) -> pd.Series:
    return x.rolling(window=length, min_periods=length).mean()


def ema_of(x: pd.Series, length: int, alpha: float = None) -> pd.Series:
    """Exponential average seeded with the SMA of the first ``length`` values."""
    alpha = 2.0 / (length + 1.0) if alpha is None else alpha
    values = x.to_numpy(dtype=float)
    out = np.full(len(values), np.nan)
    valid = np.flatnonzero(~np.isnan(values))
    if len(valid) < length:
        return pd.Series(out, index=x.index)
    start = valid[0]
    seed_at = start + length - 1
    tail = values[seed_at:].copy()
    tail[0] = values[start:seed_at + 1].mean()
    out[seed_at:] = pd.Series(tail).ewm(alpha=alpha, adjust=False).mean().to_numpy()
    return pd.Series(out, index=x.index)


def rma_of(x: pd.Series, length: int) -> pd.Series:
    """Wilder smoothing."""
    return ema_of(x, length, alpha=1.0 / length)


def wma_of(x: pd.Series, length: int) -> pd.Series:
    values = x.to_numpy(dtype=float)
    out = np.full(len(values), np.nan)
    if len(values) >= length:
        weights = np.arange(1, length + 1, dtype=float)
        windows = sliding_window_view(values, length)
        out[length - 1:] = windows @ weights / weights.sum()
    return pd.Series(out, index=x.index)


def true_range(series: PriceSeries) -> pd.Series:
    prev_close = series.close.shift(1)
    ranges = pd.concat(
        [
            series.high - series.low,
            (series.high - prev_close).abs(),
            (series.low - prev_close).abs(),
        ],
        axis=1,
    )
    tr = ranges.max(axis=1, skipna=False)
    tr.iloc[0] = np.nan
    return tr


def _flag(condition: pd.Series, *inputs: pd.Series) -> pd.Series:
    flag = condition.astype(float)
    missing = np.zeros(len(flag), dtype=bool)
    for item in inputs:
        missing |= item.isna().to_numpy()
    flag[missing] = np.nan
    return flag


def _ratio(num: pd.Series, den: pd.Series, fallback: float) -> pd.Series:
    """num / den with ``fallback`` where den == 0 (NaN stays NaN)."""
    safe = den.where(den != 0, np.nan)
    out = num / safe
    return out.where(~((den == 0) & num.notna()), fallback)


def _bollinger(close: pd.Series, length: int, std: float):
    mid = sma_of(close, length)
    dev = close.rolling(window=length, min_periods=length).std(ddof=0)
    return mid - std * dev, mid, mid + std * dev


def _keltner(series: PriceSeries, length: int, scalar: float):
    basis = sma_of(series.close, length)
    band = sma_of(true_range(series), length)
    return basis - scalar * band, basis, basis + scalar * band


def _increasing(x: pd.Series, length: int) -> pd.Series:
    return _flag(x.diff(length) > 0, x.diff(length))


def _decreasing(x: pd.Series, length: int) -> pd.Series:
    return _flag(x.diff(length) < 0, x.diff(length))


# ---------------------------------------------------------------------------
# Overlap / trend
# ---------------------------------------------------------------------------

def sma(series: PriceSeries, length: int = 10) -> pd.Series:
    return sma_of(series.close, length)


def ema(series: PriceSeries, length: int = 10) -> pd.Series:
    return ema_of(series.close, length)


def wma(series: PriceSeries, length: int = 10) -> pd.Series:
    return wma_of(series.close, length)


def dema(series: PriceSeries, length: int = 10) -> pd.Series:
    first = ema_of(series.close, length)
    return 2.0 * first - ema_of(first, length)


def tema(series: PriceSeries, length: int = 10) -> pd.Series:
    first = ema_of(series.close, length)
    second = ema_of(first, length)
    third = ema_of(second, length)
    return 3.0 * first - 3.0 * second + third


def trima_half(length: int) -> int:
    return int(round(0.5 * (length + 1)))


def trima(series: PriceSeries, length: int = 10) -> pd.Series:
    half = trima_half(length)
    return sma_of(sma_of(series.close, half), half)


def midpoint(series: PriceSeries, length: int = 2) -> pd.Series:
    close = series.close
    return (close.rolling(length).max() + close.rolling(length).min()) / 2.0


def midprice(series: PriceSeries, length: int = 2) -> pd.Series:
    return (series.high.rolling(length).max() + series.low.rolling(length).min()) / 2.0


def ichimoku(series: PriceSeries, tenkan: int = 9, kijun: int = 26, senkou: int = 52) -> pd.DataFrame:
    """Conversion, base and both spans, emitted without forward displacement."""
    def mid(length: int) -> pd.Series:
        return (series.high.rolling(length).max() + series.low.rolling(length).min()) / 2.0

    conversion = mid(tenkan)
    base = mid(kijun)
    return pd.DataFrame(
        {
            "conversion": conversion,
            "base": base,
            "span_a": (conversion + base) / 2.0,
            "span_b": mid(senkou),
        }
    )


# ---------------------------------------------------------------------------
# Momentum
# ---------------------------------------------------------------------------

def mom(series: PriceSeries, length: int = 10) -> pd.Series:
    return series.close.diff(length)


def roc(series: PriceSeries, length: int = 10) -> pd.Series:
    prev = series.close.shift(length)
    return 100.0 * (series.close - prev) / prev


def rsi(series: PriceSeries, length: int = 14) -> pd.Series:
    delta = series.close.diff()
    gain = rma_of(delta.clip(lower=0.0), length)
    loss = rma_of(-delta.clip(upper=0.0), length)
    return _ratio(100.0 * gain, gain + loss, 50.0)


def _oscillator(x: pd.Series, fast: int, slow: int, signal: int, percent: bool) -> pd.DataFrame:
    fast_ma = ema_of(x, fast)
    slow_ma = ema_of(x, slow)
    if percent:
        line = _ratio(100.0 * (fast_ma - slow_ma), slow_ma, 0.0)
    else:
        line = fast_ma - slow_ma
    signal_line = ema_of(line, signal)
    return pd.DataFrame({"line": line, "signal": signal_line, "hist": line - signal_line})


def macd(series: PriceSeries, fast: int = 12, slow: int = 26, signal: int = 9) -> pd.DataFrame:
    return _oscillator(series.close, fast, slow, signal, percent=False)


def ppo(series: PriceSeries, fast: int = 12, slow: int = 26, signal: int = 9) -> pd.DataFrame:
    """Percentage of the slow EMA."""
    return _oscillator(series.close, fast, slow, signal, percent=True)


def pvo(series: PriceSeries, fast: int = 12, slow: int = 26, signal: int = 9) -> pd.DataFrame:
    return _oscillator(series.volume, fast, slow, signal, percent=True)


def stoch(series: PriceSeries, k: int = 14, d: int = 3) -> pd.DataFrame:
    lowest = series.low.rolling(k).min()
    highest = series.high.rolling(k).max()
    percent_k = _ratio(100.0 * (series.close - lowest), highest - lowest, 50.0)
    return pd.DataFrame({"k": percent_k, "d": sma_of(percent_k, d)})


def willr(series: PriceSeries, length: int = 14) -> pd.Series:
    lowest = series.low.rolling(length).min()
    highest = series.high.rolling(length).max()
    return _ratio(-100.0 * (highest - series.close), highest - lowest, -50.0)


def cci(series: PriceSeries, length: int = 20, c: float = 0.015) -> pd.Series:
    typical = (series.high + series.low + series.close) / 3.0
    mean = sma_of(typical, length)
    mad = typical.rolling(length).apply(lambda w: np.mean(np.abs(w - w.mean())), raw=True)
    return _ratio(typical - mean, c * mad, 0.0)


def dpo(series: PriceSeries, length: int = 20) -> pd.Series:
    """Trailing (uncentred) detrended price oscillator."""
    return series.close - sma_of(series.close, length).shift(length // 2 + 1)


def slope(series: PriceSeries, length: int = 20) -> pd.Series:
    return series.close.diff(length) / length


def squeeze(
    series: PriceSeries,
    bb_length: int = 20,
    bb_std: float = 2.0,
    kc_length: int = 20,
    kc_scalar: float = 1.5,
    mom_length: int = 12,
    mom_smooth: int = 6,
) -> pd.DataFrame:
    """Bollinger Bands inside/outside Keltner Channels plus smoothed momentum."""
    bb_lower, _, bb_upper = _bollinger(series.close, bb_length, bb_std)
    kc_lower, _, kc_upper = _keltner(series, kc_length, kc_scalar)
    momentum = sma_of(series.close.diff(mom_length), mom_smooth)

    inputs = (bb_lower, kc_lower)
    on = _flag((bb_lower > kc_lower) & (bb_upper < kc_upper), *inputs)
    off = _flag((bb_lower < kc_lower) & (bb_upper > kc_upper), *inputs)
    return pd.DataFrame({"mom": momentum, "on": on, "off": off, "no": 1.0 - on - off})


def squeeze_pro(
    series: PriceSeries,
    bb_length: int = 20,
    bb_std: float = 2.0,
    kc_length: int = 20,
    kc_scalar_wide: float = 2.0,
    kc_scalar_normal: float = 1.5,
    kc_scalar_narrow: float = 1.0,
    mom_length: int = 12,
    mom_smooth: int = 6,
) -> pd.DataFrame:
    """Squeeze against wide, normal and narrow Keltner Channels."""
    bb_lower, _, bb_upper = _bollinger(series.close, bb_length, bb_std)
    momentum = sma_of(series.close.diff(mom_length), mom_smooth)

    out = {"mom": momentum}
    for label, scalar in (
        ("on_wide", kc_scalar_wide),
        ("on_normal", kc_scalar_normal),
        ("on_narrow", kc_scalar_narrow),
    ):
        kc_lower, _, kc_upper = _keltner(series, kc_length, scalar)
        out[label] = _flag((bb_lower > kc_lower) & (bb_upper < kc_upper), bb_lower, kc_lower)
        if label == "on_wide":
            out["off"] = _flag((bb_lower < kc_lower) & (bb_upper > kc_upper), bb_lower, kc_lower)

    any_on = np.maximum.reduce([out["on_wide"], out["on_normal"], out["on_narrow"]])
    out["no"] = (1.0 - any_on) * (1.0 - out["off"])
    return pd.DataFrame(out)[["mom", "on_wide", "on_normal", "on_narrow", "off", "no"]]


# ---------------------------------------------------------------------------
# Volatility
# ---------------------------------------------------------------------------

def bbands(series: PriceSeries, length: int = 20, std: float = 2.0) -> pd.DataFrame:
    lower, mid, upper = _bollinger(series.close, length, std)
    return pd.DataFrame(
        {
            "lower": lower,
            "mid": mid,
            "upper": upper,
            "bandwidth": _ratio(100.0 * (upper - lower), mid, 0.0),
            "percent": _ratio(series.close - lower, upper - lower, 0.5),
        }
    )


def atr(series: PriceSeries, length: int = 14) -> pd.Series:
    return rma_of(true_range(series), length)


def natr(series: PriceSeries, length: int = 14) -> pd.Series:
    return _ratio(100.0 * atr(series, length), series.close, 0.0)


def thermo(series: PriceSeries, length: int = 20, long: float = 2.0, short: float = 0.5) -> pd.DataFrame:
    """Elder's thermometer: the larger of |high move| and |low move|, with its EMA."""
    high_move = (series.high - series.high.shift(1)).abs()
    low_move = (series.low.shift(1) - series.low).abs()
    value = low_move.where(high_move < low_move, high_move)
    average = ema_of(value, length)
    return pd.DataFrame(
        {
            "value": value,
            "ma": average,
            "long": _flag(value < average * long, average),
            "short": _flag(value > average * short, average),
        }
    )


def stdev(series: PriceSeries, length: int = 20) -> pd.Series:
    return series.close.rolling(window=length, min_periods=length).std(ddof=0)


def zscore(series: PriceSeries, length: int = 20) -> pd.Series:
    mean = sma_of(series.close, length)
    dev = stdev(series, length)
    # rolling round-off leaves ~1e-16 deviations on flat windows
    dev = dev.where(dev.isna() | (dev > 1e-12 * mean.abs().clip(lower=1.0)), 0.0)
    return _ratio(series.close - mean, dev, 0.0)


def decay(series: PriceSeries, length: int = 5) -> pd.Series:
    """Linear decay: d_t = max(close_t, d_{t-1} - 1/length, 0)."""
    close = series.close.to_numpy(dtype=float)
    out = np.empty(len(close))
    step = 1.0 / length
    previous = 0.0
    for t, value in enumerate(close):
        previous = max(value, previous - step, 0.0) if t else max(value, 0.0)
        out[t] = previous
    return pd.Series(out, index=series.close.index)


# ---------------------------------------------------------------------------
# Volume
# ---------------------------------------------------------------------------

def obv(series: PriceSeries) -> pd.Series:
    direction = np.sign(series.close.diff())
    direction.iloc[0] = 1.0
    return (direction * series.volume).cumsum()


def mfi(series: PriceSeries, length: int = 14) -> pd.Series:
    typical = (series.high + series.low + series.close) / 3.0
    flow = typical * series.volume
    change = typical.diff()
    positive = flow.where(change > 0, 0.0).where(change.notna())
    negative = flow.where(change < 0, 0.0).where(change.notna())
    pos_sum = positive.rolling(length).sum()
    neg_sum = negative.rolling(length).sum()
    return _ratio(100.0 * pos_sum, pos_sum + neg_sum, 50.0)


def aobv(
    series: PriceSeries,
    fast: int = 4,
    slow: int = 12,
    max_lookback: int = 2,
    min_lookback: int = 2,
) -> pd.DataFrame:
    """Archer OBV: OBV, its rolling extremes, fast/slow EMAs and run flags."""
    balance = obv(series)
    fast_ma = ema_of(balance, fast)
    slow_ma = ema_of(balance, slow)

    rising_fast = _increasing(fast_ma, max_lookback)
    long_run = np.maximum(
        rising_fast * _decreasing(slow_ma, max_lookback),
        rising_fast * _increasing(slow_ma, max_lookback),
    )
    falling_fast = _decreasing(fast_ma, min_lookback)
    short_run = np.maximum(
        falling_fast * _increasing(slow_ma, min_lookback),
        falling_fast * _decreasing(slow_ma, min_lookback),
    )
    return pd.DataFrame(
        {
            "obv": balance,
            "min": balance.rolling(min_lookback).min(),
            "max": balance.rolling(max_lookback).max(),
            "fast": fast_ma,
            "slow": slow_ma,
            "long_run": long_run,
            "short_run": short_run,
        }
    )
