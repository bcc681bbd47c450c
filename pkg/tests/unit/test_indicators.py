"""
Indicator Test Suite

Native indicators against loop-based re-computations, warm-up rules and
trivial constant/monotone cases.
"""

import allure
import numpy as np
import pandas as pd
import pytest

from indicator_selection.core.base_test import BasePipelineTest
from indicator_selection.data.series import PriceSeries
from indicator_selection.exceptions import InsufficientHistoryError, SchemaError, UnknownIndicatorError
from indicator_selection.indicators.registry import (
    NATIVE_REGISTRY,
    IndicatorSpec,
    compute,
    compute_all,
)
from indicator_selection.indicators.roster import default_roster
from indicator_selection.utils.assertions import assert_frame

TOLERANCE = 1e-8


def flat_series(values, volume=None) -> PriceSeries:
    values = np.asarray(values, dtype=float)
    dates = pd.bdate_range("2020-01-01", periods=len(values))
    return PriceSeries.from_arrays(dates, values, values, values, values, volume=volume)


def ema_loop(values, length, alpha=None):
    alpha = 2.0 / (length + 1.0) if alpha is None else alpha
    out = [np.nan] * len(values)
    start = next(i for i, v in enumerate(values) if not np.isnan(v))
    seed_at = start + length - 1
    previous = sum(values[start:seed_at + 1]) / length
    out[seed_at] = previous
    for t in range(seed_at + 1, len(values)):
        previous = alpha * values[t] + (1.0 - alpha) * previous
        out[t] = previous
    return out


def sma_loop(values, length):
    return [np.nan if t < length - 1 else sum(values[t - length + 1:t + 1]) / length for t in range(len(values))]


def pstdev_loop(values, length):
    out = []
    for t in range(len(values)):
        if t < length - 1:
            out.append(np.nan)
            continue
        window = values[t - length + 1:t + 1]
        mean = sum(window) / length
        out.append((sum((v - mean) ** 2 for v in window) / length) ** 0.5)
    return out


def rsi_loop(close, length):
    deltas = [np.nan] + [close[t] - close[t - 1] for t in range(1, len(close))]
    gains = [np.nan if np.isnan(d) else max(d, 0.0) for d in deltas]
    losses = [np.nan if np.isnan(d) else max(-d, 0.0) for d in deltas]
    avg_gain = ema_loop(gains, length, alpha=1.0 / length)
    avg_loss = ema_loop(losses, length, alpha=1.0 / length)
    return [np.nan if np.isnan(g) else 100.0 * g / (g + l) for g, l in zip(avg_gain, avg_loss)]


def true_range_loop(high, low, close):
    out = [np.nan]
    for t in range(1, len(close)):
        out.append(max(high[t] - low[t], abs(high[t] - close[t - 1]), abs(low[t] - close[t - 1])))
    return out


@allure.epic("Indicators")
@allure.feature("Golden Values")
@pytest.mark.unit
class TestIndicatorGoldenValues(BasePipelineTest):
    """Native indicators on 100 random bars versus direct re-computation."""

    @pytest.fixture(autouse=True)
    def bars(self, data_factory):
        self.series = data_factory.create_ohlcv(n_days=100, seed=11)
        self.close = self.series.close.tolist()
        self.high = self.series.high.tolist()
        self.low = self.series.low.tolist()
        self.volume = self.series.volume.tolist()

    def column(self, spec: IndicatorSpec, name: str) -> np.ndarray:
        return compute(spec, self.series).data[name].to_numpy()

    @pytest.mark.smoke
    @allure.title("SMA matches rolling mean")
    def test_sma(self):
        actual = self.column(IndicatorSpec.of("sma", length=10), "sma")
        np.testing.assert_allclose(actual, sma_loop(self.close, 10), atol=TOLERANCE, equal_nan=True)

    @allure.title("EMA matches SMA-seeded recursion")
    def test_ema(self):
        actual = self.column(IndicatorSpec.of("ema", length=10), "ema")
        np.testing.assert_allclose(actual, ema_loop(self.close, 10), atol=TOLERANCE, equal_nan=True)

    @allure.title("RSI matches Wilder smoothing")
    def test_rsi(self):
        actual = self.column(IndicatorSpec.of("rsi", length=14), "rsi")
        np.testing.assert_allclose(actual, rsi_loop(self.close, 14), atol=TOLERANCE, equal_nan=True)

    @allure.title("Bollinger bands match rolling mean ± 2 population deviations")
    def test_bbands(self):
        frame = compute(IndicatorSpec.of("bbands", length=20, std=2), self.series)
        mid = np.array(sma_loop(self.close, 20))
        dev = np.array(pstdev_loop(self.close, 20))
        lower, upper = mid - 2.0 * dev, mid + 2.0 * dev

        (assert_frame(frame)
            .has_exact_columns(["bbands_lower", "bbands_mid", "bbands_upper", "bbands_bandwidth", "bbands_percent"])
            .column_close_to("bbands_mid", mid, atol=TOLERANCE)
            .column_close_to("bbands_lower", lower, atol=TOLERANCE)
            .column_close_to("bbands_upper", upper, atol=TOLERANCE)
            .column_close_to("bbands_bandwidth", 100.0 * (upper - lower) / mid, atol=TOLERANCE)
            .column_close_to("bbands_percent", (np.array(self.close) - lower) / (upper - lower), atol=TOLERANCE))

    @allure.title("PPO matches percentage EMA spread and its signal")
    def test_ppo(self):
        frame = compute(IndicatorSpec.of("ppo", fast=12, slow=26, signal=9), self.series)
        fast = np.array(ema_loop(self.close, 12))
        slow = np.array(ema_loop(self.close, 26))
        line = 100.0 * (fast - slow) / slow
        signal = np.array(ema_loop(list(line), 9))

        (assert_frame(frame)
            .column_close_to("ppo_line", line, atol=TOLERANCE)
            .column_close_to("ppo_signal", signal, atol=TOLERANCE)
            .column_close_to("ppo_hist", line - signal, atol=TOLERANCE))

    @allure.title("OBV matches signed cumulative volume")
    def test_obv(self):
        expected, running = [], 0.0
        for t, volume in enumerate(self.volume):
            if t == 0 or self.close[t] > self.close[t - 1]:
                running += volume
            elif self.close[t] < self.close[t - 1]:
                running -= volume
            expected.append(running)
        np.testing.assert_allclose(self.column(IndicatorSpec.of("obv"), "obv"), expected, atol=TOLERANCE, rtol=0.0)

    @allure.title("Williams %R matches highest-high / lowest-low ratio")
    def test_willr(self):
        expected = []
        for t in range(100):
            if t < 13:
                expected.append(np.nan)
                continue
            hh, ll = max(self.high[t - 13:t + 1]), min(self.low[t - 13:t + 1])
            expected.append(-100.0 * (hh - self.close[t]) / (hh - ll))
        actual = self.column(IndicatorSpec.of("willr", length=14), "willr")
        np.testing.assert_allclose(actual, expected, atol=TOLERANCE, equal_nan=True)

    @allure.title("ATR matches Wilder-smoothed true range")
    def test_atr(self):
        tr = true_range_loop(self.high, self.low, self.close)
        expected = ema_loop(tr, 14, alpha=1.0 / 14)
        actual = self.column(IndicatorSpec.of("atr", length=14), "atr")
        np.testing.assert_allclose(actual, expected, atol=TOLERANCE, equal_nan=True)

    @pytest.mark.regression
    @allure.title("Output at t never depends on later bars")
    def test_no_lookahead(self):
        for spec in default_roster():
            full = compute(spec, self.series).data
            cut = compute(spec, self.series.head(80)).data
            np.testing.assert_allclose(
                cut.to_numpy(), full.iloc[:80].to_numpy(), atol=1e-10, equal_nan=True,
                err_msg=f"{spec} changed when later bars were removed",
            )


@allure.epic("Indicators")
@allure.feature("Trivial Cases")
@pytest.mark.unit
class TestIndicatorTrivialCases:

    @pytest.mark.boundary
    @allure.title("SMA(3) on a constant series")
    def test_sma_constant(self):
        frame = compute(IndicatorSpec.of("sma", length=3), flat_series([2, 2, 2, 2]))
        np.testing.assert_array_equal(frame.data["sma"].to_numpy(), [np.nan, np.nan, 2.0, 2.0])

    @pytest.mark.boundary
    @allure.title("RSI is 100 on a strictly increasing series")
    def test_rsi_increasing(self):
        values = compute(IndicatorSpec.of("rsi", length=14), flat_series(np.arange(1.0, 41.0))).data["rsi"]
        assert values.iloc[:14].isna().all()
        assert (values.iloc[14:] == 100.0).all()

    @pytest.mark.boundary
    def test_constant_series_fallbacks(self):
        series = flat_series(np.full(40, 7.0), volume=np.full(40, 100.0))

        rsi = compute(IndicatorSpec.of("rsi", length=14), series).data["rsi"].dropna()
        willr = compute(IndicatorSpec.of("willr", length=14), series).data["willr"].dropna()
        atr = compute(IndicatorSpec.of("atr", length=14), series).data["atr"].dropna()
        bands = compute(IndicatorSpec.of("bbands", length=20), series).data.dropna()
        obv = compute(IndicatorSpec.of("obv"), series).data["obv"]

        assert (rsi == 50.0).all()
        assert (willr == -50.0).all()
        assert (atr == 0.0).all()
        np.testing.assert_allclose(bands[["bbands_lower", "bbands_mid", "bbands_upper"]].to_numpy(), 7.0, atol=1e-12)
        np.testing.assert_allclose(bands["bbands_bandwidth"].to_numpy(), 0.0, atol=1e-10)
        np.testing.assert_allclose(bands["bbands_percent"].to_numpy(), 0.5, atol=1e-10)
        assert (obv == 100.0).all()

    @pytest.mark.boundary
    def test_monotone_momentum(self):
        series = flat_series(np.arange(10.0, 60.0, 2.0))
        mom = compute(IndicatorSpec.of("mom", length=5), series).data["mom"].dropna()
        ema = compute(IndicatorSpec.of("ema", length=5), series).data["ema"].dropna()

        assert (mom == 10.0).all()
        assert (np.diff(ema.to_numpy()) > 0).all()

    @pytest.mark.boundary
    def test_decay_floor(self):
        series = flat_series([1.0, 0.2, 0.2, 0.2])
        decay = compute(IndicatorSpec.of("decay", length=5), series).data["decay"].to_numpy()
        np.testing.assert_allclose(decay, [1.0, 0.8, 0.6, 0.4])


@allure.epic("Indicators")
@allure.feature("Invariants")
@pytest.mark.unit
class TestIndicatorInvariants(BasePipelineTest):
    """Range and identity laws on random bars."""

    @pytest.fixture(autouse=True)
    def bars(self, setup_test):
        self.series = self.data_factory.create_ohlcv(n_days=250, seed=23)

    def values(self, name: str, column: str = None, **params) -> pd.Series:
        return compute(IndicatorSpec.of(name, **params), self.series).data[column or name].dropna()

    @pytest.mark.boundary
    @allure.title("Length-1 averages return the close unchanged")
    def test_length_one_averages_are_identity(self):
        close = self.series.close.to_numpy()
        np.testing.assert_array_equal(self.values("ema", length=1).to_numpy(), close)
        np.testing.assert_array_equal(self.values("sma", length=1).to_numpy(), close)

    @pytest.mark.positive
    @pytest.mark.parametrize("name,column,low,high", [
        ("rsi", "rsi", 0.0, 100.0),
        ("stoch", "stoch_k", 0.0, 100.0),
        ("stoch", "stoch_d", 0.0, 100.0),
        ("willr", "willr", -100.0, 0.0),
    ])
    def test_oscillator_ranges(self, name, column, low, high):
        values = self.values(name, column)
        assert len(values) > 200
        assert values.min() >= low - 1e-9
        assert values.max() <= high + 1e-9

    @pytest.mark.positive
    def test_bollinger_band_order(self):
        bands = compute(IndicatorSpec.of("bbands", length=20, std=2), self.series).data.dropna()
        assert (bands["bbands_lower"] <= bands["bbands_mid"]).all()
        assert (bands["bbands_mid"] <= bands["bbands_upper"]).all()

    @pytest.mark.positive
    def test_decay_bounds(self):
        decay = self.values("decay", length=5)
        close = self.series.close.loc[decay.index]
        assert (decay >= 0.0).all()
        assert (decay >= close).all()

    @pytest.mark.regression
    @allure.title("Moving the date axis moves every output with it")
    def test_shift_equivariance(self):
        moved = self.series.data.copy()
        moved.index = pd.DatetimeIndex(self.series.dates + pd.Timedelta(days=400), name="date")
        shifted = PriceSeries(moved)

        for spec in default_roster():
            original = compute(spec, self.series).data
            relocated = compute(spec, shifted).data
            assert relocated.index.equals(moved.index), f"{spec} did not follow the date axis"
            np.testing.assert_allclose(
                relocated.to_numpy(), original.to_numpy(), rtol=0.0, atol=0.0, equal_nan=True,
                err_msg=f"{spec} changed when the dates moved",
            )


@allure.epic("Indicators")
@allure.feature("Frame Assembly")
@pytest.mark.unit
class TestFrameAssembly(BasePipelineTest):

    @pytest.mark.positive
    def test_compute_all_single_spec(self):
        series = self.data_factory.create_ohlcv(n_days=60, seed=1)
        spec = IndicatorSpec.of("sma", length=3)
        pd.testing.assert_frame_equal(compute_all([spec], series).data, compute(spec, series).data)

    @pytest.mark.positive
    def test_compute_all_concatenates(self):
        series = self.data_factory.create_ohlcv(n_days=10, seed=1)
        frame = compute_all([IndicatorSpec.of("sma", length=3), IndicatorSpec.of("mom", length=2)], series)

        assert_frame(frame).has_exact_columns(["sma", "mom"]).has_rows(10)
        assert not set(frame.columns) & {"open", "high", "low", "close", "adj_close", "volume"}

    @pytest.mark.regression
    @allure.title("Default roster column count and warm-ups follow registry metadata")
    def test_default_roster(self):
        series = self.data_factory.create_ohlcv(n_days=300, seed=2)
        specs = default_roster()
        frame = compute_all(specs, series)

        expected_columns = sum(len(NATIVE_REGISTRY.resolve(s).outputs) for s in specs)
        assert len(frame.columns) == expected_columns
        assert len(frame.group_names) == len(specs)
        for spec in specs:
            data = compute(spec, series).data
            leading = int(np.argmax(data.notna().all(axis=1).to_numpy()))
            assert leading == NATIVE_REGISTRY.warmup(spec), f"{spec}: {leading} leading missing rows"
            assert data.iloc[leading:].notna().all().all(), f"{spec} has gaps after warm-up"

    @pytest.mark.negative
    def test_duplicate_outputs_rejected(self):
        series = self.data_factory.create_ohlcv(n_days=30, seed=1)
        with pytest.raises(SchemaError):
            compute_all([IndicatorSpec.of("sma", length=3), IndicatorSpec.of("sma", length=5)], series)

    @pytest.mark.negative
    def test_empty_spec_list(self):
        with pytest.raises(SchemaError):
            compute_all([], self.data_factory.create_ohlcv(n_days=10, seed=1))

    @pytest.mark.negative
    def test_unknown_indicator(self):
        with pytest.raises(UnknownIndicatorError):
            compute(IndicatorSpec.of("foo"), self.data_factory.create_ohlcv(n_days=10, seed=1))

    @pytest.mark.negative
    def test_insufficient_history(self):
        with pytest.raises(InsufficientHistoryError):
            compute(IndicatorSpec.of("rsi", length=14), self.data_factory.create_ohlcv(n_days=10, seed=1))

    @pytest.mark.negative
    @pytest.mark.parametrize("length", [0, 2.5, -3])
    def test_invalid_length(self, length):
        with pytest.raises(SchemaError):
            NATIVE_REGISTRY.resolve(IndicatorSpec.of("sma", length=length))
