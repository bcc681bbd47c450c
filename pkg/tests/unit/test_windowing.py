"""
Windowing Test Suite

Shape law, flattening order, targets and splits of w-day windowed datasets.
"""

import itertools

import allure
import numpy as np
import pandas as pd
import pytest

from indicator_selection.core.base_test import BasePipelineTest
from indicator_selection.core.windowing import (
    WindowSpec,
    make_windows,
    split_rows,
    train_test_split,
    window_size_sweep,
)
from indicator_selection.data.series import FeatureFrame
from indicator_selection.exceptions import (
    GroupReferenceError,
    InsufficientHistoryError,
    InsufficientSamplesError,
    SchemaError,
)
from indicator_selection.utils.assertions import assert_dataset


def random_frame(n: int, k: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    index = pd.DatetimeIndex(pd.bdate_range("2015-01-01", periods=n), name="date")
    data = pd.DataFrame(rng.normal(size=(n, k)), index=index, columns=[f"f{j}" for j in range(k)])
    close = pd.Series(rng.uniform(50.0, 60.0, n), index=index, name="close")
    return FeatureFrame(data), close


def naive_row(values: np.ndarray, i: int, w: int) -> list:
    row = []
    for column in range(values.shape[1]):
        for lag in range(w):
            row.append(values[i + w - 1 - lag, column])
    return row


@allure.epic("Windowing")
@allure.feature("Window Construction")
@pytest.mark.unit
class TestMakeWindows(BasePipelineTest):

    @pytest.mark.smoke
    @pytest.mark.regression
    @allure.title("Shape law and row-0 oracle over the (n, k, w, h) grid")
    def test_shape_law_grid(self):
        checked = 0
        for n, k, w, h in itertools.product((10, 50, 200), (1, 5), (1, 3, 10), (1, 3)):
            if n < w + h:
                continue
            frame, close = random_frame(n, k, seed=n + k + w + h)
            dataset = make_windows(frame, close, WindowSpec(w=w, h=h))

            assert_dataset(dataset).has_shape(n - w - h + 1, k * w)
            np.testing.assert_array_equal(dataset.X[0], naive_row(frame.data.to_numpy(), 0, w))
            checked += 1
        self.add_test_attachment(f"{checked} grid points checked", "Grid coverage")
        assert checked > 0

    @pytest.mark.positive
    @allure.title("Single row when n = w + h")
    def test_single_row(self):
        frame, close = random_frame(6, 2)
        dataset = make_windows(frame, close, WindowSpec(w=3, h=3))

        assert_dataset(dataset).has_shape(1, 6)
        assert dataset.y[0] == close.iloc[5]
        assert dataset.target_dates[0] == frame.dates[5]

    @pytest.mark.positive
    @allure.title("Degenerate window w=1, h=1")
    def test_degenerate_window(self):
        frame, close = random_frame(4, 1)
        dataset = make_windows(frame, close, WindowSpec(w=1, h=1))

        assert_dataset(dataset).has_shape(3, 1)
        np.testing.assert_array_equal(dataset.X[:, 0], frame.data["f0"].to_numpy()[:3])
        np.testing.assert_array_equal(dataset.y, close.to_numpy()[1:])

    @pytest.mark.positive
    @allure.title("Feature names are indicator-major with lag ascending")
    def test_feature_order(self):
        frame, close = random_frame(20, 2)
        dataset = make_windows(frame, close, WindowSpec(w=3, h=1))

        assert dataset.feature_names == ("f0@0", "f0@1", "f0@2", "f1@0", "f1@1", "f1@2")
        assert_dataset(dataset).has_groups("f0", "f1")

    @pytest.mark.regression
    @allure.title("Every row is oracle-equal and leaks no future data")
    def test_all_rows_and_no_leak(self):
        frame, close = random_frame(100, 5, seed=9)
        dataset = make_windows(frame, close, WindowSpec(w=3, h=3))
        values = frame.data.to_numpy()

        for i in range(dataset.n_samples):
            np.testing.assert_array_equal(dataset.X[i], naive_row(values, i, 3))
            assert dataset.y[i] == close.iloc[i + 5]
        assert_dataset(dataset).dates_increasing()
        assert (dataset.target_dates - dataset.sample_dates).days.min() > 0

    @pytest.mark.regression
    @allure.title("Permuting indicator columns permutes feature blocks")
    def test_column_permutation(self):
        frame, close = random_frame(30, 3, seed=4)
        permuted = FeatureFrame(frame.data[["f2", "f0", "f1"]])
        spec = WindowSpec(w=2, h=2)
        base, moved = make_windows(frame, close, spec), make_windows(permuted, close, spec)

        blocks = np.hstack([base.select_groups([g]).X for g in ("f2", "f0", "f1")])
        np.testing.assert_array_equal(moved.X, blocks)
        np.testing.assert_array_equal(moved.y, base.y)

    @pytest.mark.negative
    def test_insufficient_history(self):
        frame, close = random_frame(5, 1)
        with pytest.raises(InsufficientHistoryError):
            make_windows(frame, close, WindowSpec(w=3, h=3))

    @pytest.mark.negative
    def test_missing_values_rejected(self):
        frame, close = random_frame(10, 1)
        holey = frame.data.copy()
        holey.iloc[4, 0] = np.nan
        with pytest.raises(SchemaError):
            make_windows(FeatureFrame(holey), close, WindowSpec(w=2, h=1))

    @pytest.mark.negative
    @pytest.mark.parametrize("w, h", [(0, 3), (3, 0), (-1, 1)])
    def test_invalid_window_spec(self, w, h):
        with pytest.raises(SchemaError):
            WindowSpec(w=w, h=h)


@allure.epic("Windowing")
@allure.feature("Window Size Sweep")
@pytest.mark.unit
class TestWindowSizeSweep:

    @pytest.mark.positive
    def test_sweep_row_and_column_counts(self):
        frame, close = random_frame(20, 2)
        sweep = window_size_sweep(frame, close, [1, 2, 3], horizon=3)

        assert sorted(sweep) == [1, 2, 3]
        for w, dataset in sweep.items():
            assert dataset.X.shape == (20 - w - 3 + 1, 2 * w)

    @pytest.mark.positive
    def test_single_size_matches_make_windows(self):
        frame, close = random_frame(20, 2)
        only = window_size_sweep(frame, close, [3], horizon=3)[3]
        direct = make_windows(frame, close, WindowSpec(w=3, h=3))

        np.testing.assert_array_equal(only.X, direct.X)
        np.testing.assert_array_equal(only.y, direct.y)


@allure.epic("Windowing")
@allure.feature("Dataset Operations")
@pytest.mark.unit
class TestDatasetOperations(BasePipelineTest):

    @pytest.mark.positive
    @allure.title("Chronological split keeps train strictly before test")
    def test_chronological_split(self):
        dataset = self.planted_dataset(m=100, n_groups=3, seed=1)
        train, test = train_test_split(dataset, 0.7)

        assert (train.n_samples, test.n_samples) == (70, 30)
        assert train.sample_dates.max() < test.sample_dates.min()

    @pytest.mark.positive
    def test_shuffled_split_is_seeded(self):
        first = split_rows(50, 0.7, shuffle=True, seed=3)
        second = split_rows(50, 0.7, shuffle=True, seed=3)

        np.testing.assert_array_equal(first[0], second[0])
        assert len(first[0]) == 35
        assert sorted(np.concatenate(first).tolist()) == list(range(50))

    @pytest.mark.negative
    @pytest.mark.parametrize("m, fraction, error", [(1, 0.7, InsufficientSamplesError), (10, 1.0, SchemaError)])
    def test_split_rejects(self, m, fraction, error):
        with pytest.raises(error):
            split_rows(m, fraction)

    @pytest.mark.positive
    def test_select_groups_keeps_column_order(self):
        dataset = self.planted_dataset(m=20, n_groups=4, width=2, seed=2)
        subset = dataset.select_groups(["g3", "g1"])

        assert subset.feature_names == ("g1@0", "g1@1", "g3@0", "g3@1")
        np.testing.assert_array_equal(subset.X, dataset.X[:, [0, 1, 4, 5]])

    @pytest.mark.negative
    def test_select_unknown_group(self):
        dataset = self.planted_dataset(m=20, n_groups=2, seed=2)
        with pytest.raises(GroupReferenceError):
            dataset.select_groups(["g9"])

    @pytest.mark.positive
    def test_by_column_groups(self):
        dataset = self.planted_dataset(m=20, n_groups=2, width=3, seed=2)
        assert dataset.group_names == ["g1", "g2"]

        frame, close = random_frame(20, 1)
        frame = FeatureFrame(frame.data.rename(columns={"f0": "bbands_lower"}), {"bbands_lower": "bbands"})
        windowed = make_windows(frame, close, WindowSpec(w=2, h=1))
        assert windowed.group_names == ["bbands"]
        assert windowed.by_column().group_names == ["bbands_lower"]

    @pytest.mark.positive
    def test_to_csv_layout(self, tmp_path):
        dataset = self.planted_dataset(m=5, n_groups=2, seed=2)
        path = dataset.to_csv(tmp_path / "windows.csv")
        written = pd.read_csv(path)

        assert list(written.columns) == ["g1@0", "g2@0", "target"]
        assert len(written) == 5
