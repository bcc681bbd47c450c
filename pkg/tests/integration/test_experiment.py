"""
Experiment Protocol Test Suite

Partitioning, scaling, both experiment phases and the report tree of a
fast-profile run.
"""

import allure
import numpy as np
import pandas as pd
import pytest

from indicator_selection.core.base_test import BasePipelineTest
from indicator_selection.core.experiment import (
    BASELINE,
    ExperimentRunner,
    prepare_partition,
    run_experiment,
)
from indicator_selection.evaluation.metrics import METRIC_NAMES
from indicator_selection.exceptions import GroupReferenceError, PartitionError
from indicator_selection.reporting.writers import IMPROVEMENT_COLUMNS, METRICS_COLUMNS
from indicator_selection.selection.census import CENSUS_COLUMNS
from indicator_selection.selection.results import SelectionResult, load_results
from indicator_selection.utils.assertions import assert_dataset, assert_output


def all_groups_selection(groups, family="LR") -> SelectionResult:
    return SelectionResult(
        method="SFS",
        metric="mse",
        family=family,
        selected=tuple(groups),
        trace=(),
        best_score=0.0,
        best_subset=tuple(groups),
        n_fits=0,
        groups=tuple(groups),
    )


@allure.epic("Experiment")
@allure.feature("Partitions")
@pytest.mark.integration
class TestPartitions(BasePipelineTest):

    @pytest.fixture(autouse=True)
    def runner(self, fast_config):
        self.runner = ExperimentRunner(fast_config)
        self.fast_config = fast_config

    @pytest.mark.smoke
    @pytest.mark.positive
    @allure.title("Fraction split keeps selection strictly before prediction")
    def test_fraction_split(self):
        selection, prediction = self.runner.frames

        assert selection.dates.max() < prediction.dates.min()
        assert len(selection) == int(np.floor((len(selection) + len(prediction)) * 0.5))
        assert selection.group_names == prediction.group_names
        assert len(selection.group_names) == 12

    @pytest.mark.positive
    def test_dated_split(self):
        config = self.experiment_config(data__selection_end="2010-08-31", data__prediction_start="2010-09-01")
        selection, prediction = ExperimentRunner(config).frames

        assert selection.dates.max() <= pd.Timestamp("2010-08-31")
        assert prediction.dates.min() >= pd.Timestamp("2010-09-01")

    @pytest.mark.negative
    def test_empty_dated_partition(self):
        config = self.experiment_config(data__selection_end="2001-12-31", data__prediction_start="2002-01-01")
        with pytest.raises(PartitionError):
            ExperimentRunner(config).frames

    @pytest.mark.regression
    @allure.title("Training windows precede test windows and scale into [0, 1]")
    def test_chronological_train_only_scaling(self):
        for partition in self.runner.partitions:
            train, test = partition.train, partition.test

            assert len(partition.train_rows) + len(partition.test_rows) == partition.dataset.n_samples
            assert train.sample_dates.max() < test.sample_dates.min()
            assert train.X.min() >= -1e-12 and train.X.max() <= 1.0 + 1e-12
            assert train.y.min() >= -1e-12 and train.y.max() <= 1.0 + 1e-12
            assert_dataset(partition.dataset).has_no_missing()

    @pytest.mark.positive
    def test_raw_targets(self):
        config = self.experiment_config(data__scale_target=False)
        partition = ExperimentRunner(config).prediction_partition

        assert partition.target_scaler is None
        np.testing.assert_array_equal(partition.dataset.y, partition.close.reindex(partition.dataset.target_dates))

    @pytest.mark.negative
    def test_too_few_rows(self):
        selection, _ = self.runner.frames
        tiny = selection.with_data(selection.data.iloc[:6].copy())
        with pytest.raises(PartitionError):
            prepare_partition("selection", tiny, self.runner.series.close, self.fast_config)

    @pytest.mark.negative
    def test_fewer_samples_than_folds(self):
        config = self.experiment_config(selection__cv_folds=500)
        with pytest.raises(PartitionError):
            ExperimentRunner(config).run_selection_phase()


@allure.epic("Experiment")
@allure.feature("Experiment Phases")
@pytest.mark.integration
class TestExperimentPhases(BasePipelineTest):

    @pytest.mark.smoke
    @pytest.mark.positive
    @allure.title("A one-cell matrix writes one selection result")
    def test_single_run_matrix(self, tmp_path, ohlcv_csv):
        config = self.experiment_config(
            tmp_path=tmp_path,
            data__input=str(ohlcv_csv),
            selection__methods=["SFS"],
            selection__families=["LR"],
            selection__metrics=["mse"],
        )
        results = ExperimentRunner(config).run_selection_phase(tmp_path)

        assert [r.label for r in results] == ["SFS_LR_mse"]
        assert [r.label for r in load_results(tmp_path / "selection")] == ["SFS_LR_mse"]
        assert results[0].n_fits == 5 * 12 * 13 // 2
        assert set(results[0].catalogue_numbers) == set(results[0].groups)

    @pytest.mark.regression
    @allure.title("Selecting every group improves on the baseline by exactly 0%")
    def test_all_groups_zero_improvement(self, fast_config):
        runner = ExperimentRunner(fast_config)
        groups = runner.prediction_partition.dataset.group_names
        comparisons = runner.run_prediction_phase([all_groups_selection(groups), all_groups_selection(groups, "Ridge")])

        for comparison in comparisons:
            np.testing.assert_array_equal(comparison.selected.y_pred, comparison.baseline.y_pred)
            assert comparison.baseline.method == BASELINE
            for name in METRIC_NAMES:
                assert comparison.improvements[name] in (0.0, None)
            assert comparison.improvements["mse"] == 0.0

    @pytest.mark.negative
    def test_unknown_group_reference(self, fast_config):
        with pytest.raises(GroupReferenceError):
            ExperimentRunner(fast_config).run_prediction_phase([all_groups_selection(["sma", "nonexistent"])])

    @pytest.mark.positive
    def test_window_sweep(self, fast_config):
        sweep = ExperimentRunner(fast_config).run_window_sweep()

        assert sweep["w"].tolist() == [1, 2, 3, 5]
        assert (sweep["n_features"] == sweep["w"] * sweep["n_features"].iloc[0]).all()
        assert sweep["n_samples"].is_monotonic_decreasing
        assert ExperimentRunner(fast_config).run_window_sweep([]).empty


@allure.epic("Experiment")
@allure.feature("Fast Experiment")
@pytest.mark.integration
class TestFastExperiment(BasePipelineTest):

    @pytest.mark.acceptance
    @allure.title("Fast profile run writes every report and plot")
    def test_fast_profile_outputs(self, fast_config):
        outcome = run_experiment(fast_config, profile="fast")
        out = fast_config.out_dir
        labels = [f"{m}_{f}_mse" for m in ("SFS", "SBS") for f in ("LR", "Ridge", "KNN", "DTR")]

        assert [r.label for r in outcome.selections] == labels
        assert_output(out).has_files(
            *(f"selection/{label}.json" for label in labels),
            *(f"plots/pred_vs_actual_{label}.{ext}" for label in labels for ext in ("csv", "svg")),
            "reports/metrics.csv",
            "reports/summary.csv",
            "reports/improvements.csv",
            "reports/census.csv",
            "plots/window_size_mse.csv",
            "plots/window_size_mse.svg",
            "plots/top_indicators.csv",
            "plots/top_indicators.svg",
            "manifest.json",
        ).csv_has_columns("reports/metrics.csv", METRICS_COLUMNS).csv_has_columns(
            "reports/census.csv", CENSUS_COLUMNS
        )
        assert all(path.is_file() for path in outcome.files)

        metrics = pd.read_csv(out / "reports" / "metrics.csv")
        assert len(metrics) == 5 * (4 + 8)
        census = pd.read_csv(out / "reports" / "census.csv")
        assert len(census) == 12
        assert census["percentage"].is_monotonic_decreasing

    @pytest.mark.regression
    @allure.title("Improvement percentages are recomputable from the report")
    def test_improvement_arithmetic(self, fast_config):
        run_experiment(fast_config, profile="fast")
        table = pd.read_csv(fast_config.out_dir / "reports" / "improvements.csv")
        assert list(table.columns) == IMPROVEMENT_COLUMNS

        for row in table.itertuples():
            if pd.isna(row.improvement_pct):
                continue
            if row.metric_name == "r2":
                expected = 100.0 * (row.selected - row.baseline) / abs(row.baseline)
            else:
                expected = 100.0 * (row.baseline - row.selected) / row.baseline
            assert row.improvement_pct == pytest.approx(expected, rel=1e-9, abs=1e-9)
