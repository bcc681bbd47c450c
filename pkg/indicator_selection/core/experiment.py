"""
Two-phase experiment protocol.

Indicators are computed once on the whole price history, warm-up rows are
dropped, and the remaining frame is cut into a selection partition and a
later prediction partition. Selection runs on the first; models trained on
the selected groups are compared against all-feature baselines on the
second.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from indicator_selection.config.models import ExperimentConfig
from indicator_selection.core.windowing import WindowedDataset, WindowSpec, make_windows, split_rows
from indicator_selection.data.factory import DataFactory
from indicator_selection.data.ingest import (
    ScalerParams,
    impute_missing,
    load_ohlcv,
    minmax_fit,
    minmax_transform,
    scale_target,
)
from indicator_selection.data.series import FeatureFrame, PriceSeries
from indicator_selection.evaluation.metrics import METRIC_NAMES, MetricReport, improvement, metrics
from indicator_selection.exceptions import PartitionError
from indicator_selection.indicators.registry import IndicatorRegistry, compute_all, drop_warmup
from indicator_selection.models.base import RegressorModel, fit
from indicator_selection.models.config import RegressorConfig
from indicator_selection.reporting.plots import emit_plots
from indicator_selection.reporting.writers import ExperimentReporter
from indicator_selection.selection.census import top_indicator_census
from indicator_selection.selection.results import SelectionResult, save_result
from indicator_selection.selection.sequential import run_selection
from indicator_selection.utils.logger import get_logger

logger = get_logger(__name__)

BASELINE = "ALL"


@dataclass(frozen=True)
class PartitionData:
    """
    One partition, windowed and scaled.

    Attributes:
        name: ``selection`` or ``prediction``
        frame: Imputed, unscaled indicator values
        close: Raw close on the frame's dates
        dataset: Scaled windows over the whole partition
        train_rows: Dataset rows of the training split
        test_rows: Dataset rows of the test split
        target_scaler: Close scaler, None when targets stay raw
    """

    name: str
    frame: FeatureFrame
    close: pd.Series
    dataset: WindowedDataset
    train_rows: np.ndarray
    test_rows: np.ndarray
    target_scaler: Optional[ScalerParams] = None

    @property
    def train(self) -> WindowedDataset:
        return self.dataset.take(self.train_rows)

    @property
    def test(self) -> WindowedDataset:
        return self.dataset.take(self.test_rows)


@dataclass(frozen=True)
class ModelReport:
    """Test-split evaluation of one fitted model."""

    family: str
    method: str
    groups: Tuple[str, ...]
    report: MetricReport
    test_dates: pd.DatetimeIndex
    y_true: np.ndarray
    y_pred: np.ndarray
    model: Optional[RegressorModel] = None


@dataclass(frozen=True)
class PredictionComparison:
    """Selected-subset model against the same family on all features."""

    selection: SelectionResult
    selected: ModelReport
    baseline: ModelReport
    improvements: Dict[str, Optional[float]] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return self.selection.label

    @property
    def method(self) -> str:
        return f"{self.selection.method}_{self.selection.metric}"


def load_prices(config: ExperimentConfig, factory: Optional[DataFactory] = None) -> PriceSeries:
    """Read the configured CSV, or generate the synthetic random walk, and impute gaps."""
    if config.data.synthetic:
        factory = factory or DataFactory(seed=config.seed)
        series = factory.create_ohlcv(n_days=config.data.synthetic_days, seed=config.seed)
        logger.info("synthetic prices generated", days=len(series), seed=config.seed)
    else:
        series = load_ohlcv(config.data.input)
        logger.info("prices loaded", path=config.data.input, days=len(series))
    return impute_missing(series)


def build_features(
    series: PriceSeries,
    config: ExperimentConfig,
    registry: Optional[IndicatorRegistry] = None,
) -> FeatureFrame:
    """Every configured indicator with the warm-up rows removed."""
    specs = config.indicator_specs(registry)
    return drop_warmup(compute_all(specs, series, registry))


def split_partitions(frame: FeatureFrame, config: ExperimentConfig) -> Tuple[FeatureFrame, FeatureFrame]:
    """
    Cut the frame into selection and prediction partitions.

    Configured dates win; otherwise the first ``selection_fraction`` of the
    rows select and the rest predict.

    Raises:
        PartitionError: a partition is empty
    """
    data = config.data
    if data.dated_partitions:
        selection = frame.slice(data.selection_start, data.selection_end)
        prediction = frame.slice(data.prediction_start, data.prediction_end)
    else:
        n_selection = int(np.floor(len(frame) * data.selection_fraction))
        selection = frame.with_data(frame.data.iloc[:n_selection].copy())
        prediction = frame.with_data(frame.data.iloc[n_selection:].copy())

    for name, part in (("selection", selection), ("prediction", prediction)):
        if len(part) == 0:
            raise PartitionError(f"{name} partition holds no rows after warm-up removal")
    logger.info(
        "partitions",
        selection=f"{selection.dates[0].date()}..{selection.dates[-1].date()} ({len(selection)} rows)",
        prediction=f"{prediction.dates[0].date()}..{prediction.dates[-1].date()} ({len(prediction)} rows)",
    )
    return selection, prediction


def prepare_partition(
    name: str,
    frame: FeatureFrame,
    close: pd.Series,
    config: ExperimentConfig,
    window: Optional[WindowSpec] = None,
) -> PartitionData:
    """
    Impute, split and Min-Max scale one partition, then window it.

    With ``scaler_fit: train`` the feature scaler only sees the days covered
    by training windows and the target scaler only the training targets.

    Raises:
        PartitionError: fewer than two windows fit in the partition
    """
    spec = window or WindowSpec(w=config.window.w, h=config.window.h)
    frame = impute_missing(frame)
    close = close.reindex(frame.dates)
    n = len(frame)
    m = spec.n_samples(n)
    if m < 2:
        raise PartitionError(
            f"{name} partition has {n} rows; w={spec.w}, h={spec.h} needs at least {spec.w + spec.h + 1}"
        )

    train_rows, test_rows = split_rows(m, config.data.train_fraction, config.data.shuffle_split, config.seed)

    if config.data.scaler_fit == "train":
        feature_mask = np.zeros(n, dtype=bool)
        for offset in range(spec.w):
            feature_mask[train_rows + offset] = True
        target_mask = np.zeros(n, dtype=bool)
        target_mask[train_rows + spec.w - 1 + spec.h] = True
    else:
        feature_mask = target_mask = np.ones(n, dtype=bool)

    scaled = minmax_transform(frame, minmax_fit(frame.data[feature_mask]))
    target_scaler = None
    targets = close
    if config.data.scale_target:
        targets, target_scaler = scale_target(close, target_mask)

    dataset = make_windows(scaled, targets, spec)
    logger.debug("partition prepared", partition=name, samples=m, train=len(train_rows), test=len(test_rows))
    return PartitionData(
        name=name,
        frame=frame,
        close=close,
        dataset=dataset,
        train_rows=train_rows,
        test_rows=test_rows,
        target_scaler=target_scaler,
    )


def evaluate_model(
    regressor: RegressorConfig,
    partition: PartitionData,
    method: str,
    groups: Optional[Sequence[str]] = None,
) -> ModelReport:
    """Fit on the partition's training split (optionally restricted to groups) and score the test split."""
    train, test = partition.train, partition.test
    if groups is not None:
        train, test = train.select_groups(groups), test.select_groups(groups)
    model = fit(regressor, train.X, train.y, feature_names=train.feature_names)
    y_pred = model.predict(test.X)
    return ModelReport(
        family=regressor.family,
        method=method,
        groups=tuple(groups) if groups is not None else tuple(partition.dataset.group_names),
        report=metrics(test.y, y_pred),
        test_dates=test.target_dates,
        y_true=test.y,
        y_pred=y_pred,
        model=model,
    )


class ExperimentRunner:
    """
    Runs the selection and prediction phases for one configuration.

    Features:
    - price loading (CSV or synthetic) and indicator assembly, done once
    - selection matrix over the selection partition
    - selected-vs-baseline comparison on the prediction partition
    - window-size sweep on the prediction partition
    """

    def __init__(
        self,
        config: ExperimentConfig,
        registry: Optional[IndicatorRegistry] = None,
        factory: Optional[DataFactory] = None,
    ):
        self.config = config
        self.registry = registry
        self.factory = factory
        self.logger = get_logger(self.__class__.__name__)
        self._partitions: Optional[Tuple[PartitionData, PartitionData]] = None
        self._frames: Optional[Tuple[FeatureFrame, FeatureFrame]] = None
        self._series: Optional[PriceSeries] = None

    @property
    def series(self) -> PriceSeries:
        if self._series is None:
            self._series = load_prices(self.config, self.factory)
        return self._series

    @property
    def frames(self) -> Tuple[FeatureFrame, FeatureFrame]:
        if self._frames is None:
            features = build_features(self.series, self.config, self.registry)
            self._frames = split_partitions(features, self.config)
        return self._frames

    @property
    def partitions(self) -> Tuple[PartitionData, PartitionData]:
        if self._partitions is None:
            close = self.series.close
            selection, prediction = self.frames
            self._partitions = (
                prepare_partition("selection", selection, close, self.config),
                prepare_partition("prediction", prediction, close, self.config),
            )
        return self._partitions

    @property
    def selection_partition(self) -> PartitionData:
        return self.partitions[0]

    @property
    def prediction_partition(self) -> PartitionData:
        return self.partitions[1]

    def run_selection_phase(self, out_dir: Optional[Path] = None) -> List[SelectionResult]:
        """
        Run every (method, family, metric) selection on the selection partition.

        Results are saved to ``<out>/selection`` when ``out_dir`` is given.

        Raises:
            PartitionError: fewer windowed samples than CV folds
        """
        partition = self.selection_partition
        dataset = partition.train if self.config.selection.scope == "train" else partition.dataset
        folds = self.config.selection.cv_folds
        if dataset.n_samples < folds:
            raise PartitionError(
                f"selection data has {dataset.n_samples} samples, fewer than {folds} CV folds"
            )

        results = []
        configs = self.config.selection_configs()
        for index, selection_config in enumerate(configs, start=1):
            self.logger.info("selection run", run=f"{index}/{len(configs)}", label=selection_config.label)
            result = run_selection(dataset, selection_config, self.registry)
            if out_dir is not None:
                save_result(result, Path(out_dir) / "selection")
            results.append(result)
        return results

    def run_prediction_phase(self, selections: Sequence[SelectionResult]) -> List[PredictionComparison]:
        """
        Train each selection's family on its best subset and on all features.

        Raises:
            GroupReferenceError: a selection names a group absent from the roster
        """
        partition = self.prediction_partition
        baselines: Dict[str, ModelReport] = {}
        comparisons = []
        for selection in selections:
            regressor = self.config.regressor_config(selection.family)
            if selection.family not in baselines:
                baselines[selection.family] = evaluate_model(regressor, partition, BASELINE)
            baseline = baselines[selection.family]
            selected = evaluate_model(
                regressor, partition, f"{selection.method}_{selection.metric}", selection.best_subset
            )
            gains = {
                name: improvement(baseline.report.get(name), selected.report.get(name), name)
                for name in METRIC_NAMES
            }
            comparisons.append(PredictionComparison(selection, selected, baseline, gains))
            self.logger.info(
                "prediction compared",
                label=selection.label,
                groups=len(selection.best_subset),
                mse=selected.report.mse,
                baseline_mse=baseline.report.mse,
            )
        return comparisons

    def run_window_sweep(self, sizes: Optional[Sequence[int]] = None) -> pd.DataFrame:
        """
        Test MSE of ``window.sweep_family`` on all features for each window size.

        Returns:
            Frame with columns w, n_samples, n_features, mse (empty when no sizes)
        """
        sizes = list(self.config.window.sweep_sizes if sizes is None else sizes)
        columns = ["w", "n_samples", "n_features", "mse"]
        if not sizes:
            return pd.DataFrame(columns=columns)

        regressor = self.config.regressor_config(self.config.window.sweep_family)
        _, frame = self.frames
        rows = []
        for w in sizes:
            partition = prepare_partition(
                "prediction", frame, self.series.close, self.config, WindowSpec(w=int(w), h=self.config.window.h)
            )
            report = evaluate_model(regressor, partition, BASELINE)
            rows.append(
                {
                    "w": int(w),
                    "n_samples": partition.dataset.n_samples,
                    "n_features": partition.dataset.n_features,
                    "mse": report.report.mse,
                }
            )
        self.logger.info("window sweep finished", family=regressor.family, sizes=sizes)
        return pd.DataFrame(rows, columns=columns)


@dataclass(frozen=True)
class ExperimentOutcome:
    selections: List[SelectionResult]
    comparisons: List[PredictionComparison]
    sweep: pd.DataFrame
    census: pd.DataFrame
    files: List[Path]


def run_selection_phase(config: ExperimentConfig, out_dir: Optional[Path] = None) -> List[SelectionResult]:
    return ExperimentRunner(config).run_selection_phase(out_dir)


def run_prediction_phase(
    config: ExperimentConfig, selections: Sequence[SelectionResult]
) -> List[PredictionComparison]:
    return ExperimentRunner(config).run_prediction_phase(selections)


def run_experiment(
    config: ExperimentConfig,
    profile: Optional[str] = None,
    runner: Optional[ExperimentRunner] = None,
) -> ExperimentOutcome:
    """
    Both phases, the window sweep, every report and plot, then the manifest.

    Layout under ``output.dir``: ``selection/<label>.json``,
    ``reports/{metrics,summary,improvements,census}.csv``,
    ``plots/*.csv|*.svg`` and ``manifest.json``.
    """
    out = config.out_dir
    runner = runner or ExperimentRunner(config)
    reporter = ExperimentReporter(out, config, profile)

    selections = runner.run_selection_phase(out)
    comparisons = runner.run_prediction_phase(selections)
    census = top_indicator_census(selections)
    sweep = runner.run_window_sweep()

    files = [out / "selection" / f"{result.label}.json" for result in selections]
    files += reporter.write_comparisons(comparisons)
    files.append(reporter.write_census(census))
    if config.output.plots:
        files += emit_plots(comparisons, sweep, census, out)
    files.append(reporter.write_manifest())
    logger.info("experiment finished", runs=len(selections), out=str(out))
    return ExperimentOutcome(selections, comparisons, sweep, census, files)
