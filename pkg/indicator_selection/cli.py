"""
Command line interface: ``indsel <command>``.

Global flags are read once by the group; every command loads the layered
configuration through ``CliState.load``. Pipeline errors become exit codes
1 (configuration), 2 (data) or 3 (numeric).
"""

import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import click
import pandas as pd
from rich.console import Console

from indicator_selection import __version__
from indicator_selection.config.manager import PROFILES
from indicator_selection.config.models import ExperimentConfig, load_experiment_config
from indicator_selection.core.experiment import (
    ExperimentRunner,
    build_features,
    load_prices,
    run_experiment,
)
from indicator_selection.data.ingest import impute_missing, load_ohlcv
from indicator_selection.evaluation.grid_search import grid_search
from indicator_selection.evaluation.metrics import METRIC_NAMES, metrics
from indicator_selection.exceptions import ConfigError, IndicatorSelectionError, OutputWriteError
from indicator_selection.indicators.registry import NATIVE_REGISTRY
from indicator_selection.models.base import fit
from indicator_selection.models.persistence import load_model, save_model
from indicator_selection.reporting.plots import emit_plots
from indicator_selection.reporting.writers import ExperimentReporter, format_records, format_table, print_summary
from indicator_selection.selection.census import top_indicator_census
from indicator_selection.selection.results import load_result, load_results
from indicator_selection.utils.logger import get_logger, setup_logging

logger = get_logger(__name__)


@dataclass
class CliState:
    """Global flags shared by every command."""

    config_file: Optional[str] = None
    profile: Optional[str] = None
    seed: Optional[int] = None
    fast: bool = False
    out_dir: Optional[str] = None
    log_level: Optional[str] = None

    def load(self, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
        """Merged, validated configuration with the command line applied last."""
        profile = self.profile or ("fast" if self.fast else None)
        explicit = {
            "experiment.seed": self.seed,
            "experiment.fast": True if self.fast else None,
            "output.dir": self.out_dir,
        }
        explicit.update(overrides or {})
        config = load_experiment_config(profile, self.config_file, explicit)
        setup_logging(
            level=self.log_level or config.logging.level,
            log_file=config.logging.file,
            enable_colors=config.logging.enable_colors,
        )
        return config

    @property
    def profile_name(self) -> str:
        return self.profile or ("fast" if self.fast else "default")


class PipelineGroup(click.Group):
    """Maps pipeline errors to their exit codes; file system errors exit as data errors."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except IndicatorSelectionError as exc:
            self._fail(ctx, exc)
        except OSError as exc:
            self._fail(ctx, OutputWriteError(str(exc)))

    @staticmethod
    def _fail(ctx: click.Context, exc: IndicatorSelectionError):
        logger.error("command failed", error=type(exc).__name__, message=str(exc))
        click.echo(f"error: {exc}", err=True)
        ctx.exit(exc.exit_code)


def _echo_table(rows: Sequence[Dict[str, Any]]) -> None:
    click.echo(format_records(rows))


@click.group(cls=PipelineGroup)
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
              help="Experiment file (YAML or INI)")
@click.option("--profile", type=click.Choice(PROFILES), default=None, help="Configuration profile")
@click.option("--seed", type=int, default=None, help="Global seed")
@click.option("--fast", is_flag=True, default=False, help="Desk-scale run (fast profile, capped ensembles)")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Output directory")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=None, help="Logging level")
@click.version_option(__version__, prog_name="indsel")
@click.pass_context
def cli(ctx, config_file, profile, seed, fast, out_dir, log_level):
    """Technical-indicator selection for stock price regression."""
    ctx.obj = CliState(config_file, profile, seed, fast, out_dir, log_level)


@cli.command()
@click.argument("input_path", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Cleaned CSV path")
@click.pass_obj
def ingest(state: CliState, input_path, output):
    """Load, validate and impute an OHLCV CSV (or the synthetic series)."""
    config = state.load()
    if input_path:
        raw = load_ohlcv(input_path)
        missing = int(raw.data.isna().sum().sum())
        series = impute_missing(raw)
    else:
        missing = 0
        series = load_prices(config)
    path = series.to_csv(output or config.out_dir / "data" / "prices.csv")
    _echo_table(
        [
            {
                "rows": len(series),
                "first": series.dates[0].date(),
                "last": series.dates[-1].date(),
                "imputed_cells": missing,
                "written": str(path),
            }
        ]
    )


@cli.command()
@click.option("--roster", type=click.Path(exists=True, dir_okay=False), default=None, help="Roster file")
@click.option("--list", "list_only", is_flag=True, default=False, help="List registered indicators")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Feature CSV path")
@click.pass_obj
def indicators(state: CliState, roster, list_only, output):
    """Compute the indicator roster into a feature CSV."""
    config = state.load({"indicators.roster": roster})
    if list_only:
        rows = []
        for spec in NATIVE_REGISTRY.default_specs():
            definition = NATIVE_REGISTRY.get(spec.name)
            spec = NATIVE_REGISTRY.resolve(spec)
            rows.append(
                {
                    "number": definition.catalogue_number,
                    "name": spec.name,
                    "category": definition.category,
                    "defaults": str(spec),
                    "outputs": len(spec.outputs),
                    "warmup": NATIVE_REGISTRY.warmup(spec),
                }
            )
        _echo_table(rows)
        return

    frame = build_features(load_prices(config), config)
    path = frame.to_csv(output or config.out_dir / "data" / "features.csv")
    _echo_table(
        [
            {"group": g, "columns": len(frame.columns_of(g))}
            for g in frame.group_names
        ]
    )
    click.echo(f"{len(frame)} rows x {len(frame.columns)} columns -> {path}")


@cli.command()
@click.option("--w", "w", type=int, default=None, help="Window size in days")
@click.option("--h", "h", type=int, default=None, help="Target horizon in days")
@click.option("--partition", type=click.Choice(["selection", "prediction"]), default="selection")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Windowed CSV path")
@click.pass_obj
def window(state: CliState, w, h, partition, output):
    """Build the scaled w-day windowed dataset of one partition."""
    config = state.load({"window.w": w, "window.h": h})
    runner = ExperimentRunner(config)
    data = runner.selection_partition if partition == "selection" else runner.prediction_partition
    path = data.dataset.to_csv(output or config.out_dir / "data" / f"windows_{partition}.csv")
    _echo_table(
        [
            {
                "partition": partition,
                "samples": data.dataset.n_samples,
                "features": data.dataset.n_features,
                "train": len(data.train_rows),
                "test": len(data.test_rows),
                "written": str(path),
            }
        ]
    )


def _matrix_overrides(methods, families, metric_names) -> Dict[str, Any]:
    return {
        "selection.methods": list(methods) or None,
        "selection.families": list(families) or None,
        "selection.metrics": list(metric_names) or None,
    }


@cli.command()
@click.option("--method", "methods", multiple=True, help="SFS or SBS (repeatable)")
@click.option("--family", "families", multiple=True, help="Regressor family (repeatable)")
@click.option("--metric", "metric_names", multiple=True, help="Selection metric (repeatable)")
@click.pass_obj
def select(state: CliState, methods, families, metric_names):
    """Run wrapper selection on the selection partition."""
    config = state.load(_matrix_overrides(methods, families, metric_names))
    results = ExperimentRunner(config).run_selection_phase(config.out_dir)
    _echo_table(
        [
            {
                "run": r.label,
                "best_score": r.best_score,
                "groups": len(r.best_subset),
                "best_subset": ",".join(r.best_subset),
                "fits": r.n_fits,
            }
            for r in results
        ]
    )


@cli.command()
@click.option("--family", default=None, help="Regressor family")
@click.option("--selection", "selection_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="SelectionResult JSON restricting the features")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Model artifact path")
@click.pass_obj
def train(state: CliState, family, selection_path, output):
    """Fit one regressor on the prediction partition's training split."""
    config = state.load()
    selection = load_result(selection_path) if selection_path else None
    family = family or (selection.family if selection else None)
    if family is None:
        raise ConfigError("train needs --family or --selection")

    regressor = config.regressor_config(family)
    data = ExperimentRunner(config).prediction_partition.train
    if selection is not None:
        data = data.select_groups(selection.best_subset)
    model = fit(regressor, data.X, data.y, feature_names=data.feature_names)
    path = save_model(model, output or config.out_dir / "models" / f"{regressor.family}.bin")
    _echo_table(
        [
            {
                "family": model.family,
                "samples": data.n_samples,
                "features": model.n_features,
                "iterations": model.n_iter,
                "converged": model.converged,
                "written": str(path),
            }
        ]
    )


@cli.command()
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Model artifact written by train")
@click.pass_obj
def evaluate(state: CliState, model_path):
    """Score a saved model on the prediction partition's test split."""
    config = state.load()
    model = load_model(model_path)
    test = ExperimentRunner(config).prediction_partition.test
    if model.feature_names:
        test = test.select_features(model.feature_names)
    report = metrics(test.y, model.predict(test.X))
    rows = [{"metric_name": name, "value": report.get(name)} for name in METRIC_NAMES]
    _echo_table([{"model": model.family, **row} for row in rows])
    ExperimentReporter(config.out_dir).write_evaluation(model.family, pd.DataFrame(rows))


@cli.command("run-experiment")
@click.pass_obj
def run_experiment_command(state: CliState):
    """Selection phase, prediction phase, reports, plots and manifest."""
    config = state.load()
    outcome = run_experiment(config, profile=state.profile_name)
    print_summary(outcome.comparisons, Console())
    click.echo(f"{len(outcome.selections)} selection runs, {len(outcome.files)} files under {config.out_dir}")


@cli.command()
@click.option("--selection-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory of SelectionResult JSON files (default <out>/selection)")
@click.pass_obj
def report(state: CliState, selection_dir):
    """Re-run the prediction phase and reports from saved selection results."""
    config = state.load()
    selections = load_results(selection_dir or config.out_dir / "selection")
    if not selections:
        raise ConfigError("no selection results found; run `indsel select` first")
    runner = ExperimentRunner(config)
    comparisons = runner.run_prediction_phase(selections)
    census = top_indicator_census(selections)

    reporter = ExperimentReporter(config.out_dir, config, state.profile_name)
    reporter.write_comparisons(comparisons)
    reporter.write_census(census)
    if config.output.plots:
        emit_plots(comparisons, runner.run_window_sweep(), census, config.out_dir)
    reporter.write_manifest()
    click.echo(format_table(census))


@cli.command()
@click.option("--family", "families", multiple=True, help="Family to tune (default: every configured grid)")
@click.pass_obj
def tune(state: CliState, families):
    """Repeated K-fold grid search on the prediction partition's training split."""
    config = state.load()
    grids = config.tuning.grids
    chosen: List[str] = [config.regressor_config(f).family for f in families] or list(grids)
    missing = [f for f in chosen if f not in grids]
    if missing:
        raise ConfigError(f"no tuning grid configured for {missing}")

    train_data = ExperimentRunner(config).prediction_partition.train
    reporter = ExperimentReporter(config.out_dir)
    rows = []
    for family in chosen:
        result = grid_search(
            grids[family],
            family,
            train_data.X,
            train_data.y,
            K=config.tuning.K,
            repeats=config.tuning.repeats,
            metric=config.tuning.metric,
            seed=config.seed,
            base_params=config.regressor_config(family).params,
            n_jobs=config.tuning.n_jobs,
        )
        reporter.write_tuning(result)
        rows.append({"family": family, "best": result.best_params, config.tuning.metric: result.best_score})
    _echo_table(rows)


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Console-script entry point."""
    try:
        code = cli.main(args=list(argv) if argv is not None else None, prog_name="indsel", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(ConfigError.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.Abort:
        click.echo("aborted", err=True)
        sys.exit(1)
    sys.exit(code if isinstance(code, int) else 0)


if __name__ == "__main__":
    main()
