"""
Report files and console summaries for experiment runs.

Every CSV is written with a fixed float format and ``\\n`` line endings so
that identical runs produce identical bytes. Timestamps live only in
``manifest.json``.
"""

import hashlib
import json
import platform
import time
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd
from rich.console import Console
from rich.table import Table
from tabulate import tabulate

from indicator_selection.evaluation.metrics import METRIC_NAMES
from indicator_selection.utils.logger import get_logger

FLOAT_FORMAT = "%.12g"
METRICS_COLUMNS = ["model", "method", "metric_name", "value"]
SUMMARY_COLUMNS = ["family", "selection", "n_groups", "groups", *METRIC_NAMES]
IMPROVEMENT_COLUMNS = ["family", "selection", "metric_name", "baseline", "selected", "improvement_pct"]
VERSIONED_PACKAGES = ("numpy", "pandas", "scipy", "scikit-learn", "joblib", "pydantic")


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return out


def _value(report, name: str) -> float:
    return report.get(name)


def metrics_frame(comparisons: Sequence[Any]) -> pd.DataFrame:
    """
    Long ``model,method,metric_name,value`` rows.

    Each family's all-feature baseline (method ``ALL``) appears once, before
    that family's selected-subset rows.
    """
    rows = []
    seen = set()
    for comparison in comparisons:
        family = comparison.selected.family
        if family not in seen:
            seen.add(family)
            rows.extend(
                [family, comparison.baseline.method, name, _value(comparison.baseline.report, name)]
                for name in METRIC_NAMES
            )
        rows.extend(
            [family, comparison.method, name, _value(comparison.selected.report, name)] for name in METRIC_NAMES
        )
    return pd.DataFrame(rows, columns=METRICS_COLUMNS)


def summary_frame(comparisons: Sequence[Any]) -> pd.DataFrame:
    """One row per (family, selection) with the five metrics side by side."""
    rows = []
    seen = set()
    for comparison in comparisons:
        entries = []
        if comparison.selected.family not in seen:
            seen.add(comparison.selected.family)
            entries.append((comparison.baseline.method, comparison.baseline))
        entries.append((comparison.method, comparison.selected))
        for label, model in entries:
            row = {
                "family": model.family,
                "selection": label,
                "n_groups": len(model.groups),
                "groups": ";".join(model.groups),
            }
            row.update({name: _value(model.report, name) for name in METRIC_NAMES})
            rows.append(row)
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def improvements_frame(comparisons: Sequence[Any]) -> pd.DataFrame:
    rows = []
    for comparison in comparisons:
        for name in METRIC_NAMES:
            rows.append(
                {
                    "family": comparison.selected.family,
                    "selection": comparison.method,
                    "metric_name": name,
                    "baseline": _value(comparison.baseline.report, name),
                    "selected": _value(comparison.selected.report, name),
                    "improvement_pct": comparison.improvements.get(name),
                }
            )
    return pd.DataFrame(rows, columns=IMPROVEMENT_COLUMNS).astype({"improvement_pct": float})


def package_versions() -> Dict[str, str]:
    versions = {"python": platform.python_version()}
    for name in ("indicator-selection", *VERSIONED_PACKAGES):
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class ExperimentReporter:
    """
    Writes the report tree of one run under ``out_dir``.

    Features:
    - long metrics table, wide summary and improvement percentages
    - per-family tuning tables
    - run manifest with config hash, seed, versions and file digests
    - rich console summary
    """

    def __init__(self, out_dir: Union[str, Path], config=None, profile: Optional[str] = None):
        """
        Initialize the reporter.

        Args:
            out_dir: Root of the output tree
            config: ExperimentConfig of the run (manifest only)
            profile: Profile name recorded in the manifest
        """
        self.out_dir = Path(out_dir)
        self.reports_dir = self.out_dir / "reports"
        self.config = config
        self.profile = profile
        self.logger = get_logger(self.__class__.__name__)

    def write_comparisons(self, comparisons: Sequence[Any]) -> List[Path]:
        """metrics.csv, summary.csv and improvements.csv."""
        written = [
            write_csv(metrics_frame(comparisons), self.reports_dir / "metrics.csv"),
            write_csv(summary_frame(comparisons), self.reports_dir / "summary.csv"),
            write_csv(improvements_frame(comparisons), self.reports_dir / "improvements.csv"),
        ]
        self.logger.info("reports written", directory=str(self.reports_dir), comparisons=len(comparisons))
        return written

    def write_census(self, census: pd.DataFrame) -> Path:
        return write_csv(census, self.reports_dir / "census.csv")

    def write_evaluation(self, family: str, table: pd.DataFrame) -> Path:
        return write_csv(table, self.reports_dir / f"evaluation_{family}.csv")

    def write_tuning(self, result) -> Path:
        path = result.to_csv(self.reports_dir / f"tuning_{result.family}.csv")
        self.logger.info("tuning table written", family=result.family, path=str(path))
        return path

    def write_manifest(self, extra: Optional[Dict[str, Any]] = None) -> Path:
        """
        Describe the run; the only file holding a timestamp.

        File digests cover everything under ``out_dir`` except the manifest.
        """
        path = self.out_dir / "manifest.json"
        files = sorted(
            p for p in self.out_dir.rglob("*") if p.is_file() and p != path
        )
        manifest = {
            "created_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "profile": self.profile,
            "seed": self.config.seed if self.config is not None else None,
            "config_hash": self.config.config_hash() if self.config is not None else None,
            "versions": package_versions(),
            "files": {p.relative_to(self.out_dir).as_posix(): _sha256(p) for p in files},
        }
        manifest.update(extra or {})
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def print_summary(comparisons: Sequence[Any], console: Optional[Console] = None) -> None:
    """Rich table of test metrics, selected vs baseline."""
    console = console or Console()
    table = Table(title="Prediction partition: selected subset vs all features")
    table.add_column("run")
    table.add_column("groups", justify="right")
    for name in METRIC_NAMES:
        table.add_column(name, justify="right")
        table.add_column(f"{name} gain %", justify="right")
    for comparison in comparisons:
        cells = [comparison.label, str(len(comparison.selected.groups))]
        for name in METRIC_NAMES:
            gain = comparison.improvements.get(name)
            cells.append(f"{_value(comparison.selected.report, name):.6g}")
            cells.append("-" if gain is None else f"{gain:+.2f}")
        table.add_row(*cells)
    console.print(table)


def format_table(frame: pd.DataFrame, fmt: str = "github") -> str:
    """Plain-text rendering for logs and non-interactive terminals."""
    return tabulate(frame, headers="keys", tablefmt=fmt, showindex=False, floatfmt=".6g")


def format_records(records: Iterable[Dict[str, Any]], fmt: str = "github") -> str:
    return tabulate(list(records), headers="keys", tablefmt=fmt, floatfmt=".6g")
