"""
Plot data files and self-contained SVG line charts.

Each plot is a CSV plus an SVG rendered from ``templates/line_chart.svg.j2``.
"""

from pathlib import Path
from typing import Any, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
from jinja2 import Environment, FileSystemLoader, select_autoescape

from indicator_selection.reporting.writers import write_csv
from indicator_selection.utils.logger import get_logger

logger = get_logger(__name__)

TEMPLATE_DIR = Path(__file__).parent / "templates"
TOP_INDICATORS = 30
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")

_environment = Environment(
    loader=FileSystemLoader(str(TEMPLATE_DIR)),
    autoescape=select_autoescape(enabled_extensions=("j2", "svg")),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def render_line_chart(
    title: str,
    x_labels: Sequence[Any],
    series: Mapping[str, Sequence[float]],
    x_label: str = "",
    y_label: str = "",
    width: int = 720,
    height: int = 360,
) -> str:
    """
    Render one or more equally long series as polylines.

    Points are spaced evenly along x; non-finite values are left out of
    their line.
    """
    left, right, top, bottom = 64, width - 16, 36, height - 40
    values = [np.asarray(v, dtype=float) for v in series.values()]
    finite = np.concatenate([v[np.isfinite(v)] for v in values]) if values else np.array([])
    y_lo, y_hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    n = max((len(v) for v in values), default=0)
    step = (right - left) / max(n - 1, 1)

    lines = []
    for k, (name, ys) in enumerate(zip(series.keys(), values)):
        points = [
            f"{left + i * step:.2f},{bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top):.2f}"
            for i, y in enumerate(ys)
            if np.isfinite(y)
        ]
        lines.append({"name": name, "color": PALETTE[k % len(PALETTE)], "points": " ".join(points)})

    return _environment.get_template("line_chart.svg.j2").render(
        title=title,
        width=width,
        height=height,
        left=left,
        right=right,
        top=top,
        bottom=bottom,
        y_min=f"{y_lo:.4g}",
        y_max=f"{y_hi:.4g}",
        x_first=str(x_labels[0]) if len(x_labels) else "",
        x_last=str(x_labels[-1]) if len(x_labels) else "",
        x_label=x_label,
        y_label=y_label,
        lines=lines,
    )


def write_chart(
    frame: pd.DataFrame,
    path: Union[str, Path],
    title: str,
    x_column: str,
    y_columns: Sequence[str],
    y_label: str = "",
) -> List[Path]:
    """Write ``<path>.csv`` and ``<path>.svg`` for one chart."""
    base = Path(path)
    csv_path = write_csv(frame, base.with_suffix(".csv"))
    svg = render_line_chart(
        title,
        frame[x_column].astype(str).tolist(),
        {column: frame[column].to_numpy(dtype=float) for column in y_columns},
        x_label=x_column,
        y_label=y_label,
    )
    svg_path = base.with_suffix(".svg")
    svg_path.write_text(svg, encoding="utf-8")
    return [csv_path, svg_path]


def prediction_frame(comparison) -> pd.DataFrame:
    """Test-split actual vs selected-subset and all-feature predictions."""
    return pd.DataFrame(
        {
            "date": comparison.selected.test_dates.strftime("%Y-%m-%d"),
            "actual": comparison.selected.y_true,
            "selected": comparison.selected.y_pred,
            "baseline": comparison.baseline.y_pred,
        }
    )


def emit_plots(
    comparisons: Sequence[Any],
    sweep: Optional[pd.DataFrame],
    census: Optional[pd.DataFrame],
    out_dir: Union[str, Path],
    top: int = TOP_INDICATORS,
) -> List[Path]:
    """
    Write every plot of a run under ``<out_dir>/plots``.

    - ``pred_vs_actual_<label>`` per compared model
    - ``window_size_mse`` for the window sweep (skipped with a warning when empty)
    - ``top_indicators`` for the first ``top`` rows of the best-subset census

    Returns:
        Written paths in creation order
    """
    plots = Path(out_dir) / "plots"
    written: List[Path] = []

    for comparison in comparisons:
        written += write_chart(
            prediction_frame(comparison),
            plots / f"pred_vs_actual_{comparison.label}",
            f"{comparison.label}: predicted vs actual close",
            "date",
            ["actual", "selected", "baseline"],
            y_label="close",
        )

    if sweep is None or sweep.empty:
        logger.warning("window sweep is empty; no window-size plot written")
    else:
        written += write_chart(sweep, plots / "window_size_mse", "Test MSE by window size", "w", ["mse"], "MSE")

    if census is None or census.empty:
        logger.warning("no selection results; no indicator census plot written")
    else:
        written += write_chart(
            census.head(top),
            plots / "top_indicators",
            "Share of runs selecting each indicator",
            "indicator",
            ["percentage"],
            y_label="% of runs",
        )

    logger.info("plots written", directory=str(plots), files=len(written))
    return written
