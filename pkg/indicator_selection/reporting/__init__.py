"""
Report tables, run manifests and SVG charts.
"""

from indicator_selection.reporting.plots import emit_plots, render_line_chart
from indicator_selection.reporting.writers import ExperimentReporter, format_table, print_summary

__all__ = ["ExperimentReporter", "emit_plots", "format_table", "print_summary", "render_line_chart"]
