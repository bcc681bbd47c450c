"""
Fluent assertion utilities for pipeline artifacts.

Chainable checks for windowed datasets, data frames and output trees; every
passing check is attached to the Allure report.
"""

import json
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, Iterable, Sequence, Union

import allure
import numpy as np
import pandas as pd
from jsonschema import ValidationError, validate

if TYPE_CHECKING:
    from indicator_selection.core.windowing import WindowedDataset
    from indicator_selection.data.series import FeatureFrame


def _attach(text: str, name: str) -> None:
    allure.attach(text, name=name, attachment_type=allure.attachment_type.TEXT)


class DatasetAssertion:
    """
    Fluent assertion interface for windowed datasets.

    Provides chainable shape, content and grouping checks.
    """

    def __init__(self, dataset: "WindowedDataset"):
        """
        Initialize dataset assertion.

        Args:
            dataset: Windowed dataset to validate
        """
        self.dataset = dataset
        from indicator_selection.utils.logger import get_logger
        self.logger = get_logger(self.__class__.__name__)

    def has_shape(self, rows: int, columns: int) -> "DatasetAssertion":
        """
        Assert the design matrix has the given shape.

        Args:
            rows: Expected sample count
            columns: Expected feature count

        Returns:
            Self for method chaining
        """
        actual = self.dataset.X.shape
        assert actual == (rows, columns), f"Expected X shape {(rows, columns)}, got {actual}"
        assert self.dataset.y.shape == (rows,), f"Expected {rows} targets, got {self.dataset.y.shape}"
        _attach(f"Shape Assertion: {actual} == {(rows, columns)} ✓", "Dataset Shape Validation")
        return self

    def has_no_missing(self) -> "DatasetAssertion":
        assert np.isfinite(self.dataset.X).all(), "X contains NaN or infinite values"
        assert np.isfinite(self.dataset.y).all(), "y contains NaN or infinite values"
        _attach("Missing Value Assertion: all cells finite ✓", "Dataset Completeness Validation")
        return self

    def has_groups(self, *groups: str) -> "DatasetAssertion":
        """
        Assert the dataset exposes exactly these selectable groups, in order.

        Returns:
            Self for method chaining
        """
        actual = list(self.dataset.group_names)
        assert actual == list(groups), f"Expected groups {list(groups)}, got {actual}"
        _attach(f"Groups Assertion: {actual} ✓", "Dataset Groups Validation")
        return self

    def has_features(self, *names: str) -> "DatasetAssertion":
        missing = [n for n in names if n not in self.dataset.feature_names]
        assert not missing, f"Missing features: {missing}"
        _attach(f"Features Assertion: {list(names)} all present ✓", "Dataset Features Validation")
        return self

    def values_within(self, low: float, high: float) -> "DatasetAssertion":
        """
        Assert every feature lies in [low, high] (up to rounding).

        Returns:
            Self for method chaining
        """
        X = self.dataset.X
        tol = 1e-12
        assert X.min() >= low - tol and X.max() <= high + tol, (
            f"Features span [{X.min()}, {X.max()}], expected within [{low}, {high}]"
        )
        _attach(f"Range Assertion: [{X.min():.6g}, {X.max():.6g}] within [{low}, {high}] ✓",
                "Dataset Range Validation")
        return self

    def dates_increasing(self) -> "DatasetAssertion":
        dates = self.dataset.sample_dates
        assert (dates[1:] > dates[:-1]).all(), "sample dates are not strictly increasing"
        assert (self.dataset.target_dates > dates).all(), "a target date is not after its window"
        _attach("Date Order Assertion: strictly increasing ✓", "Dataset Date Validation")
        return self


class FrameAssertion:
    """Fluent assertion interface for DataFrames and FeatureFrames."""

    def __init__(self, frame: Union[pd.DataFrame, "FeatureFrame"]):
        self.frame = frame if isinstance(frame, pd.DataFrame) else frame.data

    def has_columns(self, *columns: str) -> "FrameAssertion":
        missing = [c for c in columns if c not in self.frame.columns]
        assert not missing, f"Missing columns {missing}; frame has {list(self.frame.columns)}"
        _attach(f"Columns Assertion: {list(columns)} all present ✓", "Frame Columns Validation")
        return self

    def has_exact_columns(self, columns: Sequence[str]) -> "FrameAssertion":
        actual = list(self.frame.columns)
        assert actual == list(columns), f"Expected columns {list(columns)}, got {actual}"
        _attach(f"Exact Columns Assertion: {actual} ✓", "Frame Columns Validation")
        return self

    def has_rows(self, expected: int) -> "FrameAssertion":
        actual = len(self.frame)
        assert actual == expected, f"Expected {expected} rows, got {actual}"
        _attach(f"Row Count Assertion: {actual} == {expected} ✓", "Frame Rows Validation")
        return self

    def has_no_missing(self) -> "FrameAssertion":
        missing = int(self.frame.isna().sum().sum())
        assert missing == 0, f"Frame has {missing} missing cells"
        _attach("Missing Value Assertion: none ✓", "Frame Completeness Validation")
        return self

    def column_close_to(self, column: str, expected: Iterable[float], atol: float = 1e-8) -> "FrameAssertion":
        """
        Assert a column matches reference values elementwise (NaN matches NaN).

        Args:
            column: Column to compare
            expected: Reference values
            atol: Absolute tolerance

        Returns:
            Self for method chaining
        """
        actual = self.frame[column].to_numpy(dtype=float)
        reference = np.asarray(list(expected), dtype=float)
        np.testing.assert_allclose(actual, reference, atol=atol, rtol=0.0, equal_nan=True,
                                   err_msg=f"column '{column}' differs from reference")
        _attach(f"Reference Assertion: {column} within {atol} ✓", "Frame Values Validation")
        return self


class OutputAssertion:
    """Fluent assertion interface for an experiment output directory."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)

    def has_files(self, *relative: str) -> "OutputAssertion":
        missing = [r for r in relative if not (self.root / r).is_file()]
        assert not missing, f"Missing output files under {self.root}: {missing}"
        _attach("\n".join(relative), "Output Files Validation")
        return self

    def csv_has_columns(self, relative: str, columns: Sequence[str]) -> "OutputAssertion":
        frame = pd.read_csv(self.root / relative)
        FrameAssertion(frame).has_exact_columns(columns)
        return self

    def json_matches_schema(self, relative: str, schema: Union[Dict[str, Any], str, Path]) -> "OutputAssertion":
        """
        Assert a JSON output validates against a schema.

        Args:
            relative: File path under the output root
            schema: Schema dictionary or schema file path

        Returns:
            Self for method chaining
        """
        if not isinstance(schema, dict):
            schema = json.loads(Path(schema).read_text(encoding="utf-8"))
        document = json.loads((self.root / relative).read_text(encoding="utf-8"))
        try:
            validate(instance=document, schema=schema)
        except ValidationError as e:
            _attach(f"Validation Error: {e.message}\nPath: {e.absolute_path}", "JSON Schema Validation - FAILED")
            raise AssertionError(f"{relative}: JSON schema validation failed: {e.message}")
        allure.attach(json.dumps(document, indent=2)[:4000], name=f"{relative} - PASSED",
                      attachment_type=allure.attachment_type.JSON)
        return self


def assert_dataset(dataset: "WindowedDataset") -> DatasetAssertion:
    """
    Create fluent assertion interface for a windowed dataset.

    Example:
        assert_dataset(ds).has_shape(295, 6).has_no_missing().dates_increasing()
    """
    return DatasetAssertion(dataset)


def assert_frame(frame: Union[pd.DataFrame, "FeatureFrame"]) -> FrameAssertion:
    return FrameAssertion(frame)


def assert_output(root: Union[str, Path]) -> OutputAssertion:
    return OutputAssertion(root)
