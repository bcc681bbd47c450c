"""
Exception hierarchy for the indicator selection pipeline.

Every error carries the exit code the CLI returns when it escapes a command:
1 for configuration problems, 2 for data problems, 3 for numeric problems.
"""


class IndicatorSelectionError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 1


class ConfigError(IndicatorSelectionError):
    """Invalid, missing or contradictory configuration."""

    exit_code = 1


class DataError(IndicatorSelectionError):
    """Input data cannot be used as given."""

    exit_code = 2


class InputNotFoundError(DataError):
    """A configured input file does not exist."""


class OutputWriteError(DataError):
    """An output file or directory cannot be written."""


class SchemaError(DataError):
    """Columns are missing, unexpected, duplicated or mismatched."""


class OrderingError(DataError):
    """Dates are not strictly increasing."""


class EmptyInputError(DataError):
    """An input file or vector holds no rows."""


class InvalidPriceError(DataError):
    """A price bar violates high >= low or volume >= 0."""


class DegenerateColumnError(DataError):
    """A column has no usable (non-missing) value."""


class UnknownIndicatorError(DataError):
    """An indicator name is not registered."""


class RegistryConflictError(DataError):
    """An indicator name is registered twice."""


class InsufficientHistoryError(DataError):
    """A series is too short for the requested warm-up or window."""


class EmptyFrameError(DataError):
    """Every row of a frame was removed."""


class InsufficientSamplesError(DataError):
    """Fewer samples than folds."""


class PartitionError(DataError):
    """A date partition yields too little data."""


class GroupReferenceError(DataError):
    """A selection references an indicator group that is not in the roster."""


class ArtifactError(DataError):
    """A model artifact is corrupt or has an unsupported format version."""


class NumericError(IndicatorSelectionError):
    """Numeric input or shape problems inside estimators and metrics."""

    exit_code = 3


class NumericInputError(NumericError):
    """Non-finite values where finite values are required."""


class ShapeError(NumericError):
    """Array dimensions do not agree."""


class ConvergenceWarning(UserWarning):
    """An iterative solver stopped at its iteration budget."""
