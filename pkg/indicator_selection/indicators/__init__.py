"""
Technical indicators and the registry that names them.
"""

from indicator_selection.indicators.registry import (
    NATIVE_REGISTRY,
    IndicatorDefinition,
    IndicatorRegistry,
    IndicatorSpec,
    compute,
    compute_all,
    drop_warmup,
    infer_groups,
    register,
)
from indicator_selection.indicators.roster import default_roster, load_roster, parse_roster, parse_spec

__all__ = [
    "NATIVE_REGISTRY",
    "IndicatorDefinition",
    "IndicatorRegistry",
    "IndicatorSpec",
    "compute",
    "compute_all",
    "default_roster",
    "drop_warmup",
    "infer_groups",
    "load_roster",
    "parse_roster",
    "parse_spec",
    "register",
]
