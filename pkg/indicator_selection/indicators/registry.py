"""
Indicator registry and frame assembly.

A registry maps indicator names to definitions (constructor, default
parameters, output suffixes, warm-up rule, catalogue number). The native
registry is built once at import and frozen; callers that need their own entries work
on a copy and may freeze it before sharing it across threads.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from indicator_selection.data.series import FeatureFrame, PriceSeries
from indicator_selection.exceptions import (
    EmptyFrameError,
    InsufficientHistoryError,
    RegistryConflictError,
    SchemaError,
    UnknownIndicatorError,
)
from indicator_selection.indicators import library as lib
from indicator_selection.utils.logger import get_logger

logger = get_logger(__name__)

Constructor = Callable[..., Union[pd.Series, pd.DataFrame]]
WarmupRule = Callable[[Mapping[str, float]], int]


@dataclass(frozen=True)
class IndicatorSpec:
    """A named indicator with parameters; ``outputs`` is filled on resolution."""

    name: str
    params: Mapping[str, float] = field(default_factory=dict)
    outputs: Tuple[str, ...] = ()

    @classmethod
    def of(cls, name: str, **params) -> "IndicatorSpec":
        return cls(name=name, params=dict(params))

    def __str__(self) -> str:
        args = ",".join(f"{k}={v:g}" if isinstance(v, (int, float)) else f"{k}={v}"
                        for k, v in self.params.items())
        return f"{self.name}({args})"


@dataclass(frozen=True)
class IndicatorDefinition:
    name: str
    constructor: Constructor
    defaults: Mapping[str, float] = field(default_factory=dict)
    suffixes: Optional[Tuple[str, ...]] = None
    warmup: Optional[WarmupRule] = None
    length_params: Tuple[str, ...] = ()
    catalogue_number: Optional[int] = None
    category: str = "custom"

    def column_names(self, suffixes: Sequence[str]) -> Tuple[str, ...]:
        if len(suffixes) == 1 and suffixes[0] == "":
            return (self.name,)
        return tuple(f"{self.name}_{s}" for s in suffixes)


class IndicatorRegistry:
    """
    Name -> IndicatorDefinition mapping.

    Features:
    - duplicate registration is a conflict
    - unknown lookups raise UnknownIndicatorError
    - ``freeze`` makes the registry read-only
    """

    def __init__(self, definitions: Iterable[IndicatorDefinition] = ()):
        self._definitions: Dict[str, IndicatorDefinition] = {}
        self._frozen = False
        for definition in definitions:
            self._add(definition)

    def _add(self, definition: IndicatorDefinition) -> IndicatorDefinition:
        if self._frozen:
            raise RegistryConflictError(f"registry is frozen, cannot add '{definition.name}'")
        if definition.name in self._definitions:
            raise RegistryConflictError(f"indicator '{definition.name}' is already registered")
        self._definitions[definition.name] = definition
        return definition

    def register(
        self,
        name: str,
        constructor: Constructor,
        *,
        defaults: Optional[Mapping[str, float]] = None,
        outputs: Optional[Sequence[str]] = None,
        warmup: Optional[WarmupRule] = None,
        length_params: Sequence[str] = (),
        catalogue_number: Optional[int] = None,
        category: str = "custom",
    ) -> IndicatorDefinition:
        """
        Register a user indicator.

        Args:
            name: Registry key (also the column prefix)
            constructor: ``f(series, **params)`` returning a Series or DataFrame
            defaults: Default parameters
            outputs: Output suffixes; inferred from the first result when omitted
            warmup: Leading missing rows for given parameters
            length_params: Parameter names that must be integers >= 1
            catalogue_number: Catalogue number
            category: Indicator family label

        Returns:
            The stored definition
        """
        return self._add(
            IndicatorDefinition(
                name=name,
                constructor=constructor,
                defaults=dict(defaults or {}),
                suffixes=tuple(outputs) if outputs is not None else None,
                warmup=warmup,
                length_params=tuple(length_params),
                catalogue_number=catalogue_number,
                category=category,
            )
        )

    def freeze(self) -> "IndicatorRegistry":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def copy(self) -> "IndicatorRegistry":
        return IndicatorRegistry(self._definitions.values())

    def get(self, name: str) -> IndicatorDefinition:
        try:
            return self._definitions[name]
        except KeyError:
            raise UnknownIndicatorError(f"unknown indicator '{name}'") from None

    def __contains__(self, name: str) -> bool:
        return name in self._definitions

    def __len__(self) -> int:
        return len(self._definitions)

    def names(self) -> List[str]:
        return list(self._definitions)

    def resolve(self, spec: IndicatorSpec) -> IndicatorSpec:
        """Merge defaults, validate length parameters and fill outputs."""
        definition = self.get(spec.name)
        unknown = [k for k in spec.params if definition.defaults and k not in definition.defaults]
        if unknown:
            raise SchemaError(f"{spec.name}: unknown parameters {unknown}")
        params = {**definition.defaults, **spec.params}
        for key in definition.length_params:
            value = params[key]
            if float(value) != int(value) or int(value) < 1:
                raise SchemaError(f"{spec.name}: {key} must be an integer >= 1, got {value}")
            params[key] = int(value)
        outputs = (
            definition.column_names(definition.suffixes) if definition.suffixes is not None else ()
        )
        return replace(spec, params=params, outputs=outputs)

    def warmup(self, spec: IndicatorSpec) -> int:
        definition = self.get(spec.name)
        if definition.warmup is None:
            return 0
        return int(definition.warmup(self.resolve(spec).params))

    def default_specs(self) -> List[IndicatorSpec]:
        """One default-parameter spec per registered indicator."""
        return [IndicatorSpec(name) for name in self._definitions]

    @classmethod
    def with_native(cls) -> "IndicatorRegistry":
        return cls(_native_definitions())


def _native_definitions() -> List[IndicatorDefinition]:
    single = ("",)

    def native(name, fn, number, category, suffixes=single, warmup=None, lengths=("length",),
               **defaults):
        return IndicatorDefinition(
            name=name,
            constructor=fn,
            defaults=defaults,
            suffixes=suffixes,
            warmup=warmup,
            length_params=lengths,
            catalogue_number=number,
            category=category,
        )

    L = lambda p: p["length"]  # noqa: E731
    osc = ("line", "signal", "hist")
    osc_warmup = lambda p: p["slow"] + p["signal"] - 2  # noqa: E731
    osc_lengths = ("fast", "slow", "signal")
    squeeze_warmup = lambda p: max(  # noqa: E731
        p["bb_length"] - 1, p["kc_length"], p["mom_length"] + p["mom_smooth"] - 1
    )
    squeeze_lengths = ("bb_length", "kc_length", "mom_length", "mom_smooth")

    return [
        native("sma", lib.sma, 94, "overlap", warmup=lambda p: L(p) - 1, length=10),
        native("ema", lib.ema, 37, "overlap", warmup=lambda p: L(p) - 1, length=10),
        native("wma", lib.wma, 122, "overlap", warmup=lambda p: L(p) - 1, length=10),
        native("dema", lib.dema, 27, "overlap", warmup=lambda p: 2 * (L(p) - 1), length=10),
        native("tema", lib.tema, 106, "overlap", warmup=lambda p: 3 * (L(p) - 1), length=10),
        native("trima", lib.trima, 108, "overlap",
               warmup=lambda p: 2 * (lib.trima_half(L(p)) - 1), length=10),
        native("midpoint", lib.midpoint, 57, "overlap", warmup=lambda p: L(p) - 1, length=2),
        native("midprice", lib.midprice, 58, "overlap", warmup=lambda p: L(p) - 1, length=2),
        native("mom", lib.mom, 59, "momentum", warmup=L, length=10),
        native("roc", lib.roc, 79, "momentum", warmup=L, length=10),
        native("rsi", lib.rsi, 80, "momentum", warmup=L, length=14),
        native("macd", lib.macd, 61, "momentum", osc, osc_warmup, osc_lengths,
               fast=12, slow=26, signal=9),
        native("ppo", lib.ppo, 68, "momentum", osc, osc_warmup, osc_lengths,
               fast=12, slow=26, signal=9),
        native("pvo", lib.pvo, 69, "volume", osc, osc_warmup, osc_lengths,
               fast=12, slow=26, signal=9),
        native("bbands", lib.bbands, 14, "volatility",
               ("lower", "mid", "upper", "bandwidth", "percent"),
               lambda p: L(p) - 1, length=20, std=2.0),
        native("stoch", lib.stoch, 99, "momentum", ("k", "d"),
               lambda p: p["k"] + p["d"] - 2, ("k", "d"), k=14, d=3),
        native("willr", lib.willr, 121, "momentum", warmup=lambda p: L(p) - 1, length=14),
        native("atr", lib.atr, 10, "volatility", warmup=L, length=14),
        native("natr", lib.natr, 63, "volatility", warmup=L, length=14),
        native("cci", lib.cci, 22, "momentum", warmup=lambda p: L(p) - 1, length=20, c=0.015),
        native("dpo", lib.dpo, 28, "trend",
               warmup=lambda p: L(p) - 1 + L(p) // 2 + 1, length=20),
        native("obv", lib.obv, 65, "volume", warmup=lambda p: 0, lengths=()),
        native("mfi", lib.mfi, 60, "volume", warmup=L, length=14),
        native("stdev", lib.stdev, 86, "statistics", warmup=lambda p: L(p) - 1, length=20),
        native("zscore", lib.zscore, 85, "statistics", warmup=lambda p: L(p) - 1, length=20),
        native("slope", lib.slope, 95, "momentum", warmup=L, length=20),
        native("squeeze", lib.squeeze, 97, "momentum", ("mom", "on", "off", "no"),
               squeeze_warmup, squeeze_lengths,
               bb_length=20, bb_std=2.0, kc_length=20, kc_scalar=1.5,
               mom_length=12, mom_smooth=6),
        native("squeeze_pro", lib.squeeze_pro, 98, "momentum",
               ("mom", "on_wide", "on_normal", "on_narrow", "off", "no"),
               squeeze_warmup, squeeze_lengths,
               bb_length=20, bb_std=2.0, kc_length=20, kc_scalar_wide=2.0,
               kc_scalar_normal=1.5, kc_scalar_narrow=1.0, mom_length=12, mom_smooth=6),
        native("thermo", lib.thermo, 107, "volatility", ("value", "ma", "long", "short"),
               L, length=20, long=2.0, short=0.5),
        native("decay", lib.decay, 25, "trend", warmup=lambda p: 0, length=5),
        native("aobv", lib.aobv, 7, "volume",
               ("obv", "min", "max", "fast", "slow", "long_run", "short_run"),
               lambda p: p["slow"] - 1 + max(p["max_lookback"], p["min_lookback"]),
               ("fast", "slow", "max_lookback", "min_lookback"),
               fast=4, slow=12, max_lookback=2, min_lookback=2),
        native("ichimoku", lib.ichimoku, 46, "trend", ("conversion", "base", "span_a", "span_b"),
               lambda p: max(p["tenkan"], p["kijun"], p["senkou"]) - 1,
               ("tenkan", "kijun", "senkou"), tenkan=9, kijun=26, senkou=52),
    ]


NATIVE_REGISTRY = IndicatorRegistry.with_native().freeze()


def register(
    registry: IndicatorRegistry, name: str, constructor: Constructor, **metadata
) -> IndicatorDefinition:
    """
    Register into a caller-owned registry (see IndicatorRegistry.register).

    The native registry is frozen; extend ``NATIVE_REGISTRY.copy()`` and pass
    that copy to ``compute``, ``compute_all`` or ``ExperimentRunner``.

    Raises:
        RegistryConflictError: ``registry`` is frozen or already has ``name``
    """
    return registry.register(name, constructor, **metadata)


def compute(
    spec: IndicatorSpec,
    series: PriceSeries,
    registry: Optional[IndicatorRegistry] = None,
) -> FeatureFrame:
    """
    Compute one indicator on a price series.

    Args:
        spec: Indicator name and parameters
        series: Input bars
        registry: Registry to resolve against (process-wide by default)

    Returns:
        FeatureFrame with the indicator's output columns, aligned to the bars

    Raises:
        UnknownIndicatorError: name not registered
        InsufficientHistoryError: fewer bars than the warm-up needs
    """
    registry = registry or NATIVE_REGISTRY
    resolved = registry.resolve(spec)
    definition = registry.get(spec.name)

    needed = registry.warmup(resolved) + 1
    if len(series) < needed:
        raise InsufficientHistoryError(
            f"{resolved}: needs at least {needed} bars, got {len(series)}"
        )

    result = definition.constructor(series, **resolved.params)
    if isinstance(result, pd.Series):
        frame = result.to_frame(definition.name)
        frame.columns = list(definition.column_names(("",)))
    else:
        frame = result.copy()
        frame.columns = list(definition.column_names([str(c) for c in frame.columns]))

    if resolved.outputs and tuple(frame.columns) != resolved.outputs:
        raise SchemaError(
            f"{resolved}: produced {list(frame.columns)}, declared {list(resolved.outputs)}"
        )
    if len(frame) != len(series):
        raise SchemaError(f"{resolved}: output length {len(frame)} != {len(series)} bars")

    frame.index = series.dates
    frame = frame.astype(float)
    empty = [c for c in frame.columns if frame[c].isna().all()]
    if empty:
        raise InsufficientHistoryError(f"{resolved}: no defined values in {empty}")
    return FeatureFrame(frame, {c: definition.name for c in frame.columns})


def compute_all(
    specs: Sequence[IndicatorSpec],
    series: PriceSeries,
    registry: Optional[IndicatorRegistry] = None,
) -> FeatureFrame:
    """
    Compute every spec and concatenate the outputs in spec order.

    Raw OHLCV columns are never part of the result.

    Raises:
        SchemaError: empty spec list or duplicate output names
    """
    if not specs:
        raise SchemaError("at least one indicator spec is required")

    parts = [compute(spec, series, registry) for spec in specs]
    columns = [c for part in parts for c in part.columns]
    if len(set(columns)) != len(columns):
        dupes = sorted({c for c in columns if columns.count(c) > 1})
        raise SchemaError(f"duplicate indicator outputs: {dupes}")

    groups: Dict[str, str] = {}
    for part in parts:
        groups.update(part.groups)
    data = pd.concat([part.data for part in parts], axis=1)
    logger.info("indicators computed", specs=len(specs), columns=len(columns), rows=len(data))
    return FeatureFrame(data, groups)


def drop_warmup(frame: FeatureFrame) -> FeatureFrame:
    """
    Remove the leading rows in which any column is missing.

    Raises:
        EmptyFrameError: frame empty or every row dropped
    """
    if len(frame) == 0:
        raise EmptyFrameError("cannot drop warm-up from an empty frame")
    complete = frame.data.notna().all(axis=1).to_numpy()
    if not complete.any():
        raise EmptyFrameError("every row has a missing value; nothing left after warm-up")
    first = int(np.argmax(complete))
    if first:
        logger.debug("dropped warm-up rows", rows=first)
    return frame.with_data(frame.data.iloc[first:].copy())


def infer_groups(columns: Sequence[str], registry: Optional[IndicatorRegistry] = None) -> Dict[str, str]:
    """Map column names back to indicator groups by longest registered prefix."""
    registry = registry or NATIVE_REGISTRY
    names = sorted(registry.names(), key=len, reverse=True)
    groups = {}
    for column in columns:
        base = column.split("@", 1)[0]
        for name in names:
            if base == name or base.startswith(name + "_"):
                groups[column] = name
                break
    return groups


def catalogue_numbers(groups: Sequence[str], registry: Optional[IndicatorRegistry] = None) -> List[Optional[int]]:
    """Catalogue numbers for the given groups (None when unknown)."""
    registry = registry or NATIVE_REGISTRY
    return [registry.get(g).catalogue_number if g in registry else None for g in groups]
