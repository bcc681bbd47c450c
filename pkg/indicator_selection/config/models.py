"""
Typed experiment configuration validated from the merged ConfigManager mapping.
"""

import hashlib
import json
from datetime import date
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from indicator_selection.config.manager import ConfigManager
from indicator_selection.evaluation.metrics import canonical_metric
from indicator_selection.exceptions import ConfigError
from indicator_selection.indicators.registry import NATIVE_REGISTRY, IndicatorRegistry, IndicatorSpec
from indicator_selection.indicators.roster import default_roster, load_roster, parse_spec
from indicator_selection.models.config import PARAM_MODELS, RegressorConfig, canonical_family, make_regressor_config
from indicator_selection.selection.results import SelectionConfig


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ExperimentSettings(_Section):
    name: str = "indicator-selection"
    seed: int = Field(42, ge=0)
    fast: bool = False


class DataSettings(_Section):
    input: str = "synthetic"
    synthetic_days: int = Field(300, ge=10)
    selection_start: Optional[date] = None
    selection_end: Optional[date] = None
    prediction_start: Optional[date] = None
    prediction_end: Optional[date] = None
    selection_fraction: float = Field(0.5, gt=0.0, lt=1.0)
    train_fraction: float = Field(0.7, gt=0.0, lt=1.0)
    shuffle_split: bool = False
    scaler_fit: Literal["train", "partition"] = "train"
    scale_target: bool = True

    @property
    def synthetic(self) -> bool:
        return self.input.strip().lower() == "synthetic"

    @property
    def dated_partitions(self) -> bool:
        return any(
            d is not None
            for d in (self.selection_start, self.selection_end, self.prediction_start, self.prediction_end)
        )

    @model_validator(mode="after")
    def _ordered_partitions(self):
        if not self.dated_partitions:
            return self
        if self.selection_end is None or self.prediction_start is None:
            raise ValueError("dated partitions need at least selection_end and prediction_start")
        if self.selection_start and self.selection_start > self.selection_end:
            raise ValueError("selection_start is after selection_end")
        if self.prediction_end and self.prediction_start > self.prediction_end:
            raise ValueError("prediction_start is after prediction_end")
        if self.selection_end >= self.prediction_start:
            raise ValueError("the selection partition must end before the prediction partition starts")
        return self


class WindowSettings(_Section):
    w: int = Field(3, ge=1)
    h: int = Field(3, ge=1)
    sweep_sizes: List[int] = Field(default_factory=lambda: [3, 5, 10, 15, 30])
    sweep_family: str = "LR"

    @field_validator("sweep_sizes")
    @classmethod
    def _positive(cls, value):
        if any(w < 1 for w in value):
            raise ValueError("window sizes must be >= 1")
        return value

    @field_validator("sweep_family", mode="before")
    @classmethod
    def _family(cls, value):
        return canonical_family(value)


class IndicatorSettings(_Section):
    roster: Optional[str] = None
    specs: List[str] = Field(default_factory=list)


class SelectionMatrix(_Section):
    methods: List[str] = Field(default_factory=lambda: ["SFS", "SBS"])
    families: List[str] = Field(default_factory=list)
    metrics: List[str] = Field(default_factory=lambda: ["mse"])
    cv_folds: int = Field(5, ge=2)
    cv_shuffle: bool = False
    group_by_indicator: bool = True
    max_steps: Optional[int] = Field(None, ge=1)
    scope: Literal["train", "partition"] = "train"
    n_jobs: int = 1

    @field_validator("methods", "families", "metrics", mode="before")
    @classmethod
    def _listify(cls, value):
        if value is None:
            return []
        return [value] if isinstance(value, str) else list(value)

    @field_validator("methods")
    @classmethod
    def _methods(cls, value):
        methods = [str(m).strip().upper() for m in value]
        unknown = sorted(set(methods) - {"SFS", "SBS"})
        if unknown:
            raise ValueError(f"unknown selection methods {unknown}")
        return methods

    @field_validator("families")
    @classmethod
    def _families(cls, value):
        return [canonical_family(f) for f in value]

    @field_validator("metrics")
    @classmethod
    def _metrics(cls, value):
        return [canonical_metric(m) for m in value]


class TuningSettings(_Section):
    K: int = Field(10, ge=2)
    repeats: int = Field(3, ge=1)
    metric: str = "mse"
    n_jobs: int = 1
    grids: Dict[str, Dict[str, List[Any]]] = Field(default_factory=dict)

    @field_validator("metric", mode="before")
    @classmethod
    def _metric(cls, value):
        return canonical_metric(value)

    @field_validator("grids", mode="before")
    @classmethod
    def _grids(cls, value):
        grids = {}
        for family, grid in (value or {}).items():
            grids[canonical_family(family)] = {
                name: list(values) if isinstance(values, (list, tuple)) else [values]
                for name, values in (grid or {}).items()
            }
        return grids


class OutputSettings(_Section):
    dir: str = "out"
    plots: bool = True


class LoggingSettings(_Section):
    level: str = "INFO"
    enable_colors: bool = True
    file: Optional[str] = None


class ExperimentConfig(_Section):
    """
    Complete, validated experiment description.

    Features:
    - chronologically ordered, non-overlapping partitions
    - non-empty method x family x metric selection matrix
    - per-family hyperparameter overrides checked against the parameter models
    """

    experiment: ExperimentSettings = Field(default_factory=ExperimentSettings)
    data: DataSettings = Field(default_factory=DataSettings)
    window: WindowSettings = Field(default_factory=WindowSettings)
    indicators: IndicatorSettings = Field(default_factory=IndicatorSettings)
    selection: SelectionMatrix = Field(default_factory=SelectionMatrix)
    regressors: Dict[str, Dict[str, Any]] = Field(default_factory=dict)
    tuning: TuningSettings = Field(default_factory=TuningSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)

    @field_validator("regressors", mode="before")
    @classmethod
    def _regressors(cls, value):
        overrides = {}
        for family, params in (value or {}).items():
            name = canonical_family(family)
            PARAM_MODELS[name](**(params or {}))
            overrides[name] = dict(params or {})
        return overrides

    @model_validator(mode="after")
    def _non_empty_matrix(self):
        if not (self.selection.methods and self.selection.families and self.selection.metrics):
            raise ValueError("selection matrix is empty: methods, families and metrics all need entries")
        return self

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "ExperimentConfig":
        """
        Validate a merged configuration mapping.

        Raises:
            ConfigError: any section fails validation
        """
        try:
            return cls.model_validate(dict(mapping))
        except ValidationError as exc:
            raise ConfigError(f"invalid experiment configuration: {exc}") from exc

    @classmethod
    def from_manager(cls, manager) -> "ExperimentConfig":
        return cls.from_mapping(manager.to_dict())

    @property
    def seed(self) -> int:
        return self.experiment.seed

    @property
    def fast(self) -> bool:
        return self.experiment.fast

    @property
    def out_dir(self) -> Path:
        return Path(self.output.dir)

    def regressor_config(self, family: str) -> RegressorConfig:
        name = canonical_family(family)
        config = make_regressor_config(name, self.regressors.get(name), seed=self.seed)
        return config.scaled_for_fast() if self.fast else config

    def selection_configs(self) -> List[SelectionConfig]:
        """Every (method, family, metric) run in matrix order."""
        matrix = self.selection
        configs = []
        for method, family, metric in product(matrix.methods, matrix.families, matrix.metrics):
            configs.append(
                SelectionConfig(
                    method=method,
                    regressor=self.regressor_config(family),
                    metric=metric,
                    cv_folds=matrix.cv_folds,
                    group_by_indicator=matrix.group_by_indicator,
                    max_steps=matrix.max_steps,
                    seed=self.seed,
                    cv_shuffle=matrix.cv_shuffle,
                    n_jobs=matrix.n_jobs,
                    scope=matrix.scope,
                )
            )
        return configs

    def indicator_specs(self, registry: Optional[IndicatorRegistry] = None) -> List[IndicatorSpec]:
        """Roster file, else inline specs, else every native indicator."""
        registry = registry or NATIVE_REGISTRY
        if self.indicators.roster:
            return load_roster(self.indicators.roster, registry)
        if self.indicators.specs:
            specs = [parse_spec(text) for text in self.indicators.specs]
            for spec in specs:
                registry.resolve(spec)
            return specs
        return default_roster(registry)

    def config_hash(self) -> str:
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def load_experiment_config(
    profile: Optional[str] = None,
    config_file: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """
    Merge profile, file, environment and explicit overrides, then validate.

    Args:
        profile: Profile overlay name
        config_file: User experiment file (YAML or INI)
        overrides: Dot-notation keys applied last (CLI flags)
    """
    manager = ConfigManager(profile=profile, config_file=config_file)
    for key, value in (overrides or {}).items():
        if value is not None:
            manager.set(key, value, convert=False)
    return ExperimentConfig.from_manager(manager)
