"""
Selection configuration and results, with JSON persistence.
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import jsonschema
from pydantic import BaseModel, ConfigDict, Field, field_validator

from indicator_selection.evaluation.metrics import canonical_metric, is_better
from indicator_selection.exceptions import ArtifactError
from indicator_selection.models.config import RegressorConfig

SCHEMA_PATH = Path(__file__).parent / "schemas" / "selection_result.json"


class SelectionConfig(BaseModel):
    """One wrapper-selection run: method, estimator, metric and CV policy."""

    model_config = ConfigDict(frozen=True)

    method: Literal["SFS", "SBS"]
    regressor: RegressorConfig
    metric: str = "mse"
    cv_folds: int = Field(5, ge=2)
    group_by_indicator: bool = True
    max_steps: Optional[int] = Field(None, ge=1)
    seed: int = 0
    cv_shuffle: bool = False
    n_jobs: int = 1
    scope: Literal["train", "partition"] = "train"

    @field_validator("method", mode="before")
    @classmethod
    def _upper_method(cls, value):
        return str(value).strip().upper()

    @field_validator("metric", mode="before")
    @classmethod
    def _metric(cls, value):
        return canonical_metric(value)

    @property
    def label(self) -> str:
        return f"{self.method}_{self.regressor.family}_{self.metric}"


@dataclass(frozen=True)
class SelectionStep:
    """
    One greedy step.

    ``group`` is the group added (SFS) or removed (SBS); ``subset`` is the
    state after the step.
    """

    step: int
    size: int
    group: str
    score: float
    subset: Tuple[str, ...]


@dataclass(frozen=True)
class SelectionResult:
    method: str
    metric: str
    family: str
    selected: Tuple[str, ...]
    trace: Tuple[SelectionStep, ...]
    best_score: float
    best_subset: Tuple[str, ...]
    n_fits: int
    groups: Tuple[str, ...] = ()
    initial_score: Optional[float] = None
    catalogue_numbers: Mapping[str, Optional[int]] = field(default_factory=dict)
    cv_folds: int = 5
    seed: int = 0

    @property
    def label(self) -> str:
        return f"{self.method}_{self.family}_{self.metric}"

    def best_catalogue_numbers(self) -> List[Optional[int]]:
        return [self.catalogue_numbers.get(g) for g in self.best_subset]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "metric": self.metric,
            "family": self.family,
            "cv_folds": self.cv_folds,
            "seed": self.seed,
            "n_fits": self.n_fits,
            "groups": list(self.groups),
            "selected": list(self.selected),
            "initial_score": self.initial_score,
            "trace": [
                {
                    "step": s.step,
                    "size": s.size,
                    "group": s.group,
                    "score": s.score,
                    "subset": list(s.subset),
                }
                for s in self.trace
            ],
            "best_score": self.best_score,
            "best_subset": list(self.best_subset),
            "best_catalogue_numbers": self.best_catalogue_numbers(),
            "catalogue_numbers": {g: self.catalogue_numbers.get(g) for g in self.groups},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SelectionResult":
        return cls(
            method=data["method"],
            metric=data["metric"],
            family=data["family"],
            selected=tuple(data["selected"]),
            trace=tuple(
                SelectionStep(
                    step=s["step"], size=s["size"], group=s["group"], score=s["score"], subset=tuple(s["subset"])
                )
                for s in data["trace"]
            ),
            best_score=data["best_score"],
            best_subset=tuple(data["best_subset"]),
            n_fits=data["n_fits"],
            groups=tuple(data.get("groups", ())),
            initial_score=data.get("initial_score"),
            catalogue_numbers=dict(data.get("catalogue_numbers", {})),
            cv_folds=data.get("cv_folds", 5),
            seed=data.get("seed", 0),
        )


def best_state(trace, metric: str, initial: Optional[Tuple[Tuple[str, ...], float]] = None):
    """Best (subset, score) over an optional initial state and the trace; ties keep the earliest."""
    best_subset, best_score = initial if initial is not None else (None, None)
    for step in trace:
        if best_subset is None or is_better(step.score, best_score, metric):
            best_subset, best_score = step.subset, step.score
    return best_subset, best_score


@lru_cache(maxsize=1)
def _schema() -> Dict[str, Any]:
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


def validate_document(document: Mapping[str, Any]) -> None:
    """
    Raises:
        ArtifactError: document does not match the packaged schema
    """
    try:
        jsonschema.validate(instance=document, schema=_schema())
    except jsonschema.ValidationError as exc:
        raise ArtifactError(f"selection result does not match schema: {exc.message}") from exc


def _clean(value: Any) -> Any:
    """NaN/inf are not JSON; store them as null."""
    if isinstance(value, float) and (value != value or value in (float("inf"), float("-inf"))):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_clean(v) for v in value]
    return value


def dumps_result(result: SelectionResult) -> str:
    document = _clean(result.to_dict())
    validate_document(document)
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def save_result(result: SelectionResult, directory: Union[str, Path]) -> Path:
    """Write ``<directory>/<method>_<family>_<metric>.json``."""
    out = Path(directory) / f"{result.label}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dumps_result(result), encoding="utf-8")
    return out


def load_result(path: Union[str, Path]) -> SelectionResult:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ArtifactError(f"cannot read selection result {path}: {exc}") from exc
    validate_document(document)
    return SelectionResult.from_dict(document)


def load_results(directory: Union[str, Path]) -> List[SelectionResult]:
    """Every ``*.json`` result in a directory, in file-name order."""
    return [load_result(p) for p in sorted(Path(directory).glob("*.json"))]
