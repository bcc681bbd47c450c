"""
Regressor hyperparameter records.

Each family has a pydantic parameter model whose defaults are the tuned
values used for the experiments; ``RegressorConfig`` validates user
overrides against it.
"""

from typing import Any, Dict, Literal, Optional, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from indicator_selection.exceptions import ConfigError

FAMILIES = ("LR", "Ridge", "Lasso", "DTR", "KNN", "MLP", "SVR", "ADA", "GBR", "RFR")

# --fast caps
FAST_MAX_ESTIMATORS = 50
FAST_MAX_ITER = 200


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class LRParams(_Params):
    fit_intercept: bool = True
    copy_X: bool = True


class RidgeParams(_Params):
    alpha: float = Field(0.0, ge=0.0)
    fit_intercept: bool = True
    solver: Literal["svd"] = "svd"


class LassoParams(_Params):
    alpha: float = Field(0.1, ge=0.0)
    max_iter: int = Field(200, ge=1)
    tol: float = Field(1e-4, gt=0.0)
    fit_intercept: bool = True


class DTRParams(_Params):
    criterion: Literal["squared_error"] = "squared_error"
    max_depth: Optional[int] = Field(9, ge=1)
    min_samples_leaf: int = Field(2, ge=1)
    min_samples_split: int = Field(2, ge=2)
    max_leaf_nodes: Optional[int] = Field(None, ge=2)


class KNNParams(_Params):
    n_neighbors: int = Field(2, ge=1)
    weights: Literal["distance", "uniform"] = "distance"
    metric: Literal["manhattan", "euclidean"] = "manhattan"
    leaf_size: int = Field(10, ge=1)  # recorded only; the search is brute force


class MLPParams(_Params):
    hidden_layer_sizes: int = Field(50, ge=1)
    activation: Literal["logistic", "tanh", "relu"] = "logistic"
    alpha: float = Field(1.0, ge=0.0)
    solver: Literal["lbfgs"] = "lbfgs"
    max_iter: int = Field(2000, ge=1)
    tol: float = Field(1e-5, gt=0.0)
    memory: int = Field(10, ge=1)

    @field_validator("hidden_layer_sizes", mode="before")
    @classmethod
    def _single_layer(cls, value):
        if isinstance(value, (list, tuple)):
            if len(value) != 1:
                raise ValueError("only one hidden layer is supported")
            return value[0]
        return value


class SVRParams(_Params):
    C: float = Field(0.1, gt=0.0)
    gamma: float = Field(0.1, gt=0.0)
    epsilon: float = Field(0.1, ge=0.0)
    kernel: Literal["rbf"] = "rbf"
    tol: float = Field(1e-3, gt=0.0)
    max_iter: int = Field(1_000_000, ge=1)


class ADAParams(_Params):
    n_estimators: int = Field(2000, ge=1)
    learning_rate: float = Field(0.1, gt=0.0)
    loss: Literal["square", "linear", "exponential"] = "square"
    max_depth: int = Field(3, ge=1)


class GBRParams(_Params):
    n_estimators: int = Field(2000, ge=0)
    learning_rate: float = Field(0.1, gt=0.0)
    criterion: Literal["squared_error"] = "squared_error"
    loss: Literal["squared_error"] = "squared_error"
    max_depth: Optional[int] = Field(3, ge=1)
    max_leaf_nodes: Optional[int] = Field(30, ge=2)
    subsample: float = Field(1.0, gt=0.0, le=1.0)


class RFRParams(_Params):
    n_estimators: int = Field(1000, ge=1)
    max_features: Optional[int] = Field(20, ge=1)
    criterion: Literal["squared_error"] = "squared_error"
    bootstrap: bool = True
    max_depth: Optional[int] = Field(None, ge=1)
    min_samples_leaf: int = Field(1, ge=1)
    min_samples_split: int = Field(2, ge=2)
    n_jobs: int = 1


PARAM_MODELS: Dict[str, Type[_Params]] = {
    "LR": LRParams,
    "Ridge": RidgeParams,
    "Lasso": LassoParams,
    "DTR": DTRParams,
    "KNN": KNNParams,
    "MLP": MLPParams,
    "SVR": SVRParams,
    "ADA": ADAParams,
    "GBR": GBRParams,
    "RFR": RFRParams,
}

_FAMILY_LOOKUP = {name.lower(): name for name in FAMILIES}


def canonical_family(name: str) -> str:
    """Map any casing of a family name to its canonical spelling."""
    try:
        return _FAMILY_LOOKUP[str(name).strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown regressor family '{name}', expected one of {list(FAMILIES)}") from None


def default_params(family: str) -> Dict[str, Any]:
    return PARAM_MODELS[canonical_family(family)]().model_dump()


class RegressorConfig(BaseModel):
    """
    Family, hyperparameter overrides and seed.

    ``params`` holds only what differs from the family defaults;
    ``resolved`` returns the full validated parameter record.
    """

    model_config = ConfigDict(frozen=True)

    family: str
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("family", mode="before")
    @classmethod
    def _canonical(cls, value):
        return canonical_family(value)

    @model_validator(mode="after")
    def _validate_params(self):
        PARAM_MODELS[self.family](**self.params)
        return self

    @property
    def resolved(self) -> _Params:
        return PARAM_MODELS[self.family](**self.params)

    @property
    def label(self) -> str:
        return self.family

    def with_params(self, **params) -> "RegressorConfig":
        return RegressorConfig(family=self.family, params={**self.params, **params}, seed=self.seed)

    def with_seed(self, seed: int) -> "RegressorConfig":
        return RegressorConfig(family=self.family, params=dict(self.params), seed=seed)

    def scaled_for_fast(self) -> "RegressorConfig":
        """Cap ensemble sizes and MLP iterations for desk-scale runs."""
        resolved = self.resolved
        caps = {}
        n_estimators = getattr(resolved, "n_estimators", None)
        if n_estimators is not None and n_estimators > FAST_MAX_ESTIMATORS:
            caps["n_estimators"] = FAST_MAX_ESTIMATORS
        if self.family == "MLP" and resolved.max_iter > FAST_MAX_ITER:
            caps["max_iter"] = FAST_MAX_ITER
        return self.with_params(**caps) if caps else self


def make_regressor_config(family: str, params: Optional[Dict[str, Any]] = None, seed: int = 0) -> RegressorConfig:
    """Build a RegressorConfig, turning validation failures into ConfigError."""
    try:
        return RegressorConfig(family=family, params=dict(params or {}), seed=seed)
    except ValidationError as exc:
        raise ConfigError(f"invalid {family} parameters: {exc}") from exc
