"""Model roster behind a uniform fit/predict contract.

Kinds are addressed by string names (e.g. "random_forest_c"); the suffix
marks the task: _c classifies the next move as up/down, _r regresses the
next-interval log return. All estimators are implemented in this package on
top of numpy; stochastic ones draw every random number from the spec seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..direction import DOWN, UP
from ..errors import KindMismatch, NonFiniteInput, ParamError, WidthMismatch
from .base import Estimator, check_fit_inputs, check_class_labels
from .ensemble import (
    BaggingClassifier,
    BaggingRegressor,
    RandomForestClassifier,
    RandomForestRegressor,
    ensemble_aggregate,
)
from .linear import (
    ConstantClassifier,
    ConstantRegressor,
    LogisticClassifier,
    OLSRegressor,
    PerceptronClassifier,
    RidgeClassifier,
    RidgeRegressor,
    SGDClassifier,
    SGDRegressor,
)
from .naive_bayes import BernoulliNBClassifier
from .neighbors import KNNClassifier, KNNRegressor
from .spaces import Categorical, HyperParamSpace, IntRange, LogUniform, Uniform, default_space, validate_params
from .tree import (
    DecisionTreeClassifier,
    DecisionTreeRegressor,
    ExtraTreeClassifier,
    ExtraTreeRegressor,
    cart_best_split,
)

CLASSIFIER = "classifier"
REGRESSOR = "regressor"


class ModelKind(str, Enum):
    LOGISTIC_C = "logistic_c"
    RIDGE_C = "ridge_c"
    PERCEPTRON_C = "perceptron_c"
    SGD_C = "sgd_c"
    KNN_C = "knn_c"
    BERNOULLI_NB_C = "bernoulli_nb_c"
    DECISION_TREE_C = "decision_tree_c"
    EXTRA_TREE_C = "extra_tree_c"
    RANDOM_FOREST_C = "random_forest_c"
    BAGGING_C = "bagging_c"
    OLS_R = "ols_r"
    RIDGE_R = "ridge_r"
    SGD_R = "sgd_r"
    KNN_R = "knn_r"
    DECISION_TREE_R = "decision_tree_r"
    EXTRA_TREE_R = "extra_tree_r"
    RANDOM_FOREST_R = "random_forest_r"
    BAGGING_R = "bagging_r"


_SEEDED = "seeded"
_UNSEEDED = "unseeded"

_REGISTRY: dict[ModelKind, tuple[str, type, str]] = {
    ModelKind.LOGISTIC_C: (CLASSIFIER, LogisticClassifier, _SEEDED),
    ModelKind.RIDGE_C: (CLASSIFIER, RidgeClassifier, _UNSEEDED),
    ModelKind.PERCEPTRON_C: (CLASSIFIER, PerceptronClassifier, _UNSEEDED),
    ModelKind.SGD_C: (CLASSIFIER, SGDClassifier, _SEEDED),
    ModelKind.KNN_C: (CLASSIFIER, KNNClassifier, _UNSEEDED),
    ModelKind.BERNOULLI_NB_C: (CLASSIFIER, BernoulliNBClassifier, _UNSEEDED),
    ModelKind.DECISION_TREE_C: (CLASSIFIER, DecisionTreeClassifier, _SEEDED),
    ModelKind.EXTRA_TREE_C: (CLASSIFIER, ExtraTreeClassifier, _SEEDED),
    ModelKind.RANDOM_FOREST_C: (CLASSIFIER, RandomForestClassifier, _SEEDED),
    ModelKind.BAGGING_C: (CLASSIFIER, BaggingClassifier, _SEEDED),
    ModelKind.OLS_R: (REGRESSOR, OLSRegressor, _UNSEEDED),
    ModelKind.RIDGE_R: (REGRESSOR, RidgeRegressor, _UNSEEDED),
    ModelKind.SGD_R: (REGRESSOR, SGDRegressor, _SEEDED),
    ModelKind.KNN_R: (REGRESSOR, KNNRegressor, _UNSEEDED),
    ModelKind.DECISION_TREE_R: (REGRESSOR, DecisionTreeRegressor, _SEEDED),
    ModelKind.EXTRA_TREE_R: (REGRESSOR, ExtraTreeRegressor, _SEEDED),
    ModelKind.RANDOM_FOREST_R: (REGRESSOR, RandomForestRegressor, _SEEDED),
    ModelKind.BAGGING_R: (REGRESSOR, BaggingRegressor, _SEEDED),
}

CLASSIFIER_KINDS = tuple(k for k, (task, _, _) in _REGISTRY.items() if task == CLASSIFIER)
REGRESSOR_KINDS = tuple(k for k, (task, _, _) in _REGISTRY.items() if task == REGRESSOR)
ALL_KINDS = tuple(_REGISTRY)

_DISPLAY = {
    ModelKind.LOGISTIC_C: "LogisticC",
    ModelKind.RIDGE_C: "RidgeC",
    ModelKind.PERCEPTRON_C: "PerceptronC",
    ModelKind.SGD_C: "SgdC",
    ModelKind.KNN_C: "KnnC",
    ModelKind.BERNOULLI_NB_C: "BernoulliNbC",
    ModelKind.DECISION_TREE_C: "DecisionTreeC",
    ModelKind.EXTRA_TREE_C: "ExtraTreeC",
    ModelKind.RANDOM_FOREST_C: "RandomForestC",
    ModelKind.BAGGING_C: "BaggingC",
    ModelKind.OLS_R: "OlsR",
    ModelKind.RIDGE_R: "RidgeR",
    ModelKind.SGD_R: "SgdR",
    ModelKind.KNN_R: "KnnR",
    ModelKind.DECISION_TREE_R: "DecisionTreeR",
    ModelKind.EXTRA_TREE_R: "ExtraTreeR",
    ModelKind.RANDOM_FOREST_R: "RandomForestR",
    ModelKind.BAGGING_R: "BaggingR",
}


def coerce_kind(kind: str | ModelKind) -> ModelKind:
    if isinstance(kind, ModelKind):
        return kind
    try:
        return ModelKind(kind)
    except ValueError:
        raise ParamError(f"unknown model kind {kind!r}") from None


def task_of(kind: str | ModelKind) -> str:
    return _REGISTRY[coerce_kind(kind)][0]


def display_name(kind: str | ModelKind) -> str:
    return _DISPLAY[coerce_kind(kind)]


@dataclass(frozen=True)
class ModelSpec:
    """A model kind, its hyperparameters, and the seed driving its randomness."""

    kind: ModelKind
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", coerce_kind(self.kind))
        validate_params(self.kind.value, self.params)

    @property
    def task(self) -> str:
        return task_of(self.kind)


@dataclass(frozen=True)
class TrainedModel:
    """Immutable fitted state plus the vector width it accepts."""

    kind: ModelKind
    task: str
    estimator: Estimator
    feature_width: int


def build_estimator(spec: ModelSpec) -> Estimator:
    _, cls, seeding = _REGISTRY[spec.kind]
    kwargs = dict(spec.params)
    if seeding == _SEEDED:
        kwargs["seed"] = spec.seed
    return cls(**kwargs)


def fit(spec: ModelSpec, X, y) -> TrainedModel:
    """Fit one model on a training window.

    Degenerate windows never abort a run: fewer than two rows, or a
    single-class classification window, produce a constant model.
    """
    X, y = check_fit_inputs(X, y)
    task = spec.task
    if task == CLASSIFIER:
        y = check_class_labels(y).astype(np.float64)

    estimator: Estimator
    if X.shape[0] < 2:
        if task == CLASSIFIER:
            estimator = ConstantClassifier(int(y[0])).fit(X, y)
        else:
            estimator = ConstantRegressor(float(y.mean())).fit(X, y)
    elif task == CLASSIFIER and np.unique(y).size == 1:
        estimator = ConstantClassifier(int(y[0])).fit(X, y)
    else:
        estimator = build_estimator(spec).fit(X, y)
    return TrainedModel(spec.kind, task, estimator, X.shape[1])


def _check_vector(model: TrainedModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise WidthMismatch(f"expected a feature vector, got shape {x.shape}")
    if x.size != model.feature_width:
        raise WidthMismatch(f"expected {model.feature_width} features, got {x.size}")
    if not np.isfinite(x).all():
        raise NonFiniteInput("feature vector contains non-finite entries")
    return x


def predict_class(model: TrainedModel, x) -> tuple[int, float]:
    """Direction plus decision score; score > 0 iff up, ties resolve down."""
    if model.task != CLASSIFIER:
        raise KindMismatch(f"{model.kind.value} is not a classifier")
    x = _check_vector(model, x)
    score = float(model.estimator.decision_function(x.reshape(1, -1))[0])
    return (UP if score > 0 else DOWN), score


def predict_value(model: TrainedModel, x) -> float:
    """Predicted next-interval log return."""
    if model.task != REGRESSOR:
        raise KindMismatch(f"{model.kind.value} is not a regressor")
    x = _check_vector(model, x)
    return float(model.estimator.predict(x.reshape(1, -1))[0])


__all__ = [
    "ALL_KINDS",
    "CLASSIFIER",
    "CLASSIFIER_KINDS",
    "REGRESSOR",
    "REGRESSOR_KINDS",
    "Categorical",
    "HyperParamSpace",
    "IntRange",
    "LogUniform",
    "ModelKind",
    "ModelSpec",
    "TrainedModel",
    "Uniform",
    "build_estimator",
    "cart_best_split",
    "coerce_kind",
    "default_space",
    "display_name",
    "ensemble_aggregate",
    "fit",
    "predict_class",
    "predict_value",
    "task_of",
    "validate_params",
]
