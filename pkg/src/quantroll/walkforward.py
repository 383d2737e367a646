"""Rolling-window model evaluation.

For each evaluation index t the trailing mode fits on rows [t - window, t)
and predicts row t, so every model only ever sees data that predates its
prediction. Global mode fits once on a designated training view instead.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .dataset import DatasetView
from .direction import DOWN, UP, direction_name
from .errors import InsufficientHistory
from .models import CLASSIFIER, REGRESSOR, ModelSpec, fit, predict_class, predict_value, task_of
from .trading import PositionSeries

TRAILING = "trailing"
GLOBAL = "global"


@dataclass(frozen=True)
class WalkForwardConfig:
    """window counts candle intervals (days at the default daily interval)."""

    window: int = 7
    mode: str = TRAILING
    retrain_stride: int = 1

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.retrain_stride < 1:
            raise ValueError("retrain_stride must be >= 1")
        if self.mode not in (TRAILING, GLOBAL):
            raise ValueError(f"mode must be {TRAILING!r} or {GLOBAL!r}")


@dataclass
class PredictionSeries:
    """Aligned per-evaluation-step records; value is NaN for classifiers."""

    task: str
    timestamps: np.ndarray
    direction: np.ndarray
    score: np.ndarray
    value: np.ndarray
    realized_class: np.ndarray
    realized_return: np.ndarray

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("timestamp", "direction", "score", "value", "realized_class", "realized_return"))
        for i in range(len(self)):
            writer.writerow(
                (
                    int(self.timestamps[i]),
                    direction_name(self.direction[i]),
                    repr(float(self.score[i])),
                    "" if np.isnan(self.value[i]) else repr(float(self.value[i])),
                    direction_name(self.realized_class[i]),
                    repr(float(self.realized_return[i])),
                )
            )
        return out.getvalue()


def run_walkforward(
    view: DatasetView,
    spec: ModelSpec,
    config: WalkForwardConfig,
    train_view: DatasetView | None = None,
) -> PredictionSeries:
    """Evaluate one model over a segment view.

    Trailing mode shifts the first evaluable index forward until a full
    window of history exists in the parent dataset; indices skipped by
    retrain_stride reuse the most recent model.
    """
    parent = view.parent
    X = parent.frame.rows
    y_class = parent.class_target
    y_reg = parent.reg_target
    task = task_of(spec.kind)
    y_train = y_class if task == CLASSIFIER else y_reg

    if config.mode == GLOBAL:
        if train_view is None:
            raise ValueError("global mode requires a training view")
        eval_indices = view.indices
        rows = train_view.indices
        model = fit(spec, X[rows], y_train[rows])
        models = [model] * eval_indices.size
    else:
        min_start = parent.valid_from + config.window
        eval_indices = view.indices[view.indices >= min_start]
        if eval_indices.size == 0:
            raise InsufficientHistory(
                f"window {config.window} leaves no evaluable index in segment "
                f"{view.segment!r} (first usable row is {parent.valid_from})"
            )
        models = []
        model = None
        for k, t in enumerate(eval_indices):
            if k % config.retrain_stride == 0:
                lo = int(t) - config.window
                model = fit(spec, X[lo:t], y_train[lo:t])
            models.append(model)

    n = eval_indices.size
    direction = np.zeros(n, dtype=np.int8)
    score = np.zeros(n)
    value = np.full(n, np.nan)
    for i, t in enumerate(eval_indices):
        if task == CLASSIFIER:
            direction[i], score[i] = predict_class(models[i], X[t])
        else:
            v = predict_value(models[i], X[t])
            value[i] = v
            score[i] = v
            direction[i] = UP if v > 0 else DOWN

    return PredictionSeries(
        task=task,
        timestamps=parent.timestamps[eval_indices].copy(),
        direction=direction,
        score=score,
        value=value,
        realized_class=y_class[eval_indices].copy(),
        realized_return=y_reg[eval_indices].copy(),
    )


def signal_from_predictions(
    preds: PredictionSeries,
    task: str | None = None,
    threshold: float = 0.0,
) -> PositionSeries:
    """Map predictions to positions.

    Classifiers are always in the market: up -> +1, down -> -1. Regressors
    go long above +threshold, short below -threshold, and otherwise hold the
    previous position (initially flat).
    """
    if task is None:
        task = preds.task
    if task != preds.task:
        raise ValueError(f"prediction series is {preds.task}, not {task}")
    if threshold < 0:
        raise ValueError("threshold must be >= 0")

    if task == CLASSIFIER:
        if threshold != 0.0:
            raise ValueError("dead-band threshold applies to regressors only")
        positions = preds.direction.astype(np.int8)
    else:
        positions = np.zeros(len(preds), dtype=np.int8)
        current = 0
        for i, v in enumerate(preds.value):
            if v > threshold:
                current = 1
            elif v < -threshold:
                current = -1
            positions[i] = current
    return PositionSeries(preds.timestamps.copy(), positions)
