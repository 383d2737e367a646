"""Seeded random-search hyperparameter optimization maximizing segment PNL.

Each trial draws every dimension from a counter-based generator keyed by
(trial seed, dimension index), so trials are independent, reproducible, and
safe to evaluate in any order or in parallel.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import LabeledDataset, SegmentSplit, split
from .errors import AllTrialsFailed
from .metrics import ClassifierReport, RegressorReport
from .models import Categorical, HyperParamSpace, IntRange, LogUniform, ModelSpec, Uniform, default_space
from .trading import CostModel
from .evaluation import evaluate_segment
from .walkforward import WalkForwardConfig

logger = logging.getLogger(__name__)

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class TunerConfig:
    n_trials: int = 100
    seed: int = 0
    objective_segment: str = "backtest"

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if self.objective_segment not in ("train", "backtest", "forward"):
            raise ValueError(f"unknown segment {self.objective_segment!r}")


@dataclass
class Trial:
    index: int
    params: dict
    objective: float  # PNL percent; -inf when the trial errored
    error: str | None = None
    report: ClassifierReport | RegressorReport | None = None

    def to_record(self) -> dict:
        # JSON has no -inf; failed trials serialize objective as null + error
        record = {
            "index": self.index,
            "params": self.params,
            "objective": None if math.isinf(self.objective) and self.objective < 0 else self.objective,
        }
        if self.error is not None:
            record["error"] = self.error
        return record

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


@dataclass
class TunerResult:
    best: Trial
    trials: list[Trial] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "".join(t.to_json() + "\n" for t in self.trials)


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """Stable 64-bit trial seed; never Python's salted hash()."""
    ss = np.random.SeedSequence([master_seed & _U64, trial_index])
    return int(ss.generate_state(1, np.uint64)[0])


def _dimension_rng(trial_seed: int, dim_index: int) -> np.random.Generator:
    key = np.array([trial_seed & _U64, dim_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_params(space: HyperParamSpace, trial_seed: int) -> dict:
    """One independent draw per dimension; loguniform is uniform in log space."""
    params = {}
    for dim_index, (name, dist) in enumerate(space.dims):
        rng = _dimension_rng(trial_seed, dim_index)
        if isinstance(dist, Uniform):
            params[name] = float(rng.uniform(dist.lo, dist.hi))
        elif isinstance(dist, LogUniform):
            params[name] = float(math.exp(rng.uniform(math.log(dist.lo), math.log(dist.hi))))
        elif isinstance(dist, IntRange):
            params[name] = int(rng.integers(dist.lo, dist.hi + 1))
        elif isinstance(dist, Categorical):
            params[name] = dist.choices[int(rng.integers(0, len(dist.choices)))]
        else:
            raise TypeError(f"unknown distribution {dist!r}")
    return params


def run_study(
    kind,
    window: int,
    data: LabeledDataset,
    seg_split: SegmentSplit,
    cost: CostModel,
    config: TunerConfig,
    mode: str = "trailing",
    retrain_stride: int = 1,
    dead_band: float = 0.0,
    periods_per_year: float = 365.0,
) -> TunerResult:
    """Random-search study over one model kind at one window size.

    Failed trials score -inf (with the error recorded) instead of aborting
    the study; they can never become best unless every trial failed, which
    raises AllTrialsFailed.
    """
    train_view, backtest_view, forward_view = split(data, seg_split)
    views = {"train": train_view, "backtest": backtest_view, "forward": forward_view}
    objective_view = views[config.objective_segment]
    space = default_space(kind)
    wf_config = WalkForwardConfig(window=window, mode=mode, retrain_stride=retrain_stride)

    trials: list[Trial] = []
    best: Trial | None = None
    for index in range(config.n_trials):
        trial_seed = derive_trial_seed(config.seed, index)
        params = sample_params(space, trial_seed)
        spec = ModelSpec(kind, params, seed=trial_seed)
        try:
            outcome = evaluate_segment(
                objective_view,
                spec,
                wf_config,
                cost,
                dead_band=dead_band,
                periods_per_year=periods_per_year,
                train_view=train_view,
            )
            trial = Trial(index, params, outcome.report.pnl_percent, report=outcome.report)
        except Exception as exc:  # noqa: BLE001 - a bad draw must not sink the study
            logger.warning("trial %d failed: %s", index, exc)
            trial = Trial(index, params, float("-inf"), error=f"{type(exc).__name__}: {exc}")
        trials.append(trial)
        if trial.error is None and (best is None or trial.objective > best.objective):
            best = trial

    if best is None:
        raise AllTrialsFailed(f"all {config.n_trials} trials failed")
    return TunerResult(best=best, trials=trials)
