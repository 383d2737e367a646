"""Statistical evaluation: Sharpe, confusion-matrix metrics, error metrics, R2.

Zero-denominator conventions keep reports total: precision/recall/F1 fall to
0, while Sharpe and R2 are reported as undefined (None) rather than infinite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .direction import UP
from .errors import (
    ConstantCurve,
    ConstantTruth,
    LengthMismatch,
    TooFewObservations,
    ZeroVolatility,
)
from .trading import EquityCurve, TradeLedger, count_trades, pnl_percent
from .walkforward import PredictionSeries


@dataclass(frozen=True)
class ClassifierReport:
    model: str
    window: int
    segment: str
    pnl_percent: float
    sharpe: float | None
    r2: float | None
    accuracy: float
    f1: float
    precision: float
    recall: float
    n_trades: int


@dataclass(frozen=True)
class RegressorReport:
    model: str
    window: int
    segment: str
    pnl_percent: float
    sharpe: float | None
    r2: float | None
    mae: float
    mse: float
    rmse: float
    n_trades: int


def sharpe(step_returns, risk_free_rate: float = 0.0, periods_per_year: float = 365.0) -> float:
    """Annualized mean excess return over sample (n-1) volatility."""
    r = np.asarray(step_returns, dtype=np.float64)
    if r.size < 2:
        raise TooFewObservations(f"Sharpe needs at least 2 observations, got {r.size}")
    std = float(r.std(ddof=1))
    if std == 0.0:
        raise ZeroVolatility("returns have zero volatility; Sharpe is undefined")
    excess = float(r.mean()) - risk_free_rate / periods_per_year
    return excess / std * math.sqrt(periods_per_year)


def classification_metrics(y_true, y_pred) -> tuple[float, float, float, float]:
    """(accuracy, precision, recall, f1) with up as the positive class."""
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if t.size != p.size:
        raise LengthMismatch(f"{t.size} truths vs {p.size} predictions")
    if t.size == 0:
        raise LengthMismatch("empty label sequences")
    tp = int(np.count_nonzero((t == UP) & (p == UP)))
    fp = int(np.count_nonzero((t != UP) & (p == UP)))
    fn = int(np.count_nonzero((t == UP) & (p != UP)))
    accuracy = float(np.count_nonzero(t == p)) / t.size
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    return accuracy, precision, recall, f1


def regression_errors(y_true, y_pred) -> tuple[float, float, float]:
    """(mae, mse, rmse)."""
    t = np.asarray(y_true, dtype=np.float64)
    p = np.asarray(y_pred, dtype=np.float64)
    if t.size != p.size:
        raise LengthMismatch(f"{t.size} truths vs {p.size} predictions")
    if t.size == 0:
        raise LengthMismatch("empty sequences")
    err = p - t
    mae = float(np.abs(err).mean())
    mse = float((err**2).mean())
    return mae, mse, math.sqrt(mse)


def r_squared(y_true, y_pred) -> float:
    """1 - SS_res/SS_tot; requires a non-constant truth."""
    t = np.asarray(y_true, dtype=np.float64)
    p = np.asarray(y_pred, dtype=np.float64)
    if t.size != p.size:
        raise LengthMismatch(f"{t.size} truths vs {p.size} predictions")
    if t.size < 2:
        raise TooFewObservations("R2 needs at least 2 observations")
    ss_tot = float(((t - t.mean()) ** 2).sum())
    if ss_tot == 0.0:
        raise ConstantTruth("R2 is undefined for a constant truth")
    ss_res = float(((t - p) ** 2).sum())
    return 1.0 - ss_res / ss_tot


def equity_trend_r2(curve: EquityCurve) -> float:
    """R2 of the least-squares line of equity against step index.

    Stands in for a 'consistency of returns' reading of the classifier-table
    R2 column: 1.0 means perfectly steady accumulation.
    """
    y = np.asarray(curve.equity, dtype=np.float64)
    if y.size < 3:
        raise TooFewObservations("equity trend R2 needs at least 3 points")
    sy = float(((y - y.mean()) ** 2).sum())
    if sy == 0.0:
        raise ConstantCurve("equity curve is constant; trend R2 is undefined")
    x = np.arange(y.size, dtype=np.float64)
    sxy = float(((x - x.mean()) * (y - y.mean())).sum())
    sx = float(((x - x.mean()) ** 2).sum())
    return sxy * sxy / (sx * sy)


def _maybe(fn, *args):
    try:
        return fn(*args)
    except (ZeroVolatility, ConstantTruth, ConstantCurve, TooFewObservations):
        return None


def build_classifier_report(
    model: str,
    window: int,
    segment: str,
    preds: PredictionSeries,
    curve: EquityCurve,
    ledger: TradeLedger,
    periods_per_year: float = 365.0,
    risk_free_rate: float = 0.0,
) -> ClassifierReport:
    accuracy, precision, recall, f1 = classification_metrics(preds.realized_class, preds.direction)
    return ClassifierReport(
        model=model,
        window=window,
        segment=segment,
        pnl_percent=pnl_percent(curve),
        sharpe=_maybe(sharpe, curve.step_returns, risk_free_rate, periods_per_year),
        r2=_maybe(equity_trend_r2, curve),
        accuracy=accuracy,
        f1=f1,
        precision=precision,
        recall=recall,
        n_trades=count_trades(ledger),
    )


def build_regressor_report(
    model: str,
    window: int,
    segment: str,
    preds: PredictionSeries,
    curve: EquityCurve,
    ledger: TradeLedger,
    periods_per_year: float = 365.0,
    risk_free_rate: float = 0.0,
) -> RegressorReport:
    mae, mse, rmse = regression_errors(preds.realized_return, preds.value)
    return RegressorReport(
        model=model,
        window=window,
        segment=segment,
        pnl_percent=pnl_percent(curve),
        sharpe=_maybe(sharpe, curve.step_returns, risk_free_rate, periods_per_year),
        r2=_maybe(r_squared, preds.realized_return, preds.value),
        mae=mae,
        mse=mse,
        rmse=rmse,
        n_trades=count_trades(ledger),
    )
