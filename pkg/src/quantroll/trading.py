"""Position series -> trades, costs, equity curve, PNL.

PNL is additive on unit notional: each step contributes position times the
realized simple return, minus a fee whenever the position changes. The
opening entry counts as a trade and is charged; a full flip is one change
and one fee.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch


@dataclass(frozen=True)
class CostModel:
    """Fee in basis points of notional, charged per position change."""

    fee_bps: float = 0.0

    def __post_init__(self):
        if self.fee_bps < 0:
            raise ValueError("fee_bps must be >= 0")


@dataclass
class PositionSeries:
    """Per-interval directional exposure in {-1, 0, +1}."""

    timestamps: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=np.int64)
        self.positions = np.asarray(self.positions, dtype=np.int8)
        if self.positions.size != self.timestamps.size:
            raise LengthMismatch("positions and timestamps must align")
        if not np.isin(self.positions, (-1, 0, 1)).all():
            raise ValueError("positions must lie in {-1, 0, +1}")

    def __len__(self) -> int:
        return int(self.positions.size)


@dataclass
class EquityCurve:
    """Cumulative PNL fraction per step (starts from the first step's return)."""

    timestamps: np.ndarray
    equity: np.ndarray
    step_returns: np.ndarray

    def __len__(self) -> int:
        return int(self.equity.size)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("timestamp", "equity_fraction"))
        for ts, eq in zip(self.timestamps, self.equity):
            writer.writerow((int(ts), repr(float(eq))))
        return out.getvalue()


@dataclass(frozen=True)
class TradeEvent:
    timestamp: int
    old_position: int
    new_position: int


@dataclass
class TradeLedger:
    entries: list[TradeEvent] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.entries)


def simulate(
    positions: PositionSeries,
    simple_returns: np.ndarray,
    cost: CostModel = CostModel(),
) -> tuple[EquityCurve, TradeLedger]:
    """Run the position series against realized per-step simple returns.

    The position at step t earns pos_t * r_t over (t, t+1]; fees apply on
    every change from the previous position, with flat (0) as the state
    before the first step.
    """
    returns = np.asarray(simple_returns, dtype=np.float64)
    if returns.size != len(positions):
        raise LengthMismatch(f"{len(positions)} positions vs {returns.size} returns")
    if returns.size and not np.isfinite(returns).all():
        raise ValueError("returns must be finite")

    pos = positions.positions.astype(np.float64)
    fee = cost.fee_bps / 1e4
    prev = np.concatenate([[0.0], pos[:-1]])
    changed = pos != prev
    step = pos * returns - fee * changed
    equity = np.cumsum(step)

    ledger = TradeLedger(
        [
            TradeEvent(int(positions.timestamps[i]), int(prev[i]), int(pos[i]))
            for i in np.nonzero(changed)[0]
        ]
    )
    return EquityCurve(positions.timestamps.copy(), equity, step), ledger


def pnl_percent(curve: EquityCurve) -> float:
    """Final cumulative PNL as a percentage of initial notional."""
    if len(curve) == 0:
        raise ValueError("empty equity curve")
    return 100.0 * float(curve.equity[-1])


def count_trades(ledger: TradeLedger) -> int:
    return ledger.count
