"""Straight-line pure-Python reference implementations used as test oracles.

These stay deliberately independent of the package internals: plain lists,
plain loops, no numpy vectorization, so a bug in the production path cannot
hide in a shared helper.
"""
import math

NAN = float("nan")


def ref_acc_dist(bars):
    """bars: list of (o, h, l, c, v) tuples."""
    out = []
    ad = 0.0
    for _o, h, l, c, v in bars:
        clv = 0.0 if h == l else ((c - l) - (h - c)) / (h - l)
        ad = ad + clv * v
        out.append(ad)
    return out


def ref_mfi(bars, period):
    n = len(bars)
    tp = [(h + l + c) / 3.0 for _o, h, l, c, _v in bars]
    raw = [tp[i] * bars[i][4] for i in range(n)]
    pos, neg = [], []
    for i in range(1, n):
        if tp[i] > tp[i - 1]:
            pos.append(raw[i])
            neg.append(0.0)
        elif tp[i] < tp[i - 1]:
            pos.append(0.0)
            neg.append(raw[i])
        else:
            pos.append(0.0)
            neg.append(0.0)
    out = [NAN] * n
    for t in range(period, n):
        ps = sum(pos[t - period : t])
        ns = sum(neg[t - period : t])
        out[t] = 100.0 * ps / (ps + ns) if ps + ns > 0 else 50.0
    return out


def ref_bollinger(bars, period, k):
    closes = [c for _o, _h, _l, c, _v in bars]
    n = len(closes)
    middle = [NAN] * n
    upper = [NAN] * n
    lower = [NAN] * n
    bandwidth = [NAN] * n
    for t in range(period - 1, n):
        window = closes[t - period + 1 : t + 1]
        m = sum(window) / period
        var = sum((x - m) ** 2 for x in window) / period
        sd = math.sqrt(var)
        middle[t] = m
        upper[t] = m + k * sd
        lower[t] = m - k * sd
        bandwidth[t] = (upper[t] - lower[t]) / m
    return middle, upper, lower, bandwidth


def ref_keltner_width(bars, ema_period, atr_period, mult):
    n = len(bars)
    tp = [(h + l + c) / 3.0 for _o, h, l, c, _v in bars]

    ema = [NAN] * n
    ema[ema_period - 1] = sum(tp[:ema_period]) / ema_period
    alpha = 2.0 / (ema_period + 1.0)
    for t in range(ema_period, n):
        ema[t] = ema[t - 1] + alpha * (tp[t] - ema[t - 1])

    tr = [NAN] * n
    for t in range(1, n):
        _o, h, l, _c, _v = bars[t]
        pc = bars[t - 1][3]
        tr[t] = max(h - l, abs(h - pc), abs(l - pc))
    atr = [NAN] * n
    atr[atr_period] = sum(tr[1 : atr_period + 1]) / atr_period
    for t in range(atr_period + 1, n):
        atr[t] = (atr[t - 1] * (atr_period - 1) + tr[t]) / atr_period

    warmup = max(ema_period, atr_period)
    out = [NAN] * n
    for t in range(warmup, n):
        out[t] = (2.0 * mult * atr[t]) / ema[t]
    return out


def ref_parabolic_sar(bars, af_start, af_step, af_max):
    """Returns (sar list, trend list with +1/-1 and 0 at index 0, flip indices)."""
    n = len(bars)
    highs = [h for _o, h, _l, _c, _v in bars]
    lows = [l for _o, _h, l, _c, _v in bars]
    closes = [c for _o, _h, _l, c, _v in bars]

    sar = [NAN] * n
    trend = [0] * n
    flips = []

    up = closes[1] >= closes[0]
    sar[1] = lows[0] if up else highs[0]
    trend[1] = 1 if up else -1
    ep = max(highs[0], highs[1]) if up else min(lows[0], lows[1])
    af = af_start

    for t in range(2, n):
        cand = sar[t - 1] + af * (ep - sar[t - 1])
        if up:
            cand = min(cand, lows[t - 1], lows[t - 2])
            if lows[t] < cand:
                up = False
                flips.append(t)
                sar[t] = ep
                ep = lows[t]
                af = af_start
            else:
                sar[t] = cand
                if highs[t] > ep:
                    ep = highs[t]
                    af = min(af + af_step, af_max)
        else:
            cand = max(cand, highs[t - 1], highs[t - 2])
            if highs[t] > cand:
                up = True
                flips.append(t)
                sar[t] = ep
                ep = highs[t]
                af = af_start
            else:
                sar[t] = cand
                if lows[t] < ep:
                    ep = lows[t]
                    af = min(af + af_step, af_max)
        trend[t] = 1 if up else -1
    return sar, trend, flips


def ref_log_returns(closes):
    out = [NAN]
    for i in range(1, len(closes)):
        out.append(math.log(closes[i]) - math.log(closes[i - 1]))
    return out


def ref_sharpe(returns, rf, periods_per_year):
    n = len(returns)
    mean = sum(returns) / n
    var = sum((r - mean) ** 2 for r in returns) / (n - 1)
    sd = math.sqrt(var)
    return (mean - rf / periods_per_year) / sd * math.sqrt(periods_per_year)


def ref_confusion(y_true, y_pred):
    tp = fp = fn = tn = 0
    for t, p in zip(y_true, y_pred):
        if t == 1 and p == 1:
            tp += 1
        elif t != 1 and p == 1:
            fp += 1
        elif t == 1 and p != 1:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def ref_classification_metrics(y_true, y_pred):
    tp, fp, fn, tn = ref_confusion(y_true, y_pred)
    n = tp + fp + fn + tn
    accuracy = (tp + tn) / n
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return accuracy, precision, recall, f1


def ref_regression_errors(y_true, y_pred):
    n = len(y_true)
    mae = sum(abs(p - t) for t, p in zip(y_true, y_pred)) / n
    mse = sum((p - t) ** 2 for t, p in zip(y_true, y_pred)) / n
    return mae, mse, math.sqrt(mse)


def ref_r_squared(y_true, y_pred):
    n = len(y_true)
    mean = sum(y_true) / n
    ss_tot = sum((t - mean) ** 2 for t in y_true)
    ss_res = sum((t - p) ** 2 for t, p in zip(y_true, y_pred))
    return 1.0 - ss_res / ss_tot


def ref_line_r2(ys):
    """R^2 of the OLS line of ys against 0..n-1, via explicit fitted residuals."""
    n = len(ys)
    xs = list(range(n))
    xm = sum(xs) / n
    ym = sum(ys) / n
    sxy = sum((x - xm) * (y - ym) for x, y in zip(xs, ys))
    sxx = sum((x - xm) ** 2 for x in xs)
    slope = sxy / sxx
    intercept = ym - slope * xm
    ss_res = sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - ym) ** 2 for y in ys)
    return 1.0 - ss_res / ss_tot


def ref_simulate(positions, simple_returns, fee_bps):
    """Returns (equity list, n_trades)."""
    fee = fee_bps / 1e4
    prev = 0
    equity = []
    total = 0.0
    trades = 0
    for pos, ret in zip(positions, simple_returns):
        step = pos * ret
        if pos != prev:
            step -= fee
            trades += 1
        total += step
        equity.append(total)
        prev = pos
    return equity, trades
