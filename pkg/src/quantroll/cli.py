"""Batch CLI.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 engine error.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import sys
from pathlib import Path

import click

from .candles import FetchConfig, fetch_candles, parse_candles_csv, serialize_candles_csv, validate_series
from .dataset import build_features, label, log_diff
from .errors import ConfigError, DataError, QuantrollError, UnknownSelector
from .indicators import IndicatorConfig, acc_dist, bollinger, keltner_width, mfi, parabolic_sar
from .metrics import ClassifierReport, RegressorReport
from .models import ALL_KINDS, coerce_kind
from .report import emit_table
from .run import RunConfig, load_candles, make_run_id, parse_instant, prepare_dataset, run_experiment
from .trading import CostModel
from .tuner import TunerConfig, run_study

logger = logging.getLogger(__name__)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def cli(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


def _load_config(path: str) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return RunConfig.from_json(text)


def _apply_overrides(config: RunConfig, seed, models, windows, fee_bps, mode, out, jobs, tuner_trials) -> RunConfig:
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if models is not None:
        names = [m.strip() for m in models.split(",") if m.strip()]
        changes["models"] = ALL_KINDS if names in ([], ["all"]) else tuple(coerce_kind(n) for n in names)
    if windows is not None:
        try:
            changes["windows"] = tuple(int(w) for w in windows.split(",") if w.strip())
        except ValueError:
            raise ConfigError(f"bad windows list {windows!r}") from None
    if fee_bps is not None:
        changes["fee_bps"] = fee_bps
    if mode is not None:
        changes["mode"] = mode
    if out is not None:
        changes["out_dir"] = out
    if jobs is not None:
        changes["jobs"] = jobs
    if tuner_trials is not None:
        changes["tuner_trials"] = tuner_trials
    return dataclasses.replace(config, **changes) if changes else config


def _read_series(csv_path: str | None, interval: int, fetch_opts: dict | None):
    if csv_path is not None:
        try:
            text = Path(csv_path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read {csv_path}: {exc}") from None
        return parse_candles_csv(text, interval)
    if not fetch_opts or not fetch_opts.get("base_url"):
        raise ConfigError("provide --csv or the fetch options (--base-url/--path-template/...)")
    fc = FetchConfig(
        base_url=fetch_opts["base_url"],
        path_template=fetch_opts["path_template"],
        page_limit=fetch_opts["page_limit"],
        max_retries=fetch_opts["max_retries"],
        retry_backoff=fetch_opts["retry_backoff"],
    )
    return fetch_candles(fc, fetch_opts["symbol"], interval, fetch_opts["start"], fetch_opts["end"])


@cli.command()
@click.option("--csv", "csv_path", type=str, default=None, help="Input candles CSV.")
@click.option("--base-url", default=None)
@click.option("--path-template", default="")
@click.option("--symbol", default="")
@click.option("--start", default=None)
@click.option("--end", default=None)
@click.option("--page-limit", default=1000, show_default=True)
@click.option("--max-retries", default=3, show_default=True)
@click.option("--retry-backoff", default=1.0, show_default=True)
@click.option("--interval", default=86400, show_default=True, help="Candle interval in seconds.")
@click.option("--out", "out_path", default=None, help="Write the validated, normalized CSV here.")
def ingest(csv_path, base_url, path_template, symbol, start, end, page_limit, max_retries, retry_backoff, interval, out_path):
    """Parse or fetch candles, validate spacing, and store a normalized CSV."""
    fetch_opts = None
    if base_url is not None:
        fetch_opts = {
            "base_url": base_url,
            "path_template": path_template,
            "symbol": symbol,
            "start": parse_instant(start),
            "end": parse_instant(end),
            "page_limit": page_limit,
            "max_retries": max_retries,
            "retry_backoff": retry_backoff,
        }
    series = _read_series(csv_path, interval, fetch_opts)
    report = validate_series(series)
    if not report.is_clean:
        for finding in report.findings[:10]:
            click.echo(
                f"gap of {finding.gap}s between {finding.prev_timestamp} and {finding.next_timestamp}",
                err=True,
            )
        raise DataError(f"series has {len(report.findings)} spacing violation(s)")
    if out_path:
        Path(out_path).write_text(serialize_candles_csv(series), encoding="utf-8")
    click.echo(f"{len(series)} candles, {series.timestamps[0]}..{series.timestamps[-1]}, no gaps")


_INDICATORS = ("acc_dist", "mfi", "bb_bandwidth", "kc_width", "parabolic_sar")


@cli.command()
@click.option("--csv", "csv_path", required=True, help="Input candles CSV.")
@click.option("--interval", default=86400, show_default=True)
@click.option("--config", "config_path", default=None, help="Run config supplying indicator parameters.")
@click.option("--indicator", type=click.Choice(_INDICATORS), default=None, help="Dump one raw indicator instead of the feature frame.")
@click.option("--out", "out_path", default=None, help="Output CSV path (default: stdout).")
def features(csv_path, interval, config_path, indicator, out_path):
    """Dump the labeled feature frame (or one raw indicator) as CSV."""
    ind_config = _load_config(config_path).indicators if config_path else IndicatorConfig()
    series = _read_series(csv_path, interval, None)
    if indicator is None:
        text = label(build_features(series, ind_config), log_diff(series)).to_csv()
    else:
        if indicator == "acc_dist":
            ind = acc_dist(series)
        elif indicator == "mfi":
            ind = mfi(series, ind_config.mfi_period)
        elif indicator == "bb_bandwidth":
            ind = bollinger(series, ind_config.bb_period, ind_config.bb_k).bandwidth
        elif indicator == "kc_width":
            ind = keltner_width(series, ind_config.kc_ema_period, ind_config.kc_atr_period, ind_config.kc_mult)
        else:
            ind, _ = parabolic_sar(series, ind_config.sar_af_start, ind_config.sar_af_step, ind_config.sar_af_max)
        lines = ["timestamp,value"]
        for i in range(ind.warmup_len, len(ind)):
            lines.append(f"{int(series.timestamps[i])},{float(ind.values[i])!r}")
        text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@cli.command()
@click.option("--config", "config_path", required=True, help="JSON run config.")
@click.option("--seed", type=int, default=None)
@click.option("--models", default=None, help="Comma-separated model kinds, or 'all'.")
@click.option("--windows", default=None, help="Comma-separated window sizes.")
@click.option("--fee-bps", type=float, default=None)
@click.option("--mode", type=click.Choice(["trailing", "global"]), default=None)
@click.option("--out", default=None, help="Output directory for runs.")
@click.option("--jobs", type=int, default=None)
@click.option("--tuner-trials", type=int, default=None)
@click.option("--run-id", default=None, help="Fix the run directory name (default: timestamp + config hash).")
def run(config_path, seed, models, windows, fee_bps, mode, out, jobs, tuner_trials, run_id):
    """Run the full experiment and persist reports, curves and trial logs."""
    config = _apply_overrides(_load_config(config_path), seed, models, windows, fee_bps, mode, out, jobs, tuner_trials)
    run_id = run_id or make_run_id(config)
    artifact = run_experiment(config, run_id=run_id)
    click.echo(f"run {run_id}: {len(artifact.reports)} reports under {Path(config.out_dir) / run_id}")
    for task in ("classifier", "regressor"):
        rows = [r for r in artifact.reports if (isinstance(r, ClassifierReport)) == (task == "classifier")]
        if rows:
            click.echo(emit_table(rows, task))


@cli.command()
@click.option("--config", "config_path", required=True)
@click.option("--model", "model_name", required=True, help="Model kind to tune (e.g. knn_c).")
@click.option("--window", type=int, required=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", default=None, help="Write the trial log (trials.jsonl) here.")
def tune(config_path, model_name, window, trials, seed, out_path):
    """Random-search one model's hyperparameters for best backtest PNL."""
    config = _load_config(config_path)
    kind = coerce_kind(model_name)
    series = load_candles(config)
    dataset = prepare_dataset(series, config.indicators)
    result = run_study(
        kind,
        window,
        dataset,
        config.segment_split(series),
        CostModel(config.fee_bps),
        TunerConfig(trials, seed=seed if seed is not None else config.seed),
        mode=config.mode,
        retrain_stride=config.retrain_stride,
        dead_band=config.dead_band,
        periods_per_year=config.periods_per_year,
    )
    if out_path:
        Path(out_path).write_text(result.to_jsonl(), encoding="utf-8")
    click.echo(json.dumps({"best_index": result.best.index, "objective": result.best.objective, "params": result.best.params}, sort_keys=True))


def _reports_from_rows(rows: list[dict]):
    reports = []
    for row in rows:
        row = dict(row)
        task = row.pop("task")
        cls = ClassifierReport if task == "classifier" else RegressorReport
        reports.append(cls(**row))
    return reports


@cli.command("report")
@click.option("--run-dir", required=True, help="A persisted runs/<run-id> directory.")
@click.option("--task", type=click.Choice(["classifier", "regressor", "both"]), default="both", show_default=True)
def report_cmd(run_dir, task):
    """Re-render the metrics tables from a persisted run."""
    path = Path(run_dir) / "report.json"
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from None
    reports = _reports_from_rows(payload["reports"])
    tasks = ("classifier", "regressor") if task == "both" else (task,)
    for t in tasks:
        rows = [r for r in reports if (isinstance(r, ClassifierReport)) == (t == "classifier")]
        if rows:
            click.echo(emit_table(rows, t))


@cli.command("export-equity")
@click.option("--run-dir", required=True)
@click.option("--model", "model_name", required=True)
@click.option("--window", type=int, required=True)
@click.option("--segment", type=click.Choice(["backtest", "forward"]), required=True)
@click.option("--out", "out_path", default=None, help="Output CSV path (default: stdout).")
def export_equity_cmd(run_dir, model_name, window, segment, out_path):
    """Print one persisted equity curve as timestamp,equity_fraction CSV."""
    path = Path(run_dir) / "equity" / f"{model_name}_{window}_{segment}.csv"
    if not path.exists():
        raise UnknownSelector(f"no equity curve at {path}")
    text = path.read_text(encoding="utf-8")
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        return 1
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except QuantrollError as exc:
        click.echo(f"engine error: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
