"""
Training commands: train, sweep, table and fit1d.
"""

import logging
import re
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click

from ..config import Config, build_config
from ..exceptions import ConfigError
from ..models import get_suite, param_count, parse_model_spec
from ..services.reports import RunReport, emit_table, load_report, write_fit, write_run
from ..services.training import fit_function, regression_samples, run_experiment
from .main import cli

logger = logging.getLogger(__name__)


def _parse_blobs(text: Optional[str]) -> Optional[Dict[str, Any]]:
    """'CLASSES,PER_CLASS,SPREAD[,SEED]' -> blobs config dict."""
    if text is None:
        return None
    parts = [part.strip() for part in text.split(",")]
    if len(parts) not in (3, 4):
        raise ConfigError(f"--blobs expects CLASSES,PER_CLASS,SPREAD[,SEED], got '{text}'")
    try:
        blobs = {"classes": int(parts[0]), "per_class": int(parts[1]), "spread": float(parts[2])}
        if len(parts) == 4:
            blobs["seed"] = int(parts[3])
    except ValueError:
        raise ConfigError(f"--blobs expects numbers, got '{text}'")
    return blobs


def training_options(func):
    """Flags shared by train and sweep; unset flags keep the configured values."""
    options = [
        click.option("--train", "train_path", type=click.Path(dir_okay=False), help="Training feature CSV"),
        click.option("--test", "test_path", type=click.Path(dir_okay=False), help="Test feature CSV"),
        click.option("--label-col", default=None, help="Label column name (default: label)"),
        click.option("--no-header", is_flag=True, default=False, help="CSV files have no header row; --label-col is an index"),
        click.option("--blobs", default=None, help="Synthetic data CLASSES,PER_CLASS,SPREAD[,SEED] instead of files"),
        click.option("--extractor", default=None, help="Feature extractor label recorded in reports"),
        click.option("--normalize", type=click.Choice(["none", "minmax"]), default=None),
        click.option("--lr", type=float, default=None),
        click.option("--batch", type=int, default=None),
        click.option("--seed", type=int, default=None),
        click.option("--max-steps", type=int, default=None),
        click.option("--eval-every", type=int, default=None),
        click.option("--eval-subsample", type=int, default=None),
        click.option("--patience", type=int, default=None),
        click.option("--min-delta", type=float, default=None),
        click.option("--test-subsample", type=int, default=None),
        click.option("--progress/--no-progress", default=None, help="Progress bar on stderr"),
        click.option("--wall-clock/--no-wall-clock", default=None, help="Record wall time in metrics"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _overrides(kwargs: Dict[str, Any]) -> Dict[str, Any]:
    overrides = {
        "data.train": kwargs["train_path"],
        "data.test": kwargs["test_path"],
        "data.label_col": kwargs["label_col"],
        "data.header": False if kwargs["no_header"] else None,
        "data.blobs": _parse_blobs(kwargs["blobs"]),
        "data.extractor": kwargs["extractor"],
        "training.normalize": kwargs["normalize"],
        "training.lr": kwargs["lr"],
        "training.batch": kwargs["batch"],
        "training.seed": kwargs["seed"],
        "training.max_steps": kwargs["max_steps"],
        "training.eval_every": kwargs["eval_every"],
        "training.eval_subsample": kwargs["eval_subsample"],
        "training.patience": kwargs["patience"],
        "training.min_delta": kwargs["min_delta"],
        "training.test_subsample": kwargs["test_subsample"],
        "output.progress": kwargs["progress"],
        "output.wall_clock": kwargs["wall_clock"],
    }
    return overrides


def model_slug(model: str) -> str:
    """Directory-safe name for a model spec."""
    return re.sub(r"[^A-Za-z0-9]+", "_", model).strip("_")


@cli.command()
@click.option("--model", default=None, help="Model spec, e.g. ratio:[2/2,8]")
@training_options
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Run directory")
@click.pass_context
def train(ctx: click.Context, model: Optional[str], out_dir: Optional[str], **kwargs):
    """Train one model and write metrics.csv and report.json."""
    base: Config = ctx.obj["config"]
    config = base.with_overrides({"model": model, "output.out_dir": out_dir, **_overrides(kwargs)})
    report = run_experiment(config)
    if config.output.out_dir:
        write_run(report, config.output.out_dir)
    click.echo(emit_table([report]), nl=False)


def _run_to_dir(config_data: Dict[str, Any]) -> Dict[str, Any]:
    """Worker entry point: run one config and store its outputs."""
    config = build_config(config_data)
    report = run_experiment(config)
    if config.output.out_dir:
        write_run(report, config.output.out_dir)
    return report.model_dump()


def _sweep_models(models: Tuple[str, ...], suite: Optional[str]) -> List[str]:
    chosen = list(models)
    if suite:
        chosen.extend(row.model for row in get_suite(suite).rows)
    if not chosen:
        raise ConfigError("Give at least one --model or a --suite")
    for model in chosen:
        parse_model_spec(model)
    return chosen


@cli.command()
@click.option("--model", "models", multiple=True, help="Model spec; repeat for several")
@click.option("--suite", default=None, help="Named structure list (see `params --suite`)")
@training_options
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Parent directory of the run directories")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes")
@click.pass_context
def sweep(ctx: click.Context, models: Tuple[str, ...], suite: Optional[str], out_dir: str, jobs: int, **kwargs):
    """Train several models on the same data, one run directory each."""
    base: Config = ctx.obj["config"].with_overrides(_overrides(kwargs))
    if jobs < 1:
        raise ConfigError(f"--jobs must be at least 1, got {jobs}")
    configs = [
        base.with_overrides({"model": model, "output.out_dir": str(Path(out_dir) / model_slug(model))}).model_dump()
        for model in _sweep_models(models, suite)
    ]
    if jobs == 1:
        results = [_run_to_dir(config) for config in configs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_to_dir, configs))
    click.echo(emit_table([RunReport.model_validate(result) for result in results]), nl=False)


@cli.command()
@click.option("--runs", "run_dirs", multiple=True, type=click.Path(), help="Run directory (repeatable)")
@click.argument("extra_runs", nargs=-1, type=click.Path())
def table(run_dirs: Tuple[str, ...], extra_runs: Tuple[str, ...]):
    """Summarize run directories as a structure/parameters/accuracy table."""
    reports = [load_report(run_dir) for run_dir in run_dirs + extra_runs]
    click.echo(emit_table(reports), nl=False)


@cli.command()
@click.option("--model", required=True, help="Model spec, e.g. ratio:[3/2,2]")
@click.option("--target", default="rational", show_default=True, help="rational, exp or sin")
@click.option("--samples", type=int, default=512, show_default=True)
@click.option("--steps", type=int, default=20000, show_default=True)
@click.option("--lr", type=float, default=1e-3, show_default=True)
@click.option("--batch", type=int, default=64, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="Write the fit report as JSON")
@click.pass_context
def fit1d(ctx: click.Context, model: str, target: str, samples: int, steps: int, lr: float, batch: int, seed: int, out_path: Optional[str]):
    """Fit a network to a 1-d function on [-2, 2] by mean squared error."""
    if samples < 1 or steps < 0 or batch < 1 or lr <= 0:
        raise ConfigError("--samples and --batch must be >= 1, --steps >= 0 and --lr > 0")
    x, y = regression_samples(target, samples)
    guard_eps = ctx.obj["config"].layers.guard_eps
    _, report = fit_function(model, x, y, lr=lr, steps=steps, batch=batch, seed=seed, guard_eps=guard_eps, target=target)
    if out_path:
        write_fit(report, out_path)
    click.echo(f"{report.model} | {report.param_count} | mse {report.final_mse:.6g}")
