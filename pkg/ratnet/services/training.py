"""
Experiment runner: builds a model from its spec, trains it with Adam on shuffled batches,
evaluates on a schedule and stops early when training accuracy stalls.
"""

import logging
import math
import sys
import time
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from ..config import Config, DataConfig
from ..exceptions import ConfigError, DimensionMismatchError, NonFiniteError
from ..models import Stack, init_params, parse_model_spec
from ..utils.diffcore import as_matrix, permutation, seeded_rng
from .data import Dataset, endless_batches, gen_blobs, load_csv_features, minmax_apply, minmax_fit, subsample
from .objective import accuracy, mean_squared_error, softmax_cross_entropy
from .optim import Adam, Decision, EarlyStopController
from .reports import EvalRecord, FitReport, RunReport

logger = logging.getLogger(__name__)


class TrainingResult(BaseModel):
    """A finished run: its report and the stack holding the best-evaluation parameters."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    report: RunReport
    stack: Stack


def load_run_data(data: DataConfig) -> Tuple[Dataset, Dataset]:
    """Training and test splits from CSV files or synthetic blobs."""
    if data.blobs is not None:
        blobs = data.blobs
        train = gen_blobs(blobs.classes, blobs.per_class, blobs.spread, seeded_rng(blobs.seed))
        test = gen_blobs(blobs.classes, blobs.per_class, blobs.spread, seeded_rng(blobs.seed + 1))
        return train, test
    if not data.train or not data.test:
        raise ConfigError("Both training and test feature files are required (or configure synthetic blobs)")
    train = load_csv_features(data.train, data.label_col, has_header=data.header)
    test = load_csv_features(data.test, data.label_col, has_header=data.header)
    return train, test


def _evaluate(stack: Stack, dataset: Dataset, chunk: int = 2048) -> Tuple[float, float, int]:
    """Mean loss, accuracy and clamp count of stack over dataset."""
    losses = []
    correct = 0.0
    clamps = 0
    for start in range(0, len(dataset), chunk):
        X = dataset.features[start:start + chunk]
        y = dataset.labels[start:start + chunk]
        logits = stack.forward(X)
        clamps += stack.clamp_count
        loss, _ = softmax_cross_entropy(logits, y)
        losses.append(loss * len(y))
        correct += accuracy(logits, y) * len(y)
    return float(sum(losses) / len(dataset)), float(correct / len(dataset)), clamps


class Trainer:
    """Runs one classification experiment described by a Config."""

    def __init__(self, config: Config):
        if not config.model:
            raise ConfigError("No model spec given")
        self.config = config
        self.spec = parse_model_spec(config.model)

    def _prepare(self, train: Dataset, test: Dataset) -> Tuple[Dataset, Dataset]:
        if train.dim != test.dim:
            raise DimensionMismatchError(f"Training features have {train.dim} columns, test features {test.dim}")
        if self.config.training.normalize == "minmax":
            scaler = minmax_fit(train.features)
            train = train.with_features(minmax_apply(scaler, train.features))
            test = test.with_features(minmax_apply(scaler, test.features))
        return train, test

    def run(self, train: Optional[Dataset] = None, test: Optional[Dataset] = None, stack: Optional[Stack] = None) -> TrainingResult:
        cfg = self.config.training
        if train is None or test is None:
            train, test = load_run_data(self.config.data)
        train, test = self._prepare(train, test)
        n_classes = int(max(train.labels.max(), test.labels.max())) + 1

        rng = seeded_rng(cfg.seed)
        if stack is None:
            stack = init_params(
                self.spec, train.dim, n_classes, rng,
                features=train.features, guard_eps=self.config.layers.guard_eps,
            )
        elif stack.n_in != train.dim or stack.n_out < n_classes:
            raise DimensionMismatchError(
                f"Model maps {stack.n_in}->{stack.n_out} but data has {train.dim} features and {n_classes} classes"
            )
        eval_set = subsample(train, cfg.eval_subsample, rng)
        test = subsample(test, cfg.test_subsample, rng)

        adam = Adam(cfg.lr, self.config.adam.beta1, self.config.adam.beta2, self.config.adam.eps)
        controller = EarlyStopController(cfg.patience, cfg.min_delta)
        params, grads = stack.parameters(), stack.gradients()
        batch_iter = endless_batches(train, cfg.batch, rng)

        _, _, initial_clamps = _evaluate(stack, eval_set)
        logger.info(
            f"Training {self.spec.text} ({stack.param_count} parameters) on {len(train)} rows, "
            f"testing on {len(test)} rows, initial clamp count {initial_clamps}"
        )

        series = []
        best_snapshot: Optional[Dict[str, np.ndarray]] = None
        best_step, best_acc = 0, None
        stopped_early = False
        steps_run = 0
        started = time.perf_counter()

        with tqdm(total=cfg.max_steps, disable=not self.config.output.progress, desc=self.spec.text, file=sys.stderr) as bar:
            for step in range(1, cfg.max_steps + 1):
                X, y = next(batch_iter)
                stack.zero_grad()
                try:
                    logits = stack.forward(X)
                    loss, dlogits = softmax_cross_entropy(logits, y)
                    if not math.isfinite(loss):
                        raise NonFiniteError(f"Training loss became non-finite at step {step}")
                    stack.backward(dlogits)
                    adam.step(params, grads)
                except NonFiniteError as e:
                    e.step = step
                    logger.error(f"Numeric failure at step {step}: {e}")
                    raise
                steps_run = step
                bar.update(1)

                if step % cfg.eval_every:
                    continue
                train_loss, train_acc, clamps = _evaluate(stack, eval_set)
                _, test_acc, _ = _evaluate(stack, test)
                wall_ms = (time.perf_counter() - started) * 1000.0 if self.config.output.wall_clock else 0.0
                series.append(EvalRecord(
                    step=step, train_loss=train_loss, train_acc=train_acc,
                    test_acc=test_acc, wall_ms=wall_ms, clamp_count=clamps,
                ))
                logger.info(
                    f"step {step}: loss {train_loss:.5f} train acc {train_acc:.4f} "
                    f"test acc {test_acc:.4f} clamps {clamps}"
                )
                decision = controller.update(train_acc)
                if controller.improved:
                    best_snapshot, best_step, best_acc = stack.snapshot(), step, test_acc
                if decision == Decision.STOP:
                    logger.info(f"Early stopping at step {step}: no training-accuracy gain in {cfg.patience} evaluations")
                    stopped_early = True
                    break

        _, final_acc, _ = _evaluate(stack, test)
        if best_snapshot is not None:
            stack.restore(best_snapshot)
        else:
            best_acc = final_acc

        report = RunReport(
            model=self.spec.text,
            param_count=stack.param_count,
            n_in=stack.n_in,
            n_out=stack.n_out,
            feature_extractor=self.config.data.extractor or train.extractor,
            series=series,
            final_acc=final_acc,
            best_acc=best_acc,
            best_step=best_step,
            max_test_acc=max([r.test_acc for r in series] + [final_acc]),
            steps_run=steps_run,
            stopped_early=stopped_early,
            initial_clamp_count=initial_clamps,
            config=self.config.model_dump(),
        )
        return TrainingResult(report=report, stack=stack)


def run_experiment(config: Config, train: Optional[Dataset] = None, test: Optional[Dataset] = None, stack: Optional[Stack] = None) -> RunReport:
    """Train and evaluate one configuration; see Trainer.run."""
    return Trainer(config).run(train, test, stack).report


# Regression

REGRESSION_TARGETS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "rational": lambda x: (x ** 3 - x) / (x ** 2 + 2.0),
    "exp": np.exp,
    "sin": np.sin,
}


def regression_samples(target: str, samples: int = 512, low: float = -2.0, high: float = 2.0) -> Tuple[np.ndarray, np.ndarray]:
    """Evenly spaced 1-d inputs and the named target function's values."""
    if target not in REGRESSION_TARGETS:
        raise ConfigError(f"Unknown regression target '{target}'. Available: {sorted(REGRESSION_TARGETS)}")
    x = np.linspace(low, high, samples).reshape(-1, 1)
    return x, REGRESSION_TARGETS[target](x)


def fit_function(
    model: str,
    x: np.ndarray,
    y: np.ndarray,
    lr: float = 1e-3,
    steps: int = 20000,
    batch: int = 64,
    seed: int = 42,
    record_every: int = 500,
    guard_eps: float = 1e-12,
    target: str = "custom",
) -> Tuple[Stack, FitReport]:
    """Fit a network to regression data with mean squared error and Adam."""
    spec = parse_model_spec(model)
    x = as_matrix(x, name="inputs")
    y = as_matrix(y, name="targets")
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"{x.shape[0]} inputs but {y.shape[0]} targets")
    rng = seeded_rng(seed)
    stack = init_params(spec, x.shape[1], y.shape[1], rng, features=x, guard_eps=guard_eps)
    adam = Adam(lr)
    params, grads = stack.parameters(), stack.gradients()

    series = []
    order = permutation(x.shape[0], rng)
    cursor = 0
    for step in range(1, steps + 1):
        if cursor >= len(order):
            order, cursor = permutation(x.shape[0], rng), 0
        index = order[cursor:cursor + batch]
        cursor += batch
        stack.zero_grad()
        loss, dpred = mean_squared_error(stack.forward(x[index]), y[index])
        if not math.isfinite(loss):
            raise NonFiniteError(f"Regression loss became non-finite at step {step}", step=step)
        stack.backward(dpred)
        adam.step(params, grads)
        if step % record_every == 0:
            mse, _ = mean_squared_error(stack.forward(x), y)
            series.append({"step": step, "mse": mse})
            logger.debug(f"fit step {step}: mse {mse:.6g}")

    final_mse, _ = mean_squared_error(stack.forward(x), y)
    logger.info(f"Fitted {spec.text} to {target}: final mse {final_mse:.6g}")
    return stack, FitReport(
        model=spec.text, param_count=stack.param_count, target=target,
        seed=seed, series=series, final_mse=final_mse,
    )
