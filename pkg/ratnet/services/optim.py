"""
Adam optimizer and the training-accuracy early-stopping controller.
"""

import enum
import logging
import math
from typing import Dict

import numpy as np

from ..exceptions import NonFiniteError

logger = logging.getLogger(__name__)


class Adam:
    """Adam with bias-corrected moment estimates; state is keyed by parameter slot name."""

    def __init__(self, lr: float = 1e-4, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        if lr <= 0:
            raise ValueError(f"Learning rate must be positive, got {lr}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}
        self.t = 0

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        """Update params in place. A non-finite gradient aborts before anything changes."""
        for name, grad in grads.items():
            if name not in params:
                raise KeyError(f"Gradient for unknown parameter slot '{name}'")
            if grad.shape != params[name].shape:
                raise ValueError(f"Gradient shape {grad.shape} differs from parameter '{name}' shape {params[name].shape}")
            if not np.all(np.isfinite(grad)):
                raise NonFiniteError(f"Non-finite gradient in parameter slot '{name}'", slot=name)

        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t

        for name, param in params.items():
            g = grads[name]
            if name not in self.m:
                self.m[name] = np.zeros_like(param)
                self.v[name] = np.zeros_like(param)
            self.m[name] *= self.beta1
            self.m[name] += (1.0 - self.beta1) * g
            self.v[name] *= self.beta2
            self.v[name] += (1.0 - self.beta2) * (g * g)
            m_hat = self.m[name] / bc1
            v_hat = self.v[name] / bc2
            param -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class Decision(str, enum.Enum):
    CONTINUE = "continue"
    STOP = "stop"


class EarlyStopController:
    """Stops after `patience` consecutive evaluations without a training-accuracy improvement."""

    def __init__(self, patience: int = 10, min_delta: float = 1e-4):
        if patience < 1:
            raise ValueError(f"Patience must be at least 1, got {patience}")
        self.patience = patience
        self.min_delta = min_delta
        self.best_metric = -math.inf
        self.evals_since_improve = 0

    def update(self, train_acc: float) -> Decision:
        if not 0.0 <= train_acc <= 1.0:
            raise ValueError(f"Training accuracy must lie in [0, 1], got {train_acc}")
        if train_acc > self.best_metric + self.min_delta:
            self.best_metric = train_acc
            self.evals_since_improve = 0
            return Decision.CONTINUE
        self.evals_since_improve += 1
        if self.evals_since_improve >= self.patience:
            return Decision.STOP
        return Decision.CONTINUE

    @property
    def improved(self) -> bool:
        """Whether the most recent update was an improvement."""
        return self.evals_since_improve == 0 and self.best_metric > -math.inf


def adam_step(state: Adam, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
    state.step(params, grads)


def early_stop_update(ctrl: EarlyStopController, train_acc: float) -> Decision:
    return ctrl.update(train_acc)
