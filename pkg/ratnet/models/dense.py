"""
Fully connected layer with an elementwise activation.
"""

import logging
from typing import Callable, Dict, Tuple

import numpy as np

from .base import Layer

logger = logging.getLogger(__name__)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _relu_grad(z: np.ndarray, a: np.ndarray) -> np.ndarray:
    return (z > 0.0).astype(np.float64)


def _sigmoid_grad(z: np.ndarray, a: np.ndarray) -> np.ndarray:
    return a * (1.0 - a)


def _swish(z: np.ndarray) -> np.ndarray:
    return z * _sigmoid(z)


def _swish_grad(z: np.ndarray, a: np.ndarray) -> np.ndarray:
    s = _sigmoid(z)
    return s + z * s * (1.0 - s)


# name -> (activation, derivative given pre-activation z and activation a)
ACTIVATIONS: Dict[str, Tuple[Callable, Callable]] = {
    "identity": (lambda z: z, lambda z, a: np.ones_like(z)),
    "relu": (lambda z: np.maximum(z, 0.0), _relu_grad),
    "sigmoid": (_sigmoid, _sigmoid_grad),
    "tanh": (np.tanh, lambda z, a: 1.0 - a * a),
    "swish": (_swish, _swish_grad),
}


class DenseLayer(Layer):
    """y = act(X @ W.T + b) with W of shape (n_out, n_in)."""

    def __init__(self, n_in: int, n_out: int, activation: str = "identity"):
        if activation not in ACTIVATIONS:
            raise ValueError(f"Unknown activation '{activation}'. Available: {sorted(ACTIVATIONS)}")
        super().__init__(n_in, n_out)
        self.activation = activation
        self._register("w", np.zeros((n_out, n_in)))
        self._register("b", np.zeros(n_out))

    @staticmethod
    def expected_param_count(n_in: int, n_out: int) -> int:
        return n_out * (n_in + 1)

    def _forward(self, X: np.ndarray) -> np.ndarray:
        act, _ = ACTIVATIONS[self.activation]
        Z = X @ self.params["w"].T + self.params["b"]
        out = act(Z)
        self._cache = {"X": X, "Z": Z, "A": out}
        return out

    def _backward(self, dY: np.ndarray) -> np.ndarray:
        _, act_grad = ACTIVATIONS[self.activation]
        X, Z = self._cache["X"], self._cache["Z"]
        dZ = dY * act_grad(Z, self._cache["A"])
        self.grads["w"] += dZ.T @ X
        self.grads["b"] += dZ.sum(axis=0)
        return dZ @ self.params["w"]

    def describe(self) -> str:
        return f"DenseLayer([{self.n_out},{self.activation}], {self.n_in}->{self.n_out})"
