"""
Gaussian radial basis function layer.
"""

import logging

import numpy as np

from .base import Layer

logger = logging.getLogger(__name__)


class RBFLayer(Layer):
    """
    k_l = exp(-gamma_l * ||x - c_l||^2), y_i = sum_l w_il k_l + b_i.

    Widths are stored as log gamma so they stay positive under any update.
    """

    def __init__(self, n_in: int, hidden: int, n_out: int):
        if hidden < 1:
            raise ValueError(f"RBF hidden size must be at least 1, got {hidden}")
        super().__init__(n_in, n_out)
        self.hidden = hidden
        self._register("centers", np.zeros((hidden, n_in)))
        self._register("log_gamma", np.zeros(hidden))
        self._register("out_w", np.zeros((n_out, hidden)))
        self._register("out_b", np.zeros(n_out))

    @staticmethod
    def expected_param_count(n_in: int, hidden: int, n_out: int) -> int:
        return hidden * (n_in + n_out + 1) + n_out

    @property
    def gamma(self) -> np.ndarray:
        return np.exp(self.params["log_gamma"])

    def squared_distances(self, X: np.ndarray) -> np.ndarray:
        centers = self.params["centers"]
        d2 = np.empty((X.shape[0], self.hidden))
        for l in range(self.hidden):
            diff = X - centers[l]
            d2[:, l] = np.einsum("bn,bn->b", diff, diff)
        return d2

    def _forward(self, X: np.ndarray) -> np.ndarray:
        d2 = self.squared_distances(X)
        K = np.exp(-self.gamma * d2)
        self._cache = {"X": X, "d2": d2, "K": K}
        return K @ self.params["out_w"].T + self.params["out_b"]

    def _backward(self, dY: np.ndarray) -> np.ndarray:
        X, d2, K = self._cache["X"], self._cache["d2"], self._cache["K"]
        gamma = self.gamma
        centers = self.params["centers"]

        self.grads["out_w"] += dY.T @ K
        self.grads["out_b"] += dY.sum(axis=0)

        dK = dY @ self.params["out_w"]
        dd2 = -gamma * K * dK
        self.grads["log_gamma"] += -(dK * K * d2).sum(axis=0) * gamma
        self.grads["centers"] += -2.0 * (dd2.T @ X - dd2.sum(axis=0)[:, None] * centers)
        return 2.0 * (dd2.sum(axis=1)[:, None] * X - dd2 @ centers)

    def describe(self) -> str:
        return f"RBFLayer({self.hidden}, {self.n_in}->{self.n_out})"
