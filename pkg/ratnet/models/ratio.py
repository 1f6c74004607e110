"""
Ratio layer: each hidden unit is a ratio of products of affine forms of the input,
and the outputs are a linear combination of the hidden ratios.
"""

import logging
from typing import Tuple

import numpy as np

from .base import Layer

logger = logging.getLogger(__name__)

DEFAULT_GUARD_EPS = 1e-12


def _others_product(forms: np.ndarray) -> np.ndarray:
    """For stacked factors (k, B, h), the product of all factors except each one in turn."""
    k = forms.shape[0]
    result = np.empty_like(forms)
    for i in range(k):
        if k == 1:
            result[i] = 1.0
        else:
            result[i] = np.prod(np.delete(forms, i, axis=0), axis=0)
    return result


class RatioLayer(Layer):
    """
    y_i = sum_l w_il * N_l / D_l + b_i, where N_l multiplies p affine forms of x and D_l
    multiplies q affine forms. Each affine form has its own weights and bias per unit.

    Parameters:
        num_w: (p, h, n) numerator form weights
        num_b: (p, h) numerator form biases
        den_w: (q, h, n) denominator form weights
        den_b: (q, h) denominator form biases
        out_w: (m, h) output weights
        out_b: (m,) output bias
    """

    def __init__(self, n_in: int, hidden: int, n_out: int, p: int, q: int, guard_eps: float = DEFAULT_GUARD_EPS):
        if p < 1:
            raise ValueError(f"Numerator order must be at least 1, got {p}")
        if q < 0:
            raise ValueError(f"Denominator order must be non-negative, got {q}")
        if hidden < 1 or n_in < 1 or n_out < 1:
            raise ValueError(f"Ratio layer dimensions must be positive, got n={n_in}, h={hidden}, m={n_out}")
        super().__init__(n_in, n_out)
        self.hidden = hidden
        self.p = p
        self.q = q
        self.guard_eps = guard_eps
        self.last_clamp_count = 0
        self._register("num_w", np.zeros((p, hidden, n_in)))
        self._register("num_b", np.ones((p, hidden)))
        self._register("den_w", np.zeros((q, hidden, n_in)))
        self._register("den_b", np.ones((q, hidden)))
        self._register("out_w", np.zeros((n_out, hidden)))
        self._register("out_b", np.zeros(n_out))

    @staticmethod
    def expected_param_count(n_in: int, hidden: int, n_out: int, p: int, q: int) -> int:
        return hidden * (p + q) * (n_in + 1) + n_out * hidden + n_out

    def _affine_forms(self, X: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
        if w.shape[0] == 0:
            return np.zeros((0, X.shape[0], self.hidden))
        return np.einsum("bn,khn->kbh", X, w) + b[:, None, :]

    def _guard(self, D: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        clamped = np.abs(D) <= self.guard_eps
        sign = np.where(D >= 0.0, 1.0, -1.0)
        return np.where(clamped, sign * self.guard_eps, D), clamped

    def _forward(self, X: np.ndarray) -> np.ndarray:
        A = self._affine_forms(X, self.params["num_w"], self.params["num_b"])
        C = self._affine_forms(X, self.params["den_w"], self.params["den_b"])
        N = np.prod(A, axis=0)
        D = np.prod(C, axis=0) if self.q > 0 else np.ones_like(N)
        D_safe, clamped = self._guard(D)
        R = N / D_safe
        self.last_clamp_count = int(np.count_nonzero(clamped))
        self._cache = {"X": X, "A": A, "C": C, "N": N, "D": D_safe, "R": R, "clamped": clamped}
        return R @ self.params["out_w"].T + self.params["out_b"]

    def _backward(self, dY: np.ndarray) -> np.ndarray:
        cache = self._cache
        X, A, C, N, D, R = cache["X"], cache["A"], cache["C"], cache["N"], cache["D"], cache["R"]

        self.grads["out_w"] += dY.T @ R
        self.grads["out_b"] += dY.sum(axis=0)

        dR = dY @ self.params["out_w"]
        dN = dR / D
        # a clamped denominator is a constant
        dD = np.where(cache["clamped"], 0.0, -dR * R / D)

        dX = np.zeros_like(X)
        for forms, dprod, w_name, b_name in ((A, dN, "num_w", "num_b"), (C, dD, "den_w", "den_b")):
            if forms.shape[0] == 0:
                continue
            dforms = dprod[None, :, :] * _others_product(forms)
            self.grads[w_name] += np.einsum("kbh,bn->khn", dforms, X)
            self.grads[b_name] += dforms.sum(axis=1)
            dX += np.einsum("kbh,khn->bn", dforms, self.params[w_name])
        return dX

    def describe(self) -> str:
        return f"RatioLayer([{self.p}/{self.q},{self.hidden}], {self.n_in}->{self.n_out})"
