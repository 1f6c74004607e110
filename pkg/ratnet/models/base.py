"""
Base class for layers with analytic forward and backward passes.
"""

import logging
from typing import Dict

import numpy as np

from ..exceptions import StaleCacheError
from ..utils.diffcore import as_matrix, check_finite

logger = logging.getLogger(__name__)


class Layer:
    """A layer owning named parameter arrays and matching gradient accumulators."""

    def __init__(self, n_in: int, n_out: int):
        self.n_in = n_in
        self.n_out = n_out
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self._cache = None

    def _register(self, name: str, value: np.ndarray) -> None:
        self.params[name] = np.ascontiguousarray(value, dtype=np.float64)
        self.grads[name] = np.zeros_like(self.params[name])

    def zero_grad(self) -> None:
        for grad in self.grads.values():
            grad.fill(0.0)

    @property
    def param_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def forward(self, X: np.ndarray) -> np.ndarray:
        """Compute outputs for a batch and cache what backward needs."""
        X = check_finite(as_matrix(X, cols=self.n_in, name="layer input"), "layer input")
        return self._forward(X)

    def backward(self, dY: np.ndarray) -> np.ndarray:
        """Accumulate parameter gradients and return the gradient w.r.t. the input."""
        if self._cache is None:
            raise StaleCacheError(f"{self.__class__.__name__}.backward called before forward")
        dY = as_matrix(dY, cols=self.n_out, name="output gradient")
        if dY.shape[0] != self._cache["X"].shape[0]:
            raise StaleCacheError(
                f"{self.__class__.__name__}.backward got {dY.shape[0]} rows, cached batch has {self._cache['X'].shape[0]}"
            )
        return self._backward(dY)

    def _forward(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError("Subclasses must implement _forward method")

    def _backward(self, dY: np.ndarray) -> np.ndarray:
        raise NotImplementedError("Subclasses must implement _backward method")

    def describe(self) -> str:
        return f"{self.__class__.__name__}({self.n_in}->{self.n_out})"
