"""
Sequential composition of layers.
"""

import logging
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from ..exceptions import DimensionMismatchError
from .base import Layer
from .ratio import RatioLayer

logger = logging.getLogger(__name__)


class Stack:
    """Ordered layers where each output width equals the next input width."""

    def __init__(self, layers: Sequence[Layer]):
        if not layers:
            raise DimensionMismatchError("A stack needs at least one layer")
        for i in range(len(layers) - 1):
            if layers[i].n_out != layers[i + 1].n_in:
                raise DimensionMismatchError(
                    f"Layer {i} outputs {layers[i].n_out} values but layer {i + 1} expects {layers[i + 1].n_in}"
                )
        self.layers: List[Layer] = list(layers)

    @property
    def n_in(self) -> int:
        return self.layers[0].n_in

    @property
    def n_out(self) -> int:
        return self.layers[-1].n_out

    def forward(self, X: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            X = layer.forward(X)
        return X

    def backward(self, dY: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            dY = layer.backward(dY)
        return dY

    def predict(self, X: np.ndarray, chunk: int = 2048) -> np.ndarray:
        """Forward pass in row chunks; intended for evaluation, leaves caches of the last chunk."""
        if X.shape[0] <= chunk:
            return self.forward(X)
        return np.vstack([self.forward(X[i:i + chunk]) for i in range(0, X.shape[0], chunk)])

    def zero_grad(self) -> None:
        for layer in self.layers:
            layer.zero_grad()

    def named_parameters(self) -> Iterator[Tuple[str, np.ndarray, np.ndarray]]:
        """Yield (slot name, parameter array, gradient array) in a fixed order."""
        for i, layer in enumerate(self.layers):
            for name, value in layer.params.items():
                yield f"layer{i}.{name}", value, layer.grads[name]

    def parameters(self) -> Dict[str, np.ndarray]:
        return {name: value for name, value, _ in self.named_parameters()}

    def gradients(self) -> Dict[str, np.ndarray]:
        return {name: grad for name, _, grad in self.named_parameters()}

    @property
    def param_count(self) -> int:
        return sum(layer.param_count for layer in self.layers)

    @property
    def clamp_count(self) -> int:
        """Guard-clamped denominators in the most recent forward pass."""
        return sum(layer.last_clamp_count for layer in self.layers if isinstance(layer, RatioLayer))

    def get_flat(self) -> np.ndarray:
        return np.concatenate([value.ravel() for _, value, _ in self.named_parameters()])

    def set_flat(self, flat: np.ndarray) -> None:
        offset = 0
        for _, value, _ in self.named_parameters():
            value[...] = flat[offset:offset + value.size].reshape(value.shape)
            offset += value.size
        if offset != flat.size:
            raise DimensionMismatchError(f"Flat vector has {flat.size} entries, stack has {offset} parameters")

    def flat_grad(self) -> np.ndarray:
        return np.concatenate([grad.ravel() for _, _, grad in self.named_parameters()])

    def snapshot(self) -> Dict[str, np.ndarray]:
        return {name: value.copy() for name, value, _ in self.named_parameters()}

    def restore(self, snapshot: Dict[str, np.ndarray]) -> None:
        for name, value, _ in self.named_parameters():
            value[...] = snapshot[name]

    def describe(self) -> str:
        return " -> ".join(layer.describe() for layer in self.layers)
