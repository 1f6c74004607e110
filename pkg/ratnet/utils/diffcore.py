"""
Deterministic numeric substrate: matrices, seeded randomness and a finite-difference oracle.

Matrices are C-contiguous float64 numpy arrays with samples as rows. Random numbers come
from splitmix64 so that any reimplementation reproduces a run bit for bit.

Normal draws use Box-Muller on two consecutive uniforms u1, u2 in [0, 1) in the form
sqrt(-2 ln(1 - u1)) cos(2 pi u2). The 1 - u1 keeps the log argument in (0, 1]; a
reimplementation using ln(u1) will not match bit for bit.
"""

import logging
import math
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DimensionMismatchError, NonFiniteError

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
UNIT_53 = 2.0 ** -53


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


class Rng:
    """splitmix64 generator. Never share one instance between threads."""

    def __init__(self, state: int = 0):
        self.state = state & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix(self.state)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * UNIT_53

    def uniforms(self, n: int) -> np.ndarray:
        """Draw n uniforms at once; identical to n calls of uniform()."""
        if n <= 0:
            return np.zeros(0, dtype=np.float64)
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * np.uint64(GOLDEN_GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + n * GOLDEN_GAMMA) & MASK64
        return (z >> np.uint64(11)).astype(np.float64) * UNIT_53


def seeded_rng(seed: int) -> Rng:
    """Create a generator from a 64-bit seed."""
    return Rng(seed)


def _box_muller(u1: Union[float, np.ndarray], u2: Union[float, np.ndarray]):
    # 1 - u1 lies in (0, 1], so the log is finite
    return np.sqrt(-2.0 * np.log(1.0 - u1)) * np.cos(2.0 * math.pi * u2)


def gaussian(rng: Rng, mean: float = 0.0, std: float = 1.0) -> float:
    """One normal draw; consumes exactly two uniforms."""
    if std < 0:
        raise ValueError(f"Standard deviation must be non-negative, got {std}")
    u1 = rng.uniform()
    u2 = rng.uniform()
    if std == 0:
        return float(mean)
    return float(mean + std * _box_muller(u1, u2))


def gaussian_array(rng: Rng, shape: Union[int, Tuple[int, ...]], mean: float = 0.0, std: float = 1.0) -> np.ndarray:
    """Normal draws in C order; identical to repeated gaussian() calls."""
    if std < 0:
        raise ValueError(f"Standard deviation must be non-negative, got {std}")
    size = int(np.prod(shape, dtype=np.int64))
    u = rng.uniforms(2 * size)
    if std == 0:
        return np.full(shape, float(mean), dtype=np.float64)
    z = _box_muller(u[0::2], u[1::2])
    return (mean + std * z).reshape(shape)


def permutation(n: int, rng: Rng) -> np.ndarray:
    """Fisher-Yates shuffle of range(n)."""
    index = np.arange(n, dtype=np.int64)
    u = rng.uniforms(max(n - 1, 0))
    for k, i in enumerate(range(n - 1, 0, -1)):
        j = min(int(u[k] * (i + 1)), i)
        index[i], index[j] = index[j], index[i]
    return index


def as_matrix(X, cols: int = None, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d float64 C-contiguous array, optionally checking the column count."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1) if cols is not None and X.shape[0] == cols else X.reshape(-1, 1)
    if X.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-d, got shape {X.shape}")
    if cols is not None and X.shape[1] != cols:
        raise DimensionMismatchError(f"{name} has {X.shape[1]} columns, expected {cols}")
    return X


def check_finite(X: np.ndarray, name: str = "matrix") -> np.ndarray:
    if not np.all(np.isfinite(X)):
        bad = int(np.flatnonzero(~np.isfinite(np.asarray(X).ravel()))[0])
        raise NonFiniteError(f"{name} contains a non-finite value at flat index {bad}", index=bad)
    return X


def finite_diff_grad(f: Callable[[np.ndarray], float], params: Sequence[float], h: float = 1e-5) -> np.ndarray:
    """
    Central-difference gradient of a scalar function.

    Args:
        f: Function of a parameter vector returning a scalar
        params: Point at which to differentiate
        h: Step size, strictly positive

    Returns:
        Array of (f(p + h e_i) - f(p - h e_i)) / (2h)
    """
    if h <= 0:
        raise ValueError(f"Step size must be positive, got {h}")
    p = np.array(params, dtype=np.float64).ravel()
    grad = np.zeros_like(p)
    for i in range(p.size):
        original = p[i]
        p[i] = original + h
        f_plus = float(f(p.copy()))
        p[i] = original - h
        f_minus = float(f(p.copy()))
        p[i] = original
        if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
            raise NonFiniteError(f"Function is not finite around coordinate {i}", index=i)
        grad[i] = (f_plus - f_minus) / (2.0 * h)
    return grad
