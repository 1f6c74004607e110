"""
Padé approximants of a power series, and the rational function a 1-input ratio layer computes.
"""

import logging
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from pydantic import BaseModel, ConfigDict, model_validator

from ..exceptions import DegeneratePadeError, DimensionMismatchError, PoleError

logger = logging.getLogger(__name__)

PIVOT_TOLERANCE = 1e-12
POLE_TOLERANCE = 1e-300


class PadeApproximant(BaseModel):
    """[L/M] rational function sum(a_l x^l) / sum(b_j x^j) with b_0 = 1."""
    model_config = ConfigDict(frozen=True)

    L: int
    M: int
    a: tuple[float, ...]
    b: tuple[float, ...]

    @model_validator(mode="after")
    def _check(self) -> "PadeApproximant":
        if len(self.a) != self.L + 1 or len(self.b) != self.M + 1:
            raise ValueError(f"Need {self.L + 1} numerator and {self.M + 1} denominator coefficients")
        if self.b[0] != 1.0:
            raise ValueError(f"Denominator must be normalized with b0 = 1, got {self.b[0]}")
        return self


def _solve_partial_pivot(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting; refuses pivots below PIVOT_TOLERANCE."""
    A = A.astype(np.float64).copy()
    rhs = rhs.astype(np.float64).copy()
    n = A.shape[0]
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[pivot_row, col]) < PIVOT_TOLERANCE:
            raise DegeneratePadeError(f"Padé system is degenerate: pivot {A[pivot_row, col]:.3e} in column {col}")
        if pivot_row != col:
            A[[col, pivot_row]] = A[[pivot_row, col]]
            rhs[[col, pivot_row]] = rhs[[pivot_row, col]]
        for row in range(col + 1, n):
            factor = A[row, col] / A[col, col]
            A[row, col:] -= factor * A[col, col:]
            rhs[row] -= factor * rhs[col]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (rhs[row] - A[row, row + 1:] @ x[row + 1:]) / A[row, row]
    return x


def pade_from_taylor(c: Sequence[float], L: int, M: int) -> PadeApproximant:
    """
    Build the [L/M] approximant whose Maclaurin series matches c_0..c_{L+M}.

    Args:
        c: Taylor coefficients, at least L + M + 1 of them
        L: Numerator degree
        M: Denominator degree

    Raises:
        DegeneratePadeError: The denominator system has a pivot below 1e-12
    """
    if L < 0 or M < 0:
        raise ValueError(f"Degrees must be non-negative, got L={L}, M={M}")
    c = np.asarray(c, dtype=np.float64)
    if c.size < L + M + 1:
        raise DimensionMismatchError(f"[{L}/{M}] approximant needs {L + M + 1} Taylor coefficients, got {c.size}")

    def coef(i: int) -> float:
        return c[i] if i >= 0 else 0.0

    b = np.ones(M + 1)
    if M > 0:
        A = np.array([[coef(L + k - j) for j in range(1, M + 1)] for k in range(1, M + 1)])
        rhs = -np.array([coef(L + k) for k in range(1, M + 1)])
        b[1:] = _solve_partial_pivot(A, rhs)
    a = np.array([sum(b[j] * c[l - j] for j in range(0, min(l, M) + 1)) for l in range(L + 1)])
    return PadeApproximant(L=L, M=M, a=tuple(a), b=tuple(b))


def _horner(coefficients: Sequence[float], x: float) -> float:
    result = 0.0
    for value in reversed(coefficients):
        result = result * x + value
    return result


def pade_eval(p: PadeApproximant, x: float) -> float:
    den = _horner(p.b, x)
    if abs(den) <= POLE_TOLERANCE:
        raise PoleError(x)
    return _horner(p.a, x) / den


def maclaurin_of_rational(p: PadeApproximant, K: int) -> np.ndarray:
    """Series coefficients d_0..d_K of p by long division."""
    d = np.zeros(K + 1)
    for k in range(K + 1):
        a_k = p.a[k] if k <= p.L else 0.0
        d[k] = a_k - sum(p.b[j] * d[k - j] for j in range(1, min(k, p.M) + 1))
    return d


def _trim(coefficients: np.ndarray) -> np.ndarray:
    return P.polytrim(coefficients, tol=0.0) if coefficients.size > 1 else coefficients


def rational_from_ratio_layer(layer, output: int = 0) -> PadeApproximant:
    """
    Expand a 1-input ratio layer output into a single rational function of x.

    Each unit contributes w_l N_l(x) / D_l(x); the sum is brought onto the common
    denominator prod_l D_l(x) and normalized so its constant term is 1.
    """
    if layer.n_in != 1:
        raise DimensionMismatchError(f"Only 1-input ratio layers expand to a univariate rational, got n={layer.n_in}")
    params = layer.params
    units_num = []
    units_den = []
    for l in range(layer.hidden):
        num = np.array([1.0])
        for k in range(layer.p):
            num = P.polymul(num, [params["num_b"][k, l], params["num_w"][k, l, 0]])
        den = np.array([1.0])
        for k in range(layer.q):
            den = P.polymul(den, [params["den_b"][k, l], params["den_w"][k, l, 0]])
        units_num.append(num)
        units_den.append(den)

    common = np.array([1.0])
    for den in units_den:
        common = P.polymul(common, den)
    numerator = P.polymul([params["out_b"][output]], common)
    for l in range(layer.hidden):
        term = P.polymul([params["out_w"][output, l]], units_num[l])
        for k, den in enumerate(units_den):
            if k != l:
                term = P.polymul(term, den)
        numerator = P.polyadd(numerator, term)

    numerator, common = _trim(np.atleast_1d(numerator)), _trim(np.atleast_1d(common))
    if abs(common[0]) <= POLE_TOLERANCE:
        raise DegeneratePadeError("Denominator has no constant term; cannot normalize to b0 = 1")
    return PadeApproximant(
        L=numerator.size - 1,
        M=common.size - 1,
        a=tuple(numerator / common[0]),
        b=tuple(common / common[0]),
    )
