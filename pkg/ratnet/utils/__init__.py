"""
Numeric utilities for ratnet.
"""

from .diffcore import Rng, seeded_rng, gaussian, gaussian_array, as_matrix, check_finite, finite_diff_grad, permutation

__all__ = ["Rng", "seeded_rng", "gaussian", "gaussian_array", "as_matrix", "check_finite", "finite_diff_grad", "permutation"]
