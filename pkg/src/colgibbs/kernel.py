"""Stable-spline prior covariance for FIR coefficient vectors.

The kernel matrix has entries ``alpha ** max(i, j)`` with 1-based
indices, so the variance of the coefficient at lag ``i`` decays like
``alpha**i`` and neighbouring lags are positively correlated.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky

__all__ = ["StableSplineKernel", "build_kernel"]


@dataclass(frozen=True)
class StableSplineKernel:
    """Prior covariance ``K`` and its inverse for one impulse response.

    Attributes
    ----------
    alpha : float
        Variance decay rate, ``0 < alpha < 1``.
    p : int
        FIR order (number of impulse-response coefficients).
    matrix : ndarray, shape (p, p)
        Kernel matrix ``K(i, j) = alpha ** max(i, j)``, 1-based.
    inverse : ndarray, shape (p, p)
        Inverse of ``matrix``, computed from a Cholesky factorization.
    """

    alpha: float
    p: int
    matrix: np.ndarray = field(repr=False)
    inverse: np.ndarray = field(repr=False)

    def quad_inverse(self, coeffs: np.ndarray) -> float:
        """Quadratic form ``coeffs' K^{-1} coeffs`` (>= 0, 0 iff zero)."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.p,):
            raise ValueError(f"expected a length-{self.p} vector, got {coeffs.shape}")
        return float(coeffs @ self.inverse @ coeffs)


def build_kernel(alpha: float, p: int) -> StableSplineKernel:
    """Construct the stable-spline kernel and its inverse.

    Parameters
    ----------
    alpha : float
        Decay rate in the open interval (0, 1).
    p : int
        FIR order, at least 1.

    Raises
    ------
    ValueError
        If ``alpha`` is outside (0, 1) or ``p < 1``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    idx = np.arange(1, p + 1)
    K = alpha ** np.maximum.outer(idx, idx)
    try:
        factor = cholesky(K, lower=True)
    except np.linalg.LinAlgError:
        # Analytically PD but numerically marginal for alpha -> 1 or large p.
        jitter = 1e-12 * K[0, 0]
        warnings.warn(
            f"kernel Cholesky failed for alpha={alpha}, p={p}; "
            f"retrying with diagonal jitter {jitter:.3e}",
            RuntimeWarning,
            stacklevel=2,
        )
        K = K + jitter * np.eye(p)
        factor = cholesky(K, lower=True)
    K_inv = cho_solve((factor, True), np.eye(p))
    K_inv = 0.5 * (K_inv + K_inv.T)
    rel = np.linalg.norm(K @ K_inv - np.eye(p)) / np.sqrt(p)
    if rel > 1e-8:
        raise np.linalg.LinAlgError(
            f"kernel inverse failed verification (residual {rel:.3e})"
        )
    return StableSplineKernel(alpha=float(alpha), p=int(p), matrix=K, inverse=K_inv)
