"""Fit scoring, Raftery-Lewis run lengths and autocovariance utilities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

__all__ = [
    "fit",
    "FitReport",
    "fit_report",
    "autocovariance",
    "RunLengthReport",
    "PilotTooShortError",
    "raftery_lewis",
    "max_run_length",
]


def fit(x: np.ndarray, x_hat: np.ndarray) -> float:
    """Percentage accuracy ``100 (1 - ||x - x_hat|| / ||x||)``.

    Can be arbitrarily negative for bad estimates; 100 only for an exact
    match. Undefined (raises) when the reference is the zero vector.
    """
    x = np.asarray(x, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if x.shape != x_hat.shape:
        raise ValueError("reference and estimate must have the same shape")
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise ValueError("fit is undefined for a zero reference vector")
    return 100.0 * (1.0 - np.linalg.norm(x - x_hat) / nx)


@dataclass(frozen=True)
class FitReport:
    """Fits of the full coefficient vector and two index subsets."""

    fit_all: float
    fit_col: float
    fit_ind: float
    col_indices: tuple
    ind_indices: tuple


def fit_report(truth: np.ndarray, estimate: np.ndarray,
               col_indices, ind_indices) -> FitReport:
    truth = np.asarray(truth, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    col = np.asarray(col_indices, dtype=int)
    ind = np.asarray(ind_indices, dtype=int)
    return FitReport(
        fit_all=fit(truth, estimate),
        fit_col=fit(truth[col], estimate[col]),
        fit_ind=fit(truth[ind], estimate[ind]),
        col_indices=tuple(col.tolist()),
        ind_indices=tuple(ind.tolist()),
    )


def autocovariance(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased (1/T) autocovariance estimates for lags 0..max_lag."""
    x = np.asarray(x, dtype=float)
    T = x.shape[0]
    if max_lag >= T:
        raise ValueError("max_lag must be smaller than the series length")
    xc = x - x.mean()
    out = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        out[lag] = (xc[: T - lag] @ xc[lag:]) / T
    return out


class PilotTooShortError(ValueError):
    """The pilot trace is too short (or too degenerate) to analyze."""


@dataclass(frozen=True)
class RunLengthReport:
    """Raftery-Lewis run lengths for one monitored scalar.

    ``burn_in`` (M) and ``total`` (N = M + required keep) are in original
    iterations; ``n_min`` is the independent-sampling lower bound and
    ``dependence`` the ratio N / n_min. Absorbing indicator chains (one
    transition direction never observed) give infinite M and N.
    """

    burn_in: float
    total: float
    n_min: int
    thin: int
    dependence: float
    q: float
    r: float
    s: float


def _thinning_factor(z: np.ndarray, max_thin: int) -> tuple:
    """Smallest thinning at which a first-order chain beats second-order (BIC)."""
    for k in range(1, max_thin + 1):
        zk = z[::k]
        T = zk.shape[0]
        if T < 8:
            return max(k - 1, 1), z[:: max(k - 1, 1)]
        enc = zk[:-2] * 4 + zk[1:-1] * 2 + zk[2:]
        trip = np.bincount(enc, minlength=8).reshape(2, 2, 2).astype(float)
        g2 = 0.0
        for a in range(2):
            for b in range(2):
                for c in range(2):
                    if trip[a, b, c] > 0:
                        fitted = trip[a, b, :].sum() * trip[:, b, c].sum() \
                            / trip[:, b, :].sum()
                        g2 += 2.0 * trip[a, b, c] * math.log(trip[a, b, c] / fitted)
        if g2 - 2.0 * math.log(T - 2.0) < 0.0:
            return k, zk
    return max_thin, z[::max_thin]


def raftery_lewis(trace: np.ndarray, q: float = 0.025, r: float = 0.02,
                  s: float = 0.95, eps: float = 1e-3,
                  max_thin: int | None = None) -> RunLengthReport:
    """Run-length diagnostic for estimating the q-quantile to accuracy r.

    The indicator of the empirical q-quantile is thinned until first-order
    Markov, and burn-in / required length follow from the two-state
    transition matrix.
    """
    x = np.asarray(trace, dtype=float)
    T = x.shape[0]
    if not 0.0 < q < 1.0:
        raise ValueError("q must be in (0, 1)")
    if T < 8:
        raise PilotTooShortError(f"pilot of {T} samples is too short")
    phi = float(ndtri(0.5 * (1.0 + s)))
    n_min = int(math.ceil(q * (1.0 - q) * phi ** 2 / r ** 2))
    u = np.quantile(x, q)
    z = (x <= u).astype(np.int8)
    if z.all() or not z.any():
        raise PilotTooShortError("indicator chain has a single state "
                                 "(constant trace?)")
    if max_thin is None:
        max_thin = max(1, T // 8)
    k, zk = _thinning_factor(z, max_thin)
    n01 = int(((zk[:-1] == 0) & (zk[1:] == 1)).sum())
    n00 = int(((zk[:-1] == 0) & (zk[1:] == 0)).sum())
    n10 = int(((zk[:-1] == 1) & (zk[1:] == 0)).sum())
    n11 = int(((zk[:-1] == 1) & (zk[1:] == 1)).sum())
    if n00 + n01 == 0 or n10 + n11 == 0:
        raise PilotTooShortError("a state of the thinned indicator chain "
                                 "was never visited")
    alpha = n01 / (n00 + n01)
    beta = n10 / (n10 + n11)
    if alpha == 0.0 or beta == 0.0:
        # absorbing chain: the quantile cannot be tracked at any run length
        return RunLengthReport(burn_in=math.inf, total=math.inf, n_min=n_min,
                               thin=k, dependence=math.inf, q=q, r=r, s=s)
    lam2 = 1.0 - alpha - beta
    if lam2 == 0.0:
        m_burn = 0.0
    else:
        m_burn = math.ceil(math.log(eps * (alpha + beta) / max(alpha, beta))
                           / math.log(abs(lam2))) * k
    keep = math.ceil((2.0 - alpha - beta) * alpha * beta * phi ** 2
                     / ((alpha + beta) ** 3 * r ** 2)) * k
    total = m_burn + keep
    return RunLengthReport(burn_in=float(m_burn), total=float(total),
                           n_min=n_min, thin=k,
                           dependence=total / n_min, q=q, r=r, s=s)


def max_run_length(samples: np.ndarray, q: float = 0.025, r: float = 0.02,
                   s: float = 0.95) -> tuple:
    """Maximum burn-in and total run length over the columns of ``samples``.

    Columns whose indicator chain is single-state are skipped; absorbing
    columns contribute infinity.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    best_m, best_n = 0.0, 0.0
    analyzed = 0
    for col in range(samples.shape[1]):
        try:
            rep = raftery_lewis(samples[:, col], q=q, r=r, s=s)
        except PilotTooShortError:
            continue
        analyzed += 1
        best_m = max(best_m, rep.burn_in)
        best_n = max(best_n, rep.total)
    if analyzed == 0:
        raise PilotTooShortError("no column produced a valid run-length report")
    return best_m, best_n
