"""Exact convergence-rate machinery for the random-sweep schemes.

With the hyperparameters held fixed, every block move is an affine map
``theta -> C_b theta + c_b`` plus Gaussian noise, so the whole sweep is a
mixture of vector autoregressions. The per-iteration convergence rate is
the spectral radius of the probability-weighted mixture matrix raised to
the number of sub-steps per iteration.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .collinearity import BlockDistribution, block_distribution
from .kernel import StableSplineKernel
from .problem import RegressionProblem

__all__ = [
    "UpdateMatrix",
    "ConvergenceReport",
    "build_single_update",
    "build_pair_update",
    "mixture_matrix",
    "spectral_radius",
    "scheme_rates",
]


@dataclass(frozen=True)
class UpdateMatrix:
    """Affine map of one exact block draw: replaced rows of a block identity.

    ``rows`` holds the non-identity block rows of ``C``; ``offset`` the
    matching entries of the affine term; ``noise_cov`` the conditional
    covariance injected at the updated coordinates.
    """

    block: tuple
    rows: np.ndarray = field(repr=False)
    offset: np.ndarray = field(repr=False)
    noise_cov: np.ndarray = field(repr=False)
    m: int = 0
    p: int = 0

    def row_indices(self) -> np.ndarray:
        return np.concatenate([np.arange(k * self.p, (k + 1) * self.p)
                               for k in self.block])

    @property
    def C(self) -> np.ndarray:
        """Dense update matrix (block identity with replaced rows)."""
        mp = self.m * self.p
        C = np.eye(mp)
        C[self.row_indices(), :] = self.rows
        return C

    @property
    def c(self) -> np.ndarray:
        """Dense affine offset (zero outside the updated block)."""
        out = np.zeros(self.m * self.p)
        out[self.row_indices()] = self.offset
        return out

    @property
    def Sigma(self) -> np.ndarray:
        """Dense injected-noise covariance (zero outside the updated block)."""
        mp = self.m * self.p
        out = np.zeros((mp, mp))
        out[np.ix_(self.row_indices(), self.row_indices())] = self.noise_cov
        return out


def _conditional_pieces(rows: np.ndarray, prior_prec: np.ndarray,
                        GtG: np.ndarray, GtY: np.ndarray, sigma2: float):
    """Conditional covariance, C-rows and offset for the given coordinates."""
    prec = prior_prec + GtG[np.ix_(rows, rows)] / sigma2
    factor = cho_factor(prec, lower=True)
    cov = cho_solve(factor, np.eye(rows.shape[0]))
    cov = 0.5 * (cov + cov.T)
    coupling = GtG[rows, :].copy() / sigma2
    coupling[:, rows] = 0.0
    D = -cho_solve(factor, coupling)
    offset = cho_solve(factor, GtY[rows] / sigma2)
    return cov, D, offset


def build_single_update(i: int, problem: RegressionProblem,
                        kernel: StableSplineKernel, lam: float,
                        sigma2: float, gram=None) -> UpdateMatrix:
    """Autoregressive map of an exact single-block draw."""
    if lam <= 0 or sigma2 <= 0:
        raise ValueError("hyperparameters must be positive")
    GtG, GtY = _gram(problem, gram)
    p = kernel.p
    rows = np.arange(i * p, (i + 1) * p)
    cov, D, offset = _conditional_pieces(rows, kernel.inverse / lam,
                                         GtG, GtY, sigma2)
    return UpdateMatrix(block=(i,), rows=D, offset=offset, noise_cov=cov,
                        m=problem.m, p=p)


def build_pair_update(i: int, j: int, problem: RegressionProblem,
                      kernel: StableSplineKernel, lam: float,
                      sigma2: float, gram=None) -> UpdateMatrix:
    """Autoregressive map of an exact overlapping-pair draw (common scale)."""
    if i == j:
        raise ValueError("pair update needs two distinct blocks")
    if lam <= 0 or sigma2 <= 0:
        raise ValueError("hyperparameters must be positive")
    GtG, GtY = _gram(problem, gram)
    p = kernel.p
    rows = np.concatenate([np.arange(i * p, (i + 1) * p),
                           np.arange(j * p, (j + 1) * p)])
    prior = np.zeros((2 * p, 2 * p))
    prior[:p, :p] = kernel.inverse / lam
    prior[p:, p:] = kernel.inverse / lam
    cov, D, offset = _conditional_pieces(rows, prior, GtG, GtY, sigma2)
    return UpdateMatrix(block=(i, j), rows=D, offset=offset, noise_cov=cov,
                        m=problem.m, p=p)


def _gram(problem: RegressionProblem, gram):
    if gram is not None:
        return gram
    G = problem.G
    return G.T @ G, G.T @ problem.Y


def mixture_matrix(singles, pairs, dist: BlockDistribution,
                   return_offset: bool = False):
    """Probability-weighted mixture of update matrices.

    ``singles`` and ``pairs`` are :class:`UpdateMatrix` lists; weights are
    looked up in ``dist`` by block label. Blocks missing from ``dist``
    get weight zero.
    """
    updates = list(singles) + list(pairs)
    if not updates:
        raise ValueError("no update matrices given")
    mp = updates[0].m * updates[0].p
    weight_of = {}
    for lbl, prob in zip(dist.labels, dist.probs):
        key = (lbl,) if isinstance(lbl, int) else tuple(lbl)
        weight_of[key] = float(prob)
    total = 0.0
    C = np.zeros((mp, mp))
    offset = np.zeros(mp)
    for upd in updates:
        w = weight_of.get(upd.block, 0.0)
        if w == 0.0:
            continue
        total += w
        idx = upd.row_indices()
        C[idx, :] += w * upd.rows
        C[idx, idx] -= w  # remove the identity row the dense sum would keep
        offset[idx] += w * upd.offset
    C += total * np.eye(mp)
    if abs(total - 1.0) > 1e-9:
        warnings.warn(f"mixture weights sum to {total:.6f}, not 1",
                      RuntimeWarning, stacklevel=2)
    return (C, offset) if return_offset else C


def spectral_radius(A: np.ndarray, dense_limit: int = 2000,
                    tol: float = 1e-10, restarts: int = 10,
                    max_iter: int = 2000, window: int = 24,
                    seed: int = 0) -> float:
    """Largest eigenvalue modulus.

    Dense nonsymmetric eigendecomposition up to ``dense_limit``. Above
    that, restarted power iteration where each sweep builds a short
    Krylov window and takes the dominant Ritz value, so complex dominant
    pairs converge as well; the largest estimate over random restarts is
    returned, with a warning if the tolerance was never certified.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("square matrix required")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    n = A.shape[0]
    if n <= dense_limit:
        return float(np.max(np.abs(np.linalg.eigvals(A))))
    rng = np.random.default_rng(seed)
    best = 0.0
    converged = False
    for _ in range(restarts):
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        est_prev = np.inf
        for _ in range(max_iter // window):
            # Arnoldi on a short window starting from the current iterate
            Q = np.empty((window + 1, n))
            H = np.zeros((window + 1, window))
            Q[0] = v
            size = window
            invariant = False
            for k in range(window):
                w = A @ Q[k]
                for i in range(k + 1):
                    H[i, k] = Q[i] @ w
                    w -= H[i, k] * Q[i]
                H[k + 1, k] = np.linalg.norm(w)
                if H[k + 1, k] < 1e-14:
                    size = k + 1
                    invariant = True
                    break
                Q[k + 1] = w / H[k + 1, k]
            ritz, vecs = np.linalg.eig(H[:size, :size])
            lead = int(np.argmax(np.abs(ritz)))
            est = float(np.abs(ritz[lead]))
            # restart from the dominant Ritz vector
            v = np.real(Q[:size].T @ vecs[:, lead])
            norm_v = np.linalg.norm(v)
            if norm_v < 1e-14:
                v = np.abs(Q[:size].T @ vecs[:, lead])
                norm_v = np.linalg.norm(v)
            v /= norm_v
            close = (np.isfinite(est_prev)
                     and abs(est - est_prev) <= tol * max(est, 1.0))
            if invariant or close:
                best = max(best, est)
                converged = True
                break
            est_prev = est
        else:
            if np.isfinite(est_prev):
                best = max(best, est_prev)
    if not converged:
        warnings.warn(f"power iteration did not reach tol={tol}; "
                      f"returning best bound {best:.6e}", RuntimeWarning,
                      stacklevel=2)
    return float(best)


@dataclass(frozen=True)
class ConvergenceReport:
    """Scheme rates at fixed hyperparameters, with the quantities behind them."""

    m: int
    n_ob: int
    lam: float
    sigma2: float
    rho_mixture: float
    rho_singles: float
    rate_rsgsob: float
    rate_rsgs: float

    def to_json(self, path=None) -> str:
        text = json.dumps(asdict(self), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def scheme_rates(problem: RegressionProblem, kernel: StableSplineKernel,
                 lam: float, sigma2: float, dist: BlockDistribution,
                 pair_tol: float = 0.0, dense_limit: int = 2000,
                 gram=None) -> ConvergenceReport:
    """Convergence rates of the overlapping-block scheme and plain random sweep.

    Both are per-iteration rates: the mixture spectral radius raised to
    ``m + n_ob``. Pairs with selection probability below ``pair_tol`` are
    skipped when accumulating the mixture (their weight is negligible).
    """
    m = problem.m
    n_ob = dist.n_ob
    if gram is None:
        G = problem.G
        gram = (G.T @ G, G.T @ problem.Y)
    singles = [build_single_update(i, problem, kernel, lam, sigma2, gram=gram)
               for i in range(m)]
    pairs = []
    for lbl, prob in zip(dist.labels, dist.probs):
        if isinstance(lbl, tuple) and prob > pair_tol:
            pairs.append(build_pair_update(lbl[0], lbl[1], problem, kernel,
                                           lam, sigma2, gram=gram))
    C_mix = mixture_matrix(singles, pairs, dist)
    rho_mix = spectral_radius(C_mix, dense_limit=dense_limit)
    C_single = mixture_matrix(singles, [], block_distribution(None, m, 0))
    rho_single = spectral_radius(C_single, dense_limit=dense_limit)
    return ConvergenceReport(
        m=m, n_ob=n_ob, lam=float(lam), sigma2=float(sigma2),
        rho_mixture=rho_mix, rho_singles=rho_single,
        rate_rsgsob=rho_mix ** (m + n_ob),
        rate_rsgs=rho_single ** (m + n_ob),
    )
