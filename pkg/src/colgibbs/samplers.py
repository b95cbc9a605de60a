"""The six Gibbs sampling schemes and chain post-processing.

Schemes (``d`` variants carry one scale factor per block, the others a
single common one):

==========  ============================================================
gs, gsd     deterministic sweep over blocks 1..m each iteration
rsgs,       m + n_ob uniformly random single-block updates per iteration
rsgsd
rsgsob,     m + n_ob block updates drawn from a collinearity-weighted
rsgsobd     distribution over single blocks and overlapping pairs
==========  ============================================================

Every iteration first redraws the scale factor(s) and the noise variance
from their full conditionals given the previous coefficients, then runs
the block sweep, always conditioning on the freshest coefficients.
"""
from __future__ import annotations

import json
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .backend import get_sweep
from .collinearity import BlockDistribution, block_distribution
from .conditionals import (
    InverseGammaLaw,
    lambda_common_conditional,
    lambda_k_conditional,
)
from .kernel import StableSplineKernel
from .problem import ImpulseResponseSet, RegressionProblem

__all__ = [
    "SCHEMES",
    "ChainConfig",
    "ChainState",
    "ChainTrace",
    "ChainNumericalError",
    "PosteriorSummary",
    "run_chain",
    "posterior_summary",
    "mean_hyperparameters",
]

SCHEMES = ("gs", "gsd", "rsgs", "rsgsd", "rsgsob", "rsgsobd")
_RANDOM_SWEEP = ("rsgs", "rsgsd", "rsgsob", "rsgsobd")


class ChainNumericalError(RuntimeError):
    """A block update failed numerically; the iteration index is attached."""


@dataclass
class ChainConfig:
    """Settings of one chain run."""

    scheme: str
    n_mc: int
    n_b: int | None = None
    n_ob: int = 0
    seed: int = 0
    alpha: float | None = None
    beta: float | None = None
    shape_convention: str = "pooled"
    init: str = "unit"
    thin: int = 1
    fixed_lambda: float | None = None
    fixed_sigma2: float | None = None
    backend: str = "auto"
    store_selection: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.n_mc < 1:
            raise ValueError("n_mc must be positive")
        if self.n_b is not None and not 0 <= self.n_b < self.n_mc:
            raise ValueError("burn-in must satisfy 0 <= n_b < n_mc")
        if self.n_ob < 0:
            raise ValueError("n_ob must be non-negative")
        if self.thin < 1:
            raise ValueError("thin must be at least 1")
        if (self.fixed_lambda is None) != (self.fixed_sigma2 is None):
            raise ValueError("fix both hyperparameters or neither")

    @property
    def per_block(self) -> bool:
        return self.scheme.endswith("d")

    @property
    def burn_in(self) -> int:
        return self.n_mc // 2 if self.n_b is None else self.n_b


@dataclass
class ChainState:
    """One MCMC state (coefficients, scale factor(s), noise variance)."""

    theta: np.ndarray
    lam: np.ndarray
    sigma2: float
    iteration: int


@dataclass
class ChainTrace:
    """Stored chain: per-iteration states plus the block-selection log."""

    thetas: np.ndarray = field(repr=False)
    lambdas: np.ndarray = field(repr=False)
    sigma2s: np.ndarray = field(repr=False)
    selections: list = field(repr=False)
    config: ChainConfig = None
    m: int = 0
    p: int = 0
    elapsed: float = 0.0

    @property
    def n_stored(self) -> int:
        return self.thetas.shape[0]

    def iteration_of(self, stored_index: int) -> int:
        return (stored_index + 1) * self.config.thin

    def to_csv(self, path) -> None:
        """Iteration-major CSV: iteration, scale(s), noise variance, coefficients."""
        lam_cols = ([f"lambda_{k+1}" for k in range(self.lambdas.shape[1])]
                    if self.lambdas.shape[1] > 1 else ["lambda"])
        theta_cols = [f"theta_{k+1}_{l+1}" for k in range(self.m) for l in range(self.p)]
        header = ",".join(["iteration"] + lam_cols + ["sigma2"] + theta_cols)
        iters = np.array([self.iteration_of(i) for i in range(self.n_stored)])
        body = np.column_stack([iters, self.lambdas, self.sigma2s, self.thetas])
        np.savetxt(path, body, delimiter=",", header=header, comments="")

    def selection_to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iteration,substep,block_i,block_j\n")
            for it, sub, i, j in self.selections:
                fh.write(f"{it},{sub},{i + 1},{'' if j < 0 else j + 1}\n")

    def save(self, directory, stem: str = "trace") -> None:
        """Binary dump (npy) with a JSON sidecar describing the run."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        np.save(directory / f"{stem}_theta.npy", self.thetas)
        np.save(directory / f"{stem}_lambda.npy", self.lambdas)
        np.save(directory / f"{stem}_sigma2.npy", self.sigma2s)
        meta = {"scheme": self.config.scheme, "seed": self.config.seed,
                "m": self.m, "p": self.p, "elapsed_s": self.elapsed,
                "config": asdict(self.config)}
        (directory / f"{stem}.meta.json").write_text(json.dumps(meta, indent=2))

    @classmethod
    def load(cls, directory, stem: str = "trace") -> "ChainTrace":
        directory = Path(directory)
        meta = json.loads((directory / f"{stem}.meta.json").read_text())
        cfg = ChainConfig(**meta["config"])
        return cls(thetas=np.load(directory / f"{stem}_theta.npy"),
                   lambdas=np.load(directory / f"{stem}_lambda.npy"),
                   sigma2s=np.load(directory / f"{stem}_sigma2.npy"),
                   selections=[], config=cfg, m=meta["m"], p=meta["p"],
                   elapsed=meta["elapsed_s"])


@dataclass
class PosteriorSummary:
    """Post-burn-in mean, per-coefficient 95% band, hyperparameter means."""

    theta_mean: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    lambda_hat: np.ndarray
    sigma2_hat: float
    n_used: int
    burn_in: int


def _initial_state(config: ChainConfig, problem: RegressionProblem,
                   kernel: StableSplineKernel) -> tuple:
    theta = np.zeros(problem.m * problem.p)
    sigma2 = float(np.var(problem.Y))
    if sigma2 <= 0:
        sigma2 = 1.0
    if config.init == "unit":
        lam0 = 1.0
    elif config.init == "scale":
        # match the prior-predictive output energy to the observed one
        energy = sum(float(np.trace(G @ kernel.matrix @ G.T))
                     for G in problem.G_blocks)
        lam0 = float(problem.Y @ problem.Y) / energy if energy > 0 else 1.0
    else:
        raise ValueError(f"unknown init policy {config.init!r}")
    lam = np.full(problem.m, lam0) if config.per_block else np.array([lam0])
    return theta, lam, sigma2


def _draw_or_keep(law: InverseGammaLaw, current: float, rng,
                  warned: list) -> float:
    """Exact inverse-gamma draw, keeping the current value if degenerate.

    A degenerate law arises when the conditioning coefficients are exactly
    zero (all-zero initialization); redrawing from a floored law would pin
    the chain near zero, so the update is skipped instead.
    """
    if law.degenerate:
        if not warned:
            warnings.warn("degenerate hyperparameter conditional; keeping "
                          "current value", RuntimeWarning, stacklevel=3)
            warned.append(True)
        return current
    return law.scale / rng.standard_gamma(law.shape)


def run_chain(config: ChainConfig, problem: RegressionProblem,
              kernel: StableSplineKernel,
              dist: BlockDistribution | None = None,
              gram: tuple | None = None) -> ChainTrace:
    """Run one chain and return its trace.

    ``dist`` is consulted only by the overlapping-block schemes; passing
    ``None`` there is allowed when ``n_ob == 0`` (uniform singles).
    ``gram`` may carry precomputed ``(G'G, G'Y, Y'Y)`` so several chains on
    one dataset skip the Gram build.
    """
    m, p, n = problem.m, problem.p, problem.n
    if kernel.p != p:
        raise ValueError(f"kernel order {kernel.p} != problem order {p}")
    scheme = config.scheme
    overlapping = scheme in ("rsgsob", "rsgsobd")
    if overlapping and dist is None:
        if config.n_ob > 0:
            raise ValueError("overlapping-block schemes need a block distribution "
                             "when n_ob > 0")
        dist = block_distribution(None, m, 0)
    n_sub = m + config.n_ob

    if gram is None:
        G = problem.G
        GtG, GtY = G.T @ G, G.T @ problem.Y
        YtY = float(problem.Y @ problem.Y)
    else:
        GtG, GtY, YtY = gram
    sweep = get_sweep(config.backend)
    rng = np.random.default_rng(config.seed)

    theta, lam, sigma2 = _initial_state(config, problem, kernel)
    fixed = config.fixed_lambda is not None
    if fixed:
        lam = np.full_like(lam, config.fixed_lambda)
        sigma2 = float(config.fixed_sigma2)

    n_store = config.n_mc // config.thin
    thetas = np.empty((n_store, m * p))
    lambdas = np.empty((n_store, m if config.per_block else 1))
    sigma2s = np.empty(n_store)
    selections: list = []
    warned: list = []

    cum = None if dist is None else np.cumsum(dist.probs)
    t0 = time.perf_counter()
    for t in range(1, config.n_mc + 1):
        if not fixed:
            blocks = ImpulseResponseSet.from_stacked(theta, m)
            if config.per_block:
                for k in range(m):
                    law = lambda_k_conditional(blocks.blocks[k], kernel)
                    lam[k] = _draw_or_keep(law, lam[k], rng, warned)
            else:
                law = lambda_common_conditional(
                    blocks, kernel, config.shape_convention, n_obs=n)
                lam[0] = _draw_or_keep(law, lam[0], rng, warned)
            ss = YtY - 2.0 * theta @ GtY + theta @ (GtG @ theta)
            s2law = InverseGammaLaw(shape=0.5 * n, scale=0.5 * max(ss, 0.0),
                                    degenerate=ss <= 0.0)
            sigma2 = _draw_or_keep(s2law, sigma2, rng, warned)

        if scheme in ("gs", "gsd"):
            block_i = np.arange(m, dtype=np.int64)
            block_j = np.full(m, -1, dtype=np.int64)
        elif scheme in ("rsgs", "rsgsd"):
            block_i = (rng.random(n_sub) * m).astype(np.int64)
            block_j = np.full(n_sub, -1, dtype=np.int64)
        else:
            r = rng.random(n_sub)
            idx = np.searchsorted(cum, r * cum[-1], side="right")
            block_i = np.empty(n_sub, dtype=np.int64)
            block_j = np.empty(n_sub, dtype=np.int64)
            for s, sel in enumerate(idx):
                lbl = dist.labels[int(sel)]
                if isinstance(lbl, tuple):
                    block_i[s], block_j[s] = lbl
                else:
                    block_i[s], block_j[s] = lbl, -1
        if config.store_selection:
            selections.extend(
                (t, s, int(block_i[s]), int(block_j[s]))
                for s in range(block_i.shape[0]))

        sizes = np.where(block_j >= 0, 2 * p, p)
        z = rng.standard_normal(int(sizes.sum()))
        lam_vec = lam if config.per_block else np.full(m, lam[0])
        try:
            sweep(theta, GtG, GtY, kernel.inverse, lam_vec, sigma2,
                  block_i, block_j, z)
        except np.linalg.LinAlgError as exc:
            raise ChainNumericalError(f"iteration {t}: {exc}") from exc

        if t % config.thin == 0:
            idx_store = t // config.thin - 1
            thetas[idx_store] = theta
            lambdas[idx_store] = lam
            sigma2s[idx_store] = sigma2

    return ChainTrace(thetas=thetas, lambdas=lambdas, sigma2s=sigma2s,
                      selections=selections, config=config, m=m, p=p,
                      elapsed=time.perf_counter() - t0)


def posterior_summary(trace: ChainTrace, n_b: int | None = None) -> PosteriorSummary:
    """Point estimates and empirical 95% bands from the post-burn-in samples."""
    if n_b is None:
        n_b = trace.config.burn_in
    start = n_b // trace.config.thin
    if start >= trace.n_stored:
        raise ValueError(f"burn-in {n_b} leaves no stored samples "
                         f"(stored: {trace.n_stored}, thin: {trace.config.thin})")
    kept = trace.thetas[start:]
    return PosteriorSummary(
        theta_mean=kept.mean(axis=0),
        ci_lower=np.percentile(kept, 2.5, axis=0),
        ci_upper=np.percentile(kept, 97.5, axis=0),
        lambda_hat=trace.lambdas[start:].mean(axis=0),
        sigma2_hat=float(trace.sigma2s[start:].mean()),
        n_used=kept.shape[0],
        burn_in=n_b,
    )


def mean_hyperparameters(trace: ChainTrace, first: int | None = None) -> tuple:
    """Hyperparameter means over the first ``first`` stored samples (all if None)."""
    stop = trace.n_stored if first is None else min(first, trace.n_stored)
    if stop < 1:
        raise ValueError("empty trace")
    lam = trace.lambdas[:stop].mean(axis=0)
    lam_hat = float(lam[0]) if lam.shape[0] == 1 else lam
    return lam_hat, float(trace.sigma2s[:stop].mean())
