"""Collinearity indices and the block-selection distribution.

Absolute input correlations are mapped through an exponential rule to
pair-update probabilities, then mixed with uniform single-block
probabilities to give the discrete law the random-sweep sampler draws
its blocks from.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UndefinedCorrelationError",
    "correlation_index",
    "CollinearityMatrix",
    "PairProbabilities",
    "BlockDistribution",
    "pair_probabilities",
    "block_distribution",
    "sample_block",
]


class UndefinedCorrelationError(ValueError):
    """A sample correlation is undefined because an input is constant."""


def correlation_index(u_i: np.ndarray, u_j: np.ndarray) -> float:
    """Absolute sample correlation of two equally long input records."""
    u_i = np.asarray(u_i, dtype=float)
    u_j = np.asarray(u_j, dtype=float)
    if u_i.shape != u_j.shape or u_i.ndim != 1 or u_i.size < 2:
        raise ValueError("need two equal-length vectors of at least 2 samples")
    a = u_i - u_i.mean()
    b = u_j - u_j.mean()
    va = float(a @ a)
    vb = float(b @ b)
    if va == 0.0 or vb == 0.0:
        raise UndefinedCorrelationError("constant input has no defined correlation")
    return min(abs(float(a @ b) / np.sqrt(va * vb)), 1.0)


@dataclass(frozen=True)
class CollinearityMatrix:
    """Symmetric matrix of absolute correlation coefficients, unit diagonal."""

    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("correlation matrix must be square")
        if np.any(c < 0) or np.any(c > 1 + 1e-12):
            raise ValueError("correlation indices must lie in [0, 1]")
        if not np.allclose(c, c.T):
            raise ValueError("correlation matrix must be symmetric")
        object.__setattr__(self, "c", c)

    @property
    def m(self) -> int:
        return self.c.shape[0]

    @classmethod
    def from_inputs(cls, inputs) -> "CollinearityMatrix":
        """Sample correlations of all channel pairs; constant channels get 0."""
        m = len(inputs)
        c = np.eye(m)
        for i in range(m):
            for j in range(i + 1, m):
                try:
                    c[i, j] = c[j, i] = correlation_index(inputs[i], inputs[j])
                except UndefinedCorrelationError:
                    warnings.warn(
                        f"constant input in pair ({i}, {j}); using c=0",
                        RuntimeWarning, stacklevel=2)
                    c[i, j] = c[j, i] = 0.0
        return cls(c=c)


@dataclass(frozen=True)
class PairProbabilities:
    """Normalized pair-update probabilities over index pairs with i < j."""

    pairs: tuple          # ((i, j), ...) with i < j
    probs: np.ndarray = field(repr=False)
    beta: float = 0.0

    def __getitem__(self, pair) -> float:
        i, j = min(pair), max(pair)
        return float(self.probs[self.pairs.index((i, j))])


def pair_probabilities(C: CollinearityMatrix, beta: float) -> PairProbabilities:
    """Exponential weighting ``expm1(beta * c_ij)`` normalized over i < j.

    When every off-diagonal correlation is zero the rule is 0/0; a uniform
    law over pairs is returned with a warning so overlap remains usable.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    m = C.m
    pairs = tuple((i, j) for i in range(m) for j in range(i + 1, m))
    weights = np.array([np.expm1(beta * C.c[i, j]) for i, j in pairs])
    total = weights.sum()
    if total <= 0.0:
        warnings.warn("all pair correlations are zero; using uniform pair "
                      "probabilities", RuntimeWarning, stacklevel=2)
        probs = np.full(len(pairs), 1.0 / len(pairs))
    else:
        probs = weights / total
    return PairProbabilities(pairs=pairs, probs=probs, beta=float(beta))


@dataclass(frozen=True)
class BlockDistribution:
    """Selection law over single blocks and overlapping pair blocks.

    ``labels`` holds ints for single blocks and ``(i, j)`` tuples for
    pairs, aligned with ``probs``; the cumulative vector supports
    inverse-CDF sampling.
    """

    labels: tuple
    probs: np.ndarray = field(repr=False)
    m: int = 0
    n_ob: int = 0
    _cum: np.ndarray = field(repr=False, default=None)

    @property
    def pair_mass(self) -> float:
        return float(sum(p for lbl, p in zip(self.labels, self.probs)
                         if isinstance(lbl, tuple)))


def block_distribution(P: PairProbabilities | None, m: int,
                       n_ob: int) -> BlockDistribution:
    """Mix uniform singles with collinearity-weighted pairs.

    Each single block has probability ``1/(m + n_ob)``; pair ``(i, j)``
    has ``n_ob/(m + n_ob) * P[i, j]``. ``n_ob = 0`` degenerates to the
    uniform single-block schedule and needs no pair probabilities.
    """
    if n_ob < 0:
        raise ValueError("overlap budget must be non-negative")
    if n_ob > 0 and P is None:
        raise ValueError("pair probabilities required when n_ob > 0")
    labels: list = list(range(m))
    probs = [1.0 / (m + n_ob)] * m
    if n_ob > 0:
        scale = n_ob / (m + n_ob)
        labels.extend(P.pairs)
        probs.extend(scale * P.probs)
    probs = np.asarray(probs)
    return BlockDistribution(labels=tuple(labels), probs=probs, m=m,
                             n_ob=n_ob, _cum=np.cumsum(probs))


def sample_block(dist: BlockDistribution, rng):
    """Categorical draw from the block distribution: an int or an (i, j) pair."""
    r = rng.random() * dist._cum[-1]
    return dist.labels[int(np.searchsorted(dist._cum, r, side="right"))]
