"""Measurement model: outputs as a sum of FIR-filtered inputs.

Each input channel ``u_k`` enters through a lower-triangular Toeplitz
matrix ``G_k`` with ``G_k[i, l] = u_k[i - l]`` (zero initial
conditions), so ``Y = sum_k G_k theta_k + E`` with white Gaussian ``E``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ImpulseResponseSet",
    "RegressionProblem",
    "toeplitz_regressor",
    "build_regressors",
    "build_regression_problem",
    "simulate_output",
]


def toeplitz_regressor(u: np.ndarray, p: int) -> np.ndarray:
    """Convolution matrix of one input: column ``l`` is ``u`` shifted down ``l`` rows."""
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    G = np.zeros((n, p))
    for l in range(min(p, n)):
        G[l:, l] = u[: n - l]
    return G


@dataclass(frozen=True)
class ImpulseResponseSet:
    """FIR coefficient vectors for all channels, blocked and stacked views."""

    blocks: tuple
    p: int

    @classmethod
    def from_blocks(cls, blocks) -> "ImpulseResponseSet":
        blocks = tuple(np.asarray(b, dtype=float) for b in blocks)
        if not blocks:
            raise ValueError("at least one coefficient block required")
        p = blocks[0].shape[0]
        for b in blocks:
            if b.shape != (p,):
                raise ValueError("all coefficient blocks must have equal length")
        return cls(blocks=blocks, p=p)

    @classmethod
    def from_stacked(cls, stacked: np.ndarray, m: int) -> "ImpulseResponseSet":
        stacked = np.asarray(stacked, dtype=float)
        if stacked.ndim != 1 or stacked.size % m:
            raise ValueError(f"cannot split a length-{stacked.size} vector into {m} blocks")
        p = stacked.size // m
        return cls(blocks=tuple(stacked[k * p:(k + 1) * p].copy() for k in range(m)),
                   p=p)

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate(self.blocks)


@dataclass(frozen=True)
class RegressionProblem:
    """Output vector, per-channel Toeplitz regressors and dimensions."""

    Y: np.ndarray = field(repr=False)
    G_blocks: tuple = field(repr=False)
    inputs: tuple = field(repr=False)
    n: int = 0
    m: int = 0
    p: int = 0

    @property
    def G(self) -> np.ndarray:
        """Stacked ``n x (m*p)`` regression matrix ``[G_1 ... G_m]``."""
        return np.hstack(self.G_blocks)

    def save(self, directory) -> None:
        """Write inputs/output CSV plus a JSON descriptor."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        cols = np.column_stack(list(self.inputs) + [self.Y])
        header = ",".join([f"u{k+1}" for k in range(self.m)] + ["y"])
        np.savetxt(directory / "data.csv", cols, delimiter=",",
                   header=header, comments="")
        (directory / "problem.json").write_text(json.dumps(
            {"n": self.n, "m": self.m, "p": self.p}, indent=2))

    @classmethod
    def load(cls, directory) -> "RegressionProblem":
        directory = Path(directory)
        meta = json.loads((directory / "problem.json").read_text())
        data = np.loadtxt(directory / "data.csv", delimiter=",", skiprows=1, ndmin=2)
        inputs = [data[:, k] for k in range(meta["m"])]
        return build_regression_problem(inputs, data[:, meta["m"]], meta["p"])


def build_regressors(inputs, p: int):
    """Toeplitz regressor blocks for each input channel."""
    inputs = [np.asarray(u, dtype=float) for u in inputs]
    n = inputs[0].shape[0]
    for u in inputs:
        if u.shape != (n,):
            raise ValueError("all inputs must share the same length")
    return [toeplitz_regressor(u, p) for u in inputs]


def build_regression_problem(inputs, Y, p: int) -> RegressionProblem:
    """Assemble a :class:`RegressionProblem` from raw sequences.

    Raises
    ------
    ValueError
        On length mismatches, fewer than two channels, or ``n <= p``.
    """
    inputs = [np.asarray(u, dtype=float) for u in inputs]
    Y = np.asarray(Y, dtype=float)
    if len(inputs) < 2:
        raise ValueError("at least two input channels are required")
    n = Y.shape[0]
    for k, u in enumerate(inputs):
        if u.shape != (n,):
            raise ValueError(f"input {k} has length {u.shape[0]}, output has {n}")
    if n < p:
        raise ValueError(f"need at least as many samples as the FIR order: n={n}, p={p}")
    G_blocks = tuple(toeplitz_regressor(u, p) for u in inputs)
    return RegressionProblem(Y=Y, G_blocks=G_blocks, inputs=tuple(inputs),
                             n=n, m=len(inputs), p=p)


def simulate_output(G_blocks, theta: ImpulseResponseSet, sigma2: float, rng) -> np.ndarray:
    """Noisy output ``sum_k G_k theta_k + E`` with ``E ~ N(0, sigma2 I)``.

    ``sigma2 = 0`` returns the noiseless output exactly.
    """
    if sigma2 < 0:
        raise ValueError("noise variance must be non-negative")
    if len(G_blocks) != theta.m:
        raise ValueError(f"{len(G_blocks)} regressor blocks vs {theta.m} coefficient blocks")
    n = G_blocks[0].shape[0]
    out = np.zeros(n)
    for G, th in zip(G_blocks, theta.blocks):
        if G.shape != (n, theta.p):
            raise ValueError("regressor block shape mismatch")
        out += G @ th
    if sigma2 > 0:
        out = out + rng.standard_normal(n) * np.sqrt(sigma2)
    return out
