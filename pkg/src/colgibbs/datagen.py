"""Synthetic systems and input generators for the benchmark experiments.

Transfer functions share one random stable denominator per dataset;
collinear input families are built either by duplicating one white
record or by chaining moving-average perturbations with prescribed
correlation targets.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .problem import RegressionProblem, build_regression_problem, build_regressors
from .problem import ImpulseResponseSet, simulate_output

__all__ = [
    "TransferFunctionSet",
    "impulse_response",
    "random_common_denominator_tfs",
    "collinear_input_chain",
    "noise_variance_from_snr",
    "Dataset",
    "make_dataset",
    "load_dataset",
    "validate_descriptor",
    "DescriptorError",
]

# pole-sampling recipe: moduli uniform in [0.5, 0.95]; conjugate pairs kept
# away from resonance (angle bounded below) and from the real axis
_POLE_MODULUS = (0.5, 0.95)
_PAIR_ANGLE = (0.15 * np.pi, 0.6 * np.pi)
_PAIR_COUNT_WEIGHTS = (0.5, 0.35, 0.15)


@dataclass(frozen=True)
class TransferFunctionSet:
    """Random rational systems truncated to FIR vectors."""

    firs: tuple
    denominator: np.ndarray = field(repr=False)
    numerators: tuple = field(repr=False)
    tail_bounds: tuple = ()

    @property
    def m(self) -> int:
        return len(self.firs)


def impulse_response(num, den, p: int, horizon: int | None = None):
    """First ``p`` impulse-response samples of ``num/den`` plus the relative
    truncation tail over ``horizon`` (default ``4 p``) samples."""
    horizon = 4 * p if horizon is None else max(horizon, p)
    imp = np.zeros(horizon)
    imp[0] = 1.0
    h = lfilter(np.asarray(num, dtype=float), np.asarray(den, dtype=float), imp)
    full = float(np.linalg.norm(h))
    tail = float(np.linalg.norm(h[p:]) / full) if full > 0 else 0.0
    return h[:p].copy(), tail


def random_common_denominator_tfs(m: int, degree: int, p: int,
                                  rng) -> TransferFunctionSet:
    """Random degree-``degree`` transfer functions sharing one stable
    denominator, truncated to FIR order ``p``.

    Poles are drawn with modulus uniform in [0.5, 0.95]; the number of
    conjugate pairs is random, remaining poles are real (mostly positive).
    Numerator coefficients are independent standard normals.
    """
    if degree < 1:
        raise ValueError("denominator degree must be at least 1")
    max_pairs = degree // 2
    weights = np.array(_PAIR_COUNT_WEIGHTS[: max_pairs + 1])
    n_pairs = int(rng.choice(np.arange(weights.size), p=weights / weights.sum()))
    poles = []
    for _ in range(n_pairs):
        radius = rng.uniform(*_POLE_MODULUS)
        angle = rng.uniform(*_PAIR_ANGLE)
        poles.extend([radius * np.exp(1j * angle), radius * np.exp(-1j * angle)])
    for _ in range(degree - 2 * n_pairs):
        sign = 1.0 if rng.random() < 0.8 else -1.0
        poles.append(sign * rng.uniform(*_POLE_MODULUS))
    den = np.real(np.poly(poles))
    firs, nums, tails = [], [], []
    for _ in range(m):
        num = rng.standard_normal(degree + 1)
        h, tail = impulse_response(num, den, p)
        firs.append(h)
        nums.append(num)
        tails.append(tail)
    return TransferFunctionSet(firs=tuple(firs), denominator=den,
                               numerators=tuple(nums), tail_bounds=tuple(tails))


def collinear_input_chain(base: np.ndarray, targets_c, rng) -> list:
    """Chain of inputs where each link adds MA(1) noise sized to hit the
    requested correlation with its predecessor.

    The innovation variance solves ``c = eta / sqrt(eta^2 + w2 / (1 - 0.8^2))``
    with ``eta^2`` the realized variance of the predecessor.
    """
    base = np.asarray(base, dtype=float)
    chain = [base]
    for c in targets_c:
        if not 0.0 < c < 1.0:
            raise ValueError(f"correlation target must be in (0, 1), got {c}")
        eta2 = float(np.var(chain[-1]))
        w2 = eta2 * (1.0 / c ** 2 - 1.0) * (1.0 - 0.8 ** 2)
        v = rng.standard_normal(base.shape[0] + 1) * np.sqrt(w2)
        chain.append(chain[-1] + (v[1:] - 0.8 * v[:-1]))
    return chain


def noise_variance_from_snr(signal: np.ndarray, factor: float) -> float:
    """Sample variance of the noiseless output scaled by ``factor``."""
    signal = np.asarray(signal, dtype=float)
    var = float(np.var(signal))
    if var == 0.0:
        raise ValueError("constant signal has no usable variance")
    return var * factor


class DescriptorError(ValueError):
    """An experiment descriptor is missing or misusing a field."""


_REQUIRED = ("m", "n", "p", "alpha", "degree", "noise_factor", "seed", "inputs")


def validate_descriptor(desc: dict) -> dict:
    """Check required fields and the input-family block; returns ``desc``."""
    for key in _REQUIRED:
        if key not in desc:
            raise DescriptorError(f"missing field: {key}")
    for key in ("m", "n", "p", "degree", "seed"):
        if not isinstance(desc[key], int) or desc[key] < (0 if key == "seed" else 1):
            raise DescriptorError(f"field {key}: positive integer required")
    if desc["m"] < 2:
        raise DescriptorError("field m: at least two channels required")
    if not 0.0 < desc["alpha"] < 1.0:
        raise DescriptorError("field alpha: must lie in (0, 1)")
    if desc["noise_factor"] < 0:
        raise DescriptorError("field noise_factor: must be non-negative")
    inputs = desc["inputs"]
    if not isinstance(inputs, dict) or "kind" not in inputs:
        raise DescriptorError("field inputs: object with a 'kind' entry required")
    kind = inputs["kind"]
    if kind not in ("white", "identical", "chain", "delta"):
        raise DescriptorError(f"field inputs.kind: unknown kind {kind!r}")
    if kind == "chain":
        channels = inputs.get("channels")
        if not isinstance(channels, int) or not 2 <= channels <= desc["m"]:
            raise DescriptorError("field inputs.channels: integer in [2, m] required")
        c = inputs.get("c")
        targets = c if isinstance(c, list) else [c] * (channels - 1)
        if len(targets) != channels - 1:
            raise DescriptorError("field inputs.c: one target per link required")
        for t in targets:
            if not isinstance(t, (int, float)) or not 0.0 < t < 1.0:
                raise DescriptorError("field inputs.c: targets must lie in (0, 1)")
    return desc


@dataclass
class Dataset:
    """Generated experiment data plus the ground truth behind it."""

    problem: RegressionProblem
    truth: ImpulseResponseSet
    sigma2: float
    descriptor: dict
    tail_bounds: tuple
    collinear_channels: tuple

    def save(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        self.problem.save(directory)
        (directory / "descriptor.json").write_text(
            json.dumps(self.descriptor, indent=2))
        truth = {
            "theta": [b.tolist() for b in self.truth.blocks],
            "sigma2": self.sigma2,
            "seed": self.descriptor["seed"],
            "tail_bounds": list(self.tail_bounds),
            "collinear_channels": list(self.collinear_channels),
        }
        (directory / "truth.json").write_text(json.dumps(truth, indent=2))


def make_dataset(desc: dict) -> Dataset:
    """Generate inputs, systems and noisy output from a descriptor."""
    desc = validate_descriptor(desc)
    m, n, p = desc["m"], desc["n"], desc["p"]
    rng = np.random.default_rng(desc["seed"])
    kind = desc["inputs"]["kind"]
    if kind == "white":
        inputs = [rng.standard_normal(n) for _ in range(m)]
        collinear: tuple = ()
    elif kind == "delta":
        delta = np.zeros(n)
        delta[0] = 1.0
        inputs = [delta.copy() for _ in range(m)]
        collinear = tuple(range(m))
    elif kind == "identical":
        u = rng.standard_normal(n)
        inputs = [u.copy() for _ in range(m)]
        collinear = tuple(range(m))
    else:
        channels = desc["inputs"]["channels"]
        c = desc["inputs"]["c"]
        targets = c if isinstance(c, list) else [c] * (channels - 1)
        inputs = collinear_input_chain(rng.standard_normal(n), targets, rng)
        inputs += [rng.standard_normal(n) for _ in range(m - channels)]
        collinear = tuple(range(channels))
    tfs = random_common_denominator_tfs(m, desc["degree"], p, rng)
    truth = ImpulseResponseSet.from_blocks(tfs.firs)
    regressors = build_regressors(inputs, p)
    noiseless = simulate_output(regressors, truth, 0.0, rng)
    sigma2 = noise_variance_from_snr(noiseless, desc["noise_factor"])
    Y = noiseless + rng.standard_normal(n) * np.sqrt(sigma2)
    problem = build_regression_problem(inputs, Y, p)
    return Dataset(problem=problem, truth=truth, sigma2=sigma2,
                   descriptor=desc, tail_bounds=tfs.tail_bounds,
                   collinear_channels=collinear)


def load_dataset(directory) -> Dataset:
    """Read a dataset written by :meth:`Dataset.save`."""
    directory = Path(directory)
    try:
        desc = json.loads((directory / "descriptor.json").read_text())
        truth_doc = json.loads((directory / "truth.json").read_text())
    except FileNotFoundError as exc:
        raise DescriptorError(f"not a dataset directory: {directory}") from exc
    problem = RegressionProblem.load(directory)
    truth = ImpulseResponseSet.from_blocks([np.asarray(b) for b in truth_doc["theta"]])
    return Dataset(problem=problem, truth=truth, sigma2=truth_doc["sigma2"],
                   descriptor=desc, tail_bounds=tuple(truth_doc["tail_bounds"]),
                   collinear_channels=tuple(truth_doc["collinear_channels"]))
