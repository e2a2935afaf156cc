"""Cosine-sum signal model, sampling grids, noise and error metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class CosineSum:
    """A sparse cosine sum ``f(t) = sum_j gamma_j * cos(phi_j * t)``.

    Args:
        gamma: nonzero coefficients.
        phi: pairwise distinct, nonnegative frequencies.
    """

    gamma: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float))
        if gamma.ndim != 1 or gamma.shape != phi.shape:
            raise ValueError("gamma and phi must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(gamma)) and np.all(np.isfinite(phi))):
            raise ValueError("parameters must be finite")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "phi", phi)

    @property
    def M(self) -> int:
        return len(self.phi)

    def validate(self, K: Optional[float] = None) -> None:
        """Check the model invariants, raising ``ValueError`` on violation."""
        if np.any(self.gamma == 0):
            raise ValueError("all coefficients must be nonzero")
        if len(np.unique(self.phi)) != self.M:
            raise ValueError("frequencies must be pairwise distinct")
        if np.any(self.phi < 0):
            raise ValueError("frequencies must be nonnegative")
        if K is not None and np.any(self.phi >= K):
            raise ValueError(f"frequencies must lie in [0, {K})")

    def sorted(self) -> "CosineSum":
        order = np.argsort(self.phi, kind="stable")
        return CosineSum(self.gamma[order], self.phi[order])

    def __call__(self, t):
        return evaluate(self, t)

    @classmethod
    def empty(cls) -> "CosineSum":
        return cls(np.zeros(0), np.zeros(0))


@dataclass(frozen=True)
class SamplingGrid:
    """Equidistant nodes ``t_k = h(2k+1)/2``, ``k = 0..N-1``, with ``h = pi/K``."""

    N: int
    K: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        if not self.K > 0:
            raise ValueError("K must be positive")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "K", float(self.K))

    @property
    def h(self) -> float:
        return math.pi / self.K

    @property
    def nodes(self) -> np.ndarray:
        return self.h * (2 * np.arange(self.N) + 1) / 2

    @property
    def grid_spacing(self) -> float:
        """Spacing ``pi/(hN)`` of the frequencies that make ``sin(phi h N)`` vanish."""
        return math.pi / (self.h * self.N)


@dataclass(frozen=True)
class SampleVector:
    """Sample values on a grid; ``at(-k-1) == at(k)`` by evenness."""

    values: np.ndarray
    grid: SamplingGrid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.N,):
            raise ValueError(
                f"expected {self.grid.N} sample values, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    def at(self, k):
        """Sample at integer index ``k``; negative indices use ``f_{-k-1} = f_k``."""
        k = np.asarray(k)
        idx = np.where(k < 0, -k - 1, k)
        return self.values[idx]

    def __len__(self):
        return self.grid.N


@dataclass(frozen=True)
class ErrorReport:
    e_f: float
    e_phi: Optional[float] = None
    e_gamma: Optional[float] = None

    def as_dict(self) -> dict:
        return {"e_f": self.e_f, "e_phi": self.e_phi, "e_gamma": self.e_gamma}


def evaluate(cs: CosineSum, t):
    """Evaluate the cosine sum at scalar or array ``t``."""
    t = np.asarray(t, dtype=float)
    if cs.M == 0:
        return np.zeros_like(t)[()]
    # elementwise sum keeps scalar and vector evaluation bitwise identical
    out = (np.cos(np.multiply.outer(t, cs.phi)) * cs.gamma).sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def sample(cs: CosineSum, grid: SamplingGrid) -> SampleVector:
    return SampleVector(evaluate(cs, grid.nodes), grid)


def add_noise(samples: SampleVector, amplitude: float, seed: int,
              distribution: str = "uniform") -> SampleVector:
    """Add i.i.d. zero-mean noise.

    ``uniform`` draws from ``[-amplitude, amplitude]``; ``gaussian`` uses
    ``amplitude`` as the standard deviation.
    """
    if not amplitude > 0:
        raise ValueError("noise amplitude must be positive")
    rng = np.random.default_rng(seed)
    n = samples.grid.N
    if distribution == "uniform":
        eps = rng.uniform(-amplitude, amplitude, n)
    elif distribution == "gaussian":
        eps = rng.normal(0.0, amplitude, n)
    else:
        raise ValueError(f"unknown noise distribution {distribution!r}")
    return SampleVector(samples.values + eps, samples.grid)


def snr_psnr(clean: SampleVector, noisy: SampleVector) -> tuple[float, float]:
    """Return ``(SNR, PSNR)`` in dB of ``noisy`` relative to ``clean``."""
    f = np.asarray(getattr(clean, "values", clean), dtype=float)
    y = np.asarray(getattr(noisy, "values", noisy), dtype=float)
    if f.shape != y.shape:
        raise ValueError("clean and noisy vectors must have equal length")
    noise_power = np.sum((y - f) ** 2)
    if noise_power == 0:
        raise ValueError("noise power is zero; SNR is undefined")
    snr = 10 * np.log10(np.sum(f ** 2) / noise_power)
    psnr = 10 * np.log10(len(f) * np.max(f ** 2) / noise_power)
    return float(snr), float(psnr)


def default_error_interval(grid: SamplingGrid) -> float:
    return math.pi * grid.N / grid.K


def relative_errors(truth: CosineSum, estimate: CosineSum,
                    interval_end: float, step: float = 0.001) -> ErrorReport:
    """Relative signal, frequency and coefficient errors.

    ``e_f`` is the sup-norm error over equidistant points of
    ``[0, interval_end]`` with spacing ``step``, relative to ``max |f|``.
    Frequencies are matched by rank after sorting both sums; when the term
    counts differ only ``e_f`` is reported.
    """
    t = np.arange(0.0, interval_end + step / 2, step)
    f = _evaluate_chunked(truth, t)
    ft = _evaluate_chunked(estimate, t)
    e_f = float(np.max(np.abs(f - ft)) / np.max(np.abs(f)))
    if truth.M != estimate.M or truth.M == 0:
        return ErrorReport(e_f)
    a, b = truth.sorted(), estimate.sorted()
    e_phi = float(np.max(np.abs(a.phi - b.phi)) / np.max(np.abs(a.phi)))
    e_gamma = float(np.max(np.abs(a.gamma - b.gamma)) / np.max(np.abs(a.gamma)))
    return ErrorReport(e_f, e_phi, e_gamma)


def _evaluate_chunked(cs: CosineSum, t: np.ndarray, chunk: int = 65536) -> np.ndarray:
    out = np.empty_like(t)
    for start in range(0, len(t), chunk):
        out[start:start + chunk] = evaluate(cs, t[start:start + chunk])
    return out


EXAMPLE1 = CosineSum(
    gamma=np.arange(1.0, 8.0),
    phi=np.sqrt([20.0, 0.2, 5.0, 15.0, 3.0, 15.1, 7.0]),
)


def random_cosine_sum(rng: np.random.Generator, M: int, K: float, *,
                      min_cos_sep: float = 0.02, margin: float = 0.1,
                      gamma_range=(0.5, 5.0), max_tries: int = 10000) -> CosineSum:
    """Draw ``M`` frequencies uniformly in ``[margin, K - margin]``.

    Draws are rejected until the values ``cos(phi_j h)`` (``h = pi/K``) are
    pairwise at least ``min_cos_sep`` apart. Coefficients are uniform in
    ``gamma_range`` with random signs.
    """
    h = math.pi / K
    for _ in range(max_tries):
        phi = rng.uniform(margin, K - margin, size=M)
        c = np.sort(np.cos(phi * h))
        if M < 2 or np.min(np.diff(c)) >= min_cos_sep:
            break
    else:
        raise RuntimeError("could not draw separated frequencies")
    gamma = rng.uniform(*gamma_range, size=M) * rng.choice([-1.0, 1.0], size=M)
    return CosineSum(gamma, phi)
