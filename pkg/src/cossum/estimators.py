"""Estimator wrappers with the scikit-learn ``fit``/``predict`` interface.

``fit`` takes the sample values on the grid ``t_k = h(2k+1)/2`` (``h = pi/K``)
and learns the cosine sum; ``predict`` evaluates it at arbitrary times.

>>> import numpy as np
>>> from cossum import EXAMPLE1, SamplingGrid, sample
>>> est = EspiraII(K=20).fit(sample(EXAMPLE1, SamplingGrid(100, 20)).values)
>>> est.n_terms_
7
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted, column_or_1d

from .espira import espira1_recover, espira2_recover
from .esprit import EspritConfig, esprit_recover
from .model import CosineSum, SampleVector, SamplingGrid, evaluate
from .oracle import prony_solve


class _CosineSumEstimator(BaseEstimator):

    def _samples(self, X) -> SampleVector:
        values = column_or_1d(np.asarray(X, dtype=float))
        if not np.all(np.isfinite(values)):
            raise ValueError("samples must be finite")
        if self.K is None or not self.K > 0:
            raise ValueError("K must be positive")
        return SampleVector(values, SamplingGrid(len(values), self.K))

    def _store(self, cs: CosineSum, grid: SamplingGrid, diagnostics=(), converged=True):
        cs = cs.sorted()
        self.sum_ = cs
        self.n_terms_ = cs.M
        self.frequencies_ = cs.phi
        self.coefficients_ = cs.gamma
        self.grid_ = grid
        self.diagnostics_ = list(diagnostics)
        self.converged_ = converged
        return self

    def predict(self, t) -> np.ndarray:
        """Evaluate the learned cosine sum at times ``t``."""
        check_is_fitted(self, "sum_")
        return np.asarray(evaluate(self.sum_, np.asarray(t, dtype=float)))


class Esprit(_CosineSumEstimator):
    """ESPRIT on the Toeplitz+Hankel matrix of the samples.

    Args:
        K: grid parameter, ``h = pi / K``.
        L: upper bound for the number of terms (default ``N // 2``).
        eps: relative singular-value threshold for rank detection.
        fixed_M: known number of terms; disables rank detection.
    """

    def __init__(self, K: float = 1.0, L: Optional[int] = None, eps: float = 1e-10,
                 fixed_M: Optional[int] = None):
        self.K = K
        self.L = L
        self.eps = eps
        self.fixed_M = fixed_M

    def fit(self, X, y=None):
        samples = self._samples(X)
        res = esprit_recover(samples, EspritConfig(self.L, self.eps, self.fixed_M),
                             full_output=True)
        self.singular_values_ = res.singular_values
        return self._store(res.sum, samples.grid, res.diagnostics)


class EspiraI(_CosineSumEstimator):
    """AAA interpolation of DCT data, partial fractions and grid post-processing.

    Args:
        K: grid parameter.
        tol: AAA tolerance relative to ``max |g|``.
        fixed_M: known number of terms (noisy data).
        half_spectrum: keep only the first half of the DCT data; defaults to
            ``True`` exactly when ``fixed_M`` is given.
        grid_threshold: cutoff for grid frequency detection.
    """

    def __init__(self, K: float = 1.0, tol: float = 1e-13, fixed_M: Optional[int] = None,
                 half_spectrum: Optional[bool] = None,
                 grid_threshold: Optional[float] = None):
        self.K = K
        self.tol = tol
        self.fixed_M = fixed_M
        self.half_spectrum = half_spectrum
        self.grid_threshold = grid_threshold

    def fit(self, X, y=None):
        samples = self._samples(X)
        res = espira1_recover(samples, self.tol, self.fixed_M, half=self.half_spectrum,
                              grid_threshold=self.grid_threshold, full_output=True)
        self.grid_report_ = res.grid_report
        return self._store(res.sum, samples.grid, res.diagnostics, res.converged)


class EspiraII(_CosineSumEstimator):
    """Loewner matrix pencil on DCT data.

    Args:
        K: grid parameter.
        tol: relative singular-value threshold of the preconditioning loop.
        fixed_M: known number of terms (noisy data).
        half_spectrum: as for :class:`EspiraI`.
    """

    def __init__(self, K: float = 1.0, tol: float = 1e-13, fixed_M: Optional[int] = None,
                 half_spectrum: Optional[bool] = None):
        self.K = K
        self.tol = tol
        self.fixed_M = fixed_M
        self.half_spectrum = half_spectrum

    def fit(self, X, y=None):
        samples = self._samples(X)
        res = espira2_recover(samples, self.tol, self.fixed_M, half=self.half_spectrum,
                              full_output=True)
        return self._store(res.sum, samples.grid, res.diagnostics, res.converged)


class Prony(_CosineSumEstimator):
    """Direct Prony-type solver for exact data; ``fixed_M`` is required."""

    def __init__(self, K: float = 1.0, fixed_M: Optional[int] = None, square: bool = False):
        self.K = K
        self.fixed_M = fixed_M
        self.square = square

    def fit(self, X, y=None):
        if self.fixed_M is None:
            raise ValueError("Prony needs fixed_M")
        samples = self._samples(X)
        return self._store(prony_solve(samples, int(self.fixed_M), self.square), samples.grid)


ESTIMATORS = {"esprit": Esprit, "espira1": EspiraI, "espira2": EspiraII, "prony": Prony}
