"""Greedy barycentric rational interpolation (AAA) on the cosine grid."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import svd
from .transforms import TransformedData


@dataclass(frozen=True)
class BarycentricRational:
    """``r(z) = sum w_k g_k / (z - z_k)  /  sum w_k / (z - z_k)``."""

    nodes: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if not (len(self.nodes) == len(self.values) == len(self.weights)):
            raise ValueError("nodes, values and weights must have equal length")

    def __call__(self, z):
        return barycentric_eval(self, z)


@dataclass
class AaaResult:
    """Output of :func:`aaa_interpolate`.

    ``S`` lists the chosen support indices in selection order; the remaining
    indices form ``Gamma``. ``history`` holds one ``(max residual, smallest
    singular value)`` pair per iteration.
    """

    S: np.ndarray
    g_S: np.ndarray
    w_S: np.ndarray
    z_S: np.ndarray
    M: int
    converged: bool
    history: list = field(default_factory=list)
    loewner_matrices: list = field(default_factory=list)

    @property
    def rational(self) -> BarycentricRational:
        return BarycentricRational(self.z_S, self.g_S, self.w_S)


def loewner_matrix(g, z, rows, cols) -> np.ndarray:
    """``((g_l - g_k) / (z_l - z_k))`` for ``l`` in ``rows`` and ``k`` in ``cols``."""
    g = np.asarray(g)
    z = np.asarray(z)
    return (g[rows][:, None] - g[cols][None, :]) / (z[rows][:, None] - z[cols][None, :])


def cauchy_matrix(x, y) -> np.ndarray:
    return 1.0 / (np.asarray(x)[:, None] - np.asarray(y)[None, :])


def aaa_interpolate(data: TransformedData, tol: float, jmax: int,
                    keep_matrices: bool = False) -> AaaResult:
    """Run at most ``jmax`` greedy AAA steps on ``(z_k, g_k)``.

    Step ``j`` adds the worst-fitted index to the support set, takes the
    weights as the right singular vector of the smallest singular value of
    the Loewner matrix over (remaining, support) and stops once the
    residual on the remaining indices drops below ``tol`` (absolute).
    Ties in the argmax go to the smallest index.

    Hitting ``jmax`` is not an error: the last iterate is returned with
    ``converged=False``.
    """
    g = np.asarray(data.g, dtype=float)
    z = np.asarray(data.z, dtype=float)
    n = len(g)
    if n < 2:
        raise ValueError("AAA needs at least two data points")
    if jmax < 1 or jmax >= n:
        raise ValueError(f"jmax must lie in [1, {n - 1}], got {jmax}")

    in_support = np.zeros(n, dtype=bool)
    S: list[int] = []
    residual = np.abs(g)
    history = []
    matrices = []
    w = np.ones(1)
    converged = False
    for j in range(1, jmax + 1):
        gamma_idx = np.flatnonzero(~in_support)
        k = int(gamma_idx[np.argmax(residual[gamma_idx])])
        S.append(k)
        in_support[k] = True
        gamma_idx = np.flatnonzero(~in_support)
        S_arr = np.asarray(S)

        L = loewner_matrix(g, z, gamma_idx, S_arr)
        if keep_matrices:
            matrices.append(L)
        _, sigma, V = svd(L, full_matrices=True)
        w = V[:, -1]
        s_min = sigma[-1] if len(sigma) == len(S) else 0.0

        C = cauchy_matrix(z[gamma_idx], z[S_arr])
        r = (C @ (w * g[S_arr])) / (C @ w)
        residual = np.zeros(n)
        residual[gamma_idx] = np.abs(r - g[gamma_idx])
        err = residual.max() if len(gamma_idx) else 0.0
        history.append((float(err), float(s_min)))
        if err < tol:
            converged = True
            break

    S_arr = np.asarray(S)
    return AaaResult(S=S_arr, g_S=g[S_arr], w_S=w, z_S=z[S_arr], M=len(S) - 1,
                     converged=converged, history=history,
                     loewner_matrices=matrices)


def barycentric_eval(r: BarycentricRational, z):
    """Evaluate ``r`` at ``z``; support nodes return their stored value."""
    zv = np.atleast_1d(np.asarray(z, dtype=float))
    nodes = np.asarray(r.nodes, dtype=float)
    diff = zv[:, None] - nodes[None, :]
    hit = diff == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        C = 1.0 / diff
        out = (C @ (r.weights * r.values)) / (C @ r.weights)
    rows, cols = np.nonzero(hit)
    out[rows] = np.asarray(r.values)[cols]
    if np.ndim(z) == 0:
        return float(out[0])
    return out
