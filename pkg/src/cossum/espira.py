"""ESPIRA-I (AAA + partial fractions) and ESPIRA-II (Loewner matrix pencil).

Both methods work on the DCT-II of the samples. For a cosine sum with no
frequency on the grid ``(pi / hN) Z`` the scaled transform values satisfy

    g_k = sum_j a_j / (z_k - b_j),    z_k = cos(pi k / N),

with poles ``b_j = cos(phi_j h)`` and residues
``a_j = gamma_j sin(phi_j h / 2) sin(phi_j h N)``. Grid frequencies instead
add isolated spikes ``N gamma / 2`` (``N gamma`` for ``phi = 0``) to the
transform.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .aaa import AaaResult, aaa_interpolate, cauchy_matrix, loewner_matrix
from .esprit import RecoveryError, cosines_to_frequencies, vandermonde_gamma
from .model import CosineSum, SampleVector, SamplingGrid, evaluate
from .numerics import eig_dense, eig_pencil, least_squares, svd
from .transforms import DctVector, TransformedData, dct2, fhat_from_g, g_vector, support_nodes

logger = logging.getLogger(__name__)

# a pole within this distance of a node z_k is read as a grid frequency
GRID_POLE_TOL = 1e-8
SMALL_WEIGHT = 1e-8
GAMMA_DENOM_TOL = 1e-8


@dataclass(frozen=True)
class PartialFraction:
    """``r(z) = sum_j a_j / (z - b_j)``.

    ``grid_indices`` lists nodes ``k`` at which a pole ``b = z_k`` was split
    off; those belong to grid frequencies and carry no residue here.
    """

    a: np.ndarray
    b: np.ndarray
    grid_indices: tuple = ()

    @property
    def M(self) -> int:
        return len(self.b)

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if self.M == 0:
            return np.zeros_like(z)
        return cauchy_matrix(z, self.b) @ self.a


@dataclass(frozen=True)
class GridTerm:
    k: int
    phi: float
    gamma: float


@dataclass
class GridFrequencyReport:
    entries: list = field(default_factory=list)
    residual: Optional[np.ndarray] = None  # fhat^(2)

    def as_sum(self) -> CosineSum:
        if not self.entries:
            return CosineSum.empty()
        return CosineSum([e.gamma for e in self.entries], [e.phi for e in self.entries])

    def __len__(self):
        return len(self.entries)


@dataclass
class EspiraResult:
    sum: CosineSum
    partial_fraction: PartialFraction
    grid_report: GridFrequencyReport
    aaa: Optional[AaaResult] = None
    support: Optional[np.ndarray] = None
    converged: bool = True
    diagnostics: list = field(default_factory=list)


def barycentric_poles(aaa: AaaResult) -> np.ndarray:
    """Finite eigenvalues of the ``(m+2) x (m+2)`` arrowhead pencil.

    These are the zeros of the barycentric denominator; two eigenvalues of
    the pencil are always infinite.
    """
    m = len(aaa.S)
    A = np.zeros((m + 1, m + 1))
    A[0, 1:] = aaa.w_S
    A[1:, 0] = 1.0
    A[1:, 1:] = np.diag(aaa.z_S)
    B = np.eye(m + 1)
    B[0, 0] = 0.0
    return eig_pencil(A, B, node_scale=max(1.0, np.max(np.abs(aaa.z_S))))


def _split_grid_poles(b: np.ndarray, N: int) -> tuple[np.ndarray, tuple]:
    nodes = support_nodes(N)
    dist = np.abs(b[:, None] - nodes[None, :])
    nearest = np.argmin(dist, axis=1)
    on_grid = dist[np.arange(len(b)), nearest] <= GRID_POLE_TOL
    return b[~on_grid], tuple(sorted(int(k) for k in nearest[on_grid]))


def residues(data: TransformedData, b: np.ndarray, exclude=()) -> np.ndarray:
    """Least-squares residues for fixed poles, skipping rows in ``exclude``."""
    if len(b) == 0:
        return np.zeros(0)
    rows = np.ones(data.count, dtype=bool)
    rows[[k for k in exclude if k < data.count]] = False
    # rows whose node coincides with a pole would be singular
    rows &= np.min(np.abs(data.z[:, None] - b[None, :]), axis=1) > GRID_POLE_TOL
    return least_squares(cauchy_matrix(data.z[rows], b), data.g[rows])


def partial_fractions(aaa: AaaResult, data: TransformedData, *, strict: bool = True,
                      split_grid: bool = True,
                      diagnostics: Optional[list] = None) -> PartialFraction:
    """Convert an AAA interpolant into poles and residues.

    Poles are the finite eigenvalues of the barycentric pencil; there must be
    exactly ``aaa.M`` of them. Poles that coincide with a node ``z_k`` mark
    grid frequencies and are set aside when ``split_grid`` is on. Residues of
    the remaining poles solve the Cauchy system on all other nodes.

    Raises:
        RecoveryError: wrong number of finite eigenvalues, or (``strict``) a
            pole outside ``[-1, 1]``.
    """
    diagnostics = diagnostics if diagnostics is not None else []
    if aaa.M < 1:
        raise RecoveryError("rational interpolant has degree 0; no poles")
    b = barycentric_poles(aaa)
    if len(b) != aaa.M:
        raise RecoveryError(
            f"expected {aaa.M} finite poles, found {len(b)} (two infinite expected)")
    w = np.abs(aaa.w_S)
    if aaa.converged and np.any(w < SMALL_WEIGHT * w.max()):
        diagnostics.append("near-zero barycentric weight: frequency close to the grid pi/(hN) Z")
    b = _admissible_cosines(b, strict, diagnostics)
    grid_idx: tuple = ()
    if split_grid:
        b, grid_idx = _split_grid_poles(b, data.N)
    a = residues(data, b, exclude=grid_idx)
    return PartialFraction(a=a, b=b, grid_indices=grid_idx)


def _admissible_cosines(b, strict, diagnostics) -> np.ndarray:
    # same acceptance rule as for ESPRIT eigenvalues, expressed on cos values
    phi = cosines_to_frequencies(b, 1.0, strict=strict, diagnostics=diagnostics)
    return np.cos(phi)


def detect_grid_frequencies(dct: DctVector, recovered: PartialFraction,
                            grid: SamplingGrid,
                            threshold: Optional[float] = None) -> GridFrequencyReport:
    """Find grid frequencies from the part of the DCT the rational fit misses.

    ``fhat^(2) = fhat - fhat^(1)``, where ``fhat^(1)`` is the transform of
    the rational part. Every index with ``|fhat^(2)_k| > threshold * N`` is a
    grid frequency ``phi = k pi / (hN)`` with ``gamma = 2 fhat^(2)_k / N``
    (``fhat^(2)_0 / N`` for ``k = 0``). The default threshold is
    ``1e-6 max|fhat| / N``.
    """
    fhat = np.asarray(dct.values, dtype=float)
    N = len(fhat)
    fhat1 = fhat_from_g(recovered(support_nodes(N)), N)
    resid = fhat - fhat1
    if threshold is None:
        threshold = 1e-6 * np.max(np.abs(fhat)) / N
    hits = np.flatnonzero(np.abs(resid) > threshold * N)
    entries = []
    for k in hits:
        gamma = resid[k] / N if k == 0 else 2 * resid[k] / N
        entries.append(GridTerm(int(k), k * grid.grid_spacing, float(gamma)))
    return GridFrequencyReport(entries, resid)


def gamma_from_residues(a, phi, grid: SamplingGrid, samples: SampleVector) -> np.ndarray:
    """Coefficients ``gamma_j = a_j / (sin(phi_j h/2) sin(phi_j h N))``.

    If any denominator is tiny (``phi`` on or near the grid) all
    coefficients are instead fitted jointly by Vandermonde least squares.
    """
    a = np.asarray(a, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if a.shape != phi.shape:
        raise ValueError("a and phi must have equal length")
    h, N = grid.h, grid.N
    denom = np.sin(phi * h / 2) * np.sin(phi * h * N)
    if np.all(np.abs(denom) > GAMMA_DENOM_TOL):
        return a / denom
    return vandermonde_gamma(samples, phi)


def _prepare(samples: SampleVector, half: bool) -> tuple[DctVector, TransformedData]:
    dct = dct2(samples)
    return dct, g_vector(dct, half=half)


def _default_jmax(data: TransformedData, fixed_M: Optional[int]) -> int:
    if fixed_M is not None:
        jmax = int(fixed_M) + 1
    else:
        jmax = data.N // 2 - 1
    jmax = min(jmax, data.count - 1)
    if jmax < 1:
        raise ValueError("too few samples")
    return jmax


def espira1_recover(samples: SampleVector, tol: float = 1e-13,
                    fixed_M: Optional[int] = None, *, half: Optional[bool] = None,
                    grid_threshold: Optional[float] = None,
                    full_output: bool = False):
    """ESPIRA-I: rational interpolation of DCT data by AAA.

    Args:
        samples: equidistant samples.
        tol: AAA stopping tolerance relative to ``max |g|`` (exact data).
        fixed_M: wanted number of terms for noisy data or approximation;
            AAA then runs exactly ``fixed_M + 1`` steps.
        half: keep only ``k < N/2``; defaults to ``fixed_M is not None``.
        grid_threshold: see :func:`detect_grid_frequencies`.

    Returns:
        ``(CosineSum, GridFrequencyReport)``, or an :class:`EspiraResult` when
        ``full_output`` is set. The sum already contains the grid terms.
    """
    noisy = fixed_M is not None
    half = noisy if half is None else half
    grid = samples.grid
    dct, data = _prepare(samples, half)
    jmax = _default_jmax(data, fixed_M)
    scale = np.max(np.abs(data.g))
    diagnostics: list = []
    aaa = aaa_interpolate(data, tol * scale, jmax)
    if not aaa.converged and not noisy:
        diagnostics.append(f"AAA did not converge within {jmax} steps")

    if aaa.M == 0:
        pf = PartialFraction(np.zeros(0), np.zeros(0))
    else:
        pf = partial_fractions(aaa, data, strict=not noisy, split_grid=not noisy,
                               diagnostics=diagnostics)

    if noisy:
        report = GridFrequencyReport()
    else:
        report = detect_grid_frequencies(dct, pf, grid, grid_threshold)

    phi = np.arccos(np.clip(pf.b, -1.0, 1.0)) / grid.h
    grid_part = report.as_sum()
    reduced = SampleVector(samples.values - evaluate(grid_part, grid.nodes), grid)
    gamma = gamma_from_residues(pf.a, phi, grid, reduced)
    rational_sum = CosineSum(gamma, phi)
    total = _combine(rational_sum, grid_part)
    if full_output:
        return EspiraResult(total, pf, report, aaa=aaa, support=aaa.S,
                            converged=aaa.converged or noisy, diagnostics=diagnostics)
    return total, report


def _combine(a: CosineSum, b: CosineSum) -> CosineSum:
    out = CosineSum(np.concatenate([a.gamma, b.gamma]), np.concatenate([a.phi, b.phi]))
    return out.sorted()


def build_loewner_pair(data: TransformedData, S, Gamma) -> tuple[np.ndarray, np.ndarray]:
    """Loewner matrices ``L0 = [g_l - g_k] / [z_l - z_k]`` and
    ``L1 = [g_l z_l - g_k z_k] / [z_l - z_k]`` over rows ``Gamma``, columns ``S``."""
    S = np.asarray(S, dtype=int)
    Gamma = np.asarray(Gamma, dtype=int)
    if np.intersect1d(S, Gamma).size:
        raise ValueError("S and Gamma must be disjoint")
    L0 = loewner_matrix(data.g, data.z, Gamma, S)
    L1 = loewner_matrix(data.g * data.z, data.z, Gamma, S)
    return L0, L1


def loewner_partition(data: TransformedData, tol: float, jmax: int,
                      exact: bool) -> tuple[np.ndarray, np.ndarray, bool]:
    """Greedy choice of ``M`` support indices for the Loewner pencil.

    Runs AAA steps; for exact data stops as soon as the smallest singular
    value of the Loewner matrix falls below ``tol * sigma_1`` and drops the
    index added last. Otherwise the loop runs to ``jmax`` and the last index
    is dropped likewise, leaving ``jmax - 1`` support indices.

    Returns:
        ``(S, Gamma, stopped)``.
    """
    g, z = data.g, data.z
    n = data.count
    in_support = np.zeros(n, dtype=bool)
    S: list[int] = []
    residual = np.abs(g)
    stopped = False
    for _ in range(jmax):
        gamma_idx = np.flatnonzero(~in_support)
        k = int(gamma_idx[np.argmax(residual[gamma_idx])])
        S.append(k)
        in_support[k] = True
        gamma_idx = np.flatnonzero(~in_support)
        S_arr = np.asarray(S)
        L = loewner_matrix(g, z, gamma_idx, S_arr)
        _, sigma, V = svd(L, full_matrices=True)
        if exact and sigma[-1] < tol * sigma[0] or sigma[0] == 0:
            stopped = True
            break
        w = V[:, -1]
        C = cauchy_matrix(z[gamma_idx], z[S_arr])
        r = (C @ (w * g[S_arr])) / (C @ w)
        residual = np.zeros(n)
        residual[gamma_idx] = np.abs(r - g[gamma_idx])
    S.pop()
    S_arr = np.asarray(S, dtype=int)
    mask = np.ones(n, dtype=bool)
    mask[S_arr] = False
    return S_arr, np.flatnonzero(mask), stopped


def loewner_pencil_poles(L0: np.ndarray, L1: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``z L0 - L1`` via the SVD of ``[L0, L1]``.

    With ``[L0, L1] = U D V^T`` and ``M`` columns each, the leading ``M``
    rows of ``V^T`` split into blocks ``(A, B)``; the poles are the
    eigenvalues of ``pinv(A) B``.
    """
    M = L0.shape[1]
    _, _, V = svd(np.hstack([L0, L1]), full_matrices=True)
    Vt = V.T[:M]
    return eig_dense(least_squares(Vt[:, :M], Vt[:, M:]))


def espira2_recover(samples: SampleVector, tol: float = 1e-13,
                    fixed_M: Optional[int] = None, *, half: Optional[bool] = None,
                    full_output: bool = False):
    """ESPIRA-II: matrix pencil for Loewner matrices of the DCT data.

    Grid frequencies need no special treatment here; their coefficients come
    from a joint Vandermonde fit.
    """
    noisy = fixed_M is not None
    half = noisy if half is None else half
    grid = samples.grid
    _, data = _prepare(samples, half)
    jmax = _default_jmax(data, fixed_M)
    S, Gamma, stopped = loewner_partition(data, tol, jmax, exact=not noisy)
    diagnostics: list = []
    if not noisy and not stopped:
        diagnostics.append(f"preconditioning did not reach the rank gap within {jmax} steps")
    if len(S) == 0:
        raise RecoveryError("no support indices selected")
    L0, L1 = build_loewner_pair(data, S, Gamma)
    poles = loewner_pencil_poles(L0, L1)
    b = _admissible_cosines(poles, not noisy, diagnostics)
    if len(b) == 0:
        raise RecoveryError("no admissible poles")
    a = residues(data, b)
    phi = np.arccos(b) / grid.h
    gamma = gamma_from_residues(a, phi, grid, samples)
    result = CosineSum(gamma, phi).sorted()
    if full_output:
        pf = PartialFraction(a, b)
        return EspiraResult(result, pf, GridFrequencyReport(), support=S,
                            converged=stopped or noisy, diagnostics=diagnostics)
    return result
