import numpy as np
import pytest

from cossum.esprit import build_toeplitz_hankel
from cossum.model import EXAMPLE1, SamplingGrid, sample
from cossum.numerics import (eig_dense, eig_pencil, least_squares, numerical_rank,
                             pencil_eigenvalues, svd)


def test_svd_examples():
    assert np.allclose(svd(np.eye(3)).sigma, 1.0)
    u = np.array([0.6, 0.8])
    v = np.array([0.0, 1.0, 0.0])
    np.testing.assert_allclose(svd(np.outer(u, v)).sigma, [1.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("shape", [(5, 3), (3, 5), (6, 6)])
def test_svd_reconstruction(shape):
    A = np.random.default_rng(0).standard_normal(shape)
    U, s, V = svd(A)
    assert U.shape == (shape[0], shape[0]) and V.shape == (shape[1], shape[1])
    S = np.zeros(shape)
    S[:len(s), :len(s)] = np.diag(s)
    assert np.linalg.norm(A - U @ S @ V.T) <= 1e-12 * s[0] * np.sqrt(A.size)
    assert np.all(np.diff(s) <= 0)


def test_svd_rejects_nonfinite():
    with pytest.raises(ValueError):
        svd(np.array([[1.0, np.nan]]))


def test_example1_rank():
    H = build_toeplitz_hankel(sample(EXAMPLE1, SamplingGrid(100, 20)), 50)
    sigma = svd(H).sigma
    assert np.sum(sigma > 1e-10 * sigma[0]) == 7
    assert numerical_rank(sigma, 1e-10) == 7


def test_least_squares():
    b = np.array([1.0, -2.0, 3.0])
    np.testing.assert_allclose(least_squares(np.eye(3), b), b)
    A = np.random.default_rng(1).standard_normal((8, 3))
    x = np.array([0.5, -1.0, 2.0])
    sol = least_squares(A, A @ x)
    assert np.linalg.norm(A @ sol - A @ x) < 1e-12
    rhs = np.random.default_rng(2).standard_normal(8)
    y = least_squares(A, rhs)
    assert np.linalg.norm(A.T @ (A @ y - rhs)) <= 1e-10 * np.linalg.norm(A) * np.linalg.norm(rhs)
    with pytest.raises(ValueError):
        least_squares(A, np.ones(3))


def test_vandermonde_recovers_example1_coefficients():
    grid = SamplingGrid(100, 20)
    V = np.cos(np.outer(grid.nodes, EXAMPLE1.phi))
    gamma = least_squares(V, sample(EXAMPLE1, grid).values)
    np.testing.assert_allclose(gamma, np.arange(1, 8), atol=1e-10)


def test_eig_dense():
    np.testing.assert_allclose(np.sort(eig_dense(np.diag([1.0, 2.0, 3.0])).real), [1, 2, 3])
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    ev = eig_dense(rot)
    np.testing.assert_allclose(np.sort(ev.imag), [-1, 1])
    with pytest.raises(ValueError):
        eig_dense(np.ones((2, 3)))


def test_eig_pencil():
    np.testing.assert_allclose(np.sort(eig_pencil(np.diag([2.0, 3.0]), np.eye(2)).real), [2, 3])
    ev = eig_pencil(np.diag([5.0, 1.0]), np.diag([1.0, 0.0]))
    np.testing.assert_allclose(ev, [5.0])
    with pytest.raises(ValueError):
        eig_pencil(np.eye(2), np.eye(3))


def test_eig_pencil_identity_agrees_with_eig_dense():
    A = np.random.default_rng(3).standard_normal((6, 6))
    key = lambda v: np.lexsort((v.imag.round(8), v.real.round(8)))
    a = eig_pencil(A, np.eye(6))
    b = eig_dense(A)
    np.testing.assert_allclose(a[key(a)], b[key(b)], atol=1e-10)


def test_numerical_rank():
    assert numerical_rank([1, 1e-3, 1e-12], 1e-10) == 2
    assert numerical_rank([1, 1, 1], 1e-10) == 3
    assert numerical_rank([0.0, 0.0], 1e-10) == 0


def test_pencil_eigenvalues_rectangular():
    # z A - B with A = [I; 0] and B = [D; 0]
    A = np.vstack([np.eye(2), np.zeros((1, 2))])
    B = np.vstack([np.diag([0.3, -0.7]), np.zeros((1, 2))])
    np.testing.assert_allclose(np.sort(pencil_eigenvalues(A, B).real), [-0.7, 0.3])
