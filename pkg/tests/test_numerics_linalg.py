"""SPD solve and symmetric eigendecomposition contracts."""

import numpy as np
import pytest

from fmrialign.errors import AsymmetricMatrixError, NotPositiveDefiniteError
from fmrialign.numerics import RngStream, cholesky_solve, sym_eig


def random_spd(n, seed, cond_boost=0.5):
    rng = RngStream(seed).generator()
    m = rng.normal(size=(n, n))
    return m @ m.T + cond_boost * np.eye(n)


class TestCholeskySolve:
    def test_identity(self):
        b = RngStream(5).generator().normal(size=(4, 3))
        np.testing.assert_allclose(cholesky_solve(np.eye(4), b), b, atol=1e-14)

    def test_diagonal(self):
        a = np.diag([2.0, 4.0])
        b = np.array([2.0, 8.0])
        np.testing.assert_allclose(cholesky_solve(a, b), [1.0, 2.0], atol=1e-14)

    def test_random_spd_matches_dense_inverse_oracle(self):
        a = random_spd(8, seed=11)
        b = RngStream(12).generator().normal(size=(8, 5))
        x = cholesky_solve(a, b)
        # Oracle: explicit inverse on a small matrix.
        x_oracle = np.linalg.inv(a) @ b
        np.testing.assert_allclose(x, x_oracle, atol=1e-8)

    def test_residual_bound(self):
        a = random_spd(16, seed=21)
        b = RngStream(22).generator().normal(size=(16, 4))
        x = cholesky_solve(a, b)
        resid = np.abs(a @ x - b).max() / np.abs(b).max()
        assert resid <= 1e-8

    def test_not_positive_definite_carries_pivot(self):
        a = np.diag([1.0, 1.0, -1.0, 1.0])
        with pytest.raises(NotPositiveDefiniteError) as exc_info:
            cholesky_solve(a, np.ones(4))
        assert exc_info.value.pivot == 2

    def test_asymmetric_rejected(self):
        a = np.array([[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(AsymmetricMatrixError):
            cholesky_solve(a, np.ones(2))


class TestSymEig:
    def test_diagonal_ascending(self):
        w, _ = sym_eig(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(w, [1.0, 3.0], atol=1e-14)

    def test_symmetric_swap(self):
        w, _ = sym_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-14)

    def test_reconstruction_and_orthonormality(self):
        rng = RngStream(31).generator()
        m = rng.normal(size=(6, 6))
        a = 0.5 * (m + m.T)
        w, v = sym_eig(a)
        scale = np.abs(a).max()
        assert np.abs(a @ v - v @ np.diag(w)).max() <= 1e-8 * scale
        np.testing.assert_allclose(v.T @ v, np.eye(6), atol=1e-8)
        # reconstruction identity
        np.testing.assert_allclose(v @ np.diag(w) @ v.T, a, atol=1e-8 * max(scale, 1.0))

    def test_eigenvalue_sum_equals_trace(self):
        a = random_spd(9, seed=41)
        w, _ = sym_eig(a)
        assert abs(w.sum() - np.trace(a)) <= 1e-8 * abs(np.trace(a))

    def test_asymmetry_beyond_tolerance_rejected(self):
        a = np.eye(3)
        a[0, 1] = 1e-6
        with pytest.raises(AsymmetricMatrixError):
            sym_eig(a)
