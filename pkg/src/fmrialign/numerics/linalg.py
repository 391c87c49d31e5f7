"""Symmetric linear-algebra kernels: SPD solve and eigendecomposition.

Backed by LAPACK through scipy/numpy; the wrappers add the symmetry checks and
structured errors the rest of the package relies on.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lapack

from ..errors import AsymmetricMatrixError, NotPositiveDefiniteError


def _check_symmetry(a: np.ndarray, tol: float, who: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{who} needs a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()) if a.size else 1.0)
    asym = float(np.abs(a - a.T).max()) if a.size else 0.0
    if asym > tol * scale:
        raise AsymmetricMatrixError(
            f"{who}: matrix asymmetry {asym:.3e} exceeds tolerance {tol * scale:.3e}"
        )
    return 0.5 * (a + a.T)


def cholesky_solve(a: np.ndarray, b: np.ndarray, *, hint: str = "") -> np.ndarray:
    """Solve A X = B for symmetric positive definite A.

    Raises :class:`NotPositiveDefiniteError` carrying the zero-based index of
    the failing pivot when the factorization breaks down.
    """
    a = _check_symmetry(a, 1e-8, "cholesky_solve")
    b = np.asarray(b, dtype=np.float64)
    b2d = b.reshape(b.shape[0], -1) if b.ndim == 1 else b
    if b2d.shape[0] != a.shape[0]:
        raise ValueError(f"cholesky_solve: A is {a.shape} but B has {b2d.shape[0]} rows")

    c, info = lapack.dpotrf(a, lower=1, overwrite_a=0)
    if info > 0:
        raise NotPositiveDefiniteError(pivot=info - 1, hint=hint)
    if info < 0:
        raise ValueError(f"dpotrf: illegal argument {-info}")
    x, info = lapack.dpotrs(c, b2d, lower=1)
    if info != 0:
        raise ValueError(f"dpotrs failed with info={info}")
    return x.reshape(b.shape)


def sym_eig(a: np.ndarray, *, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues ascending, orthonormal eigenvectors as columns).
    """
    a = _check_symmetry(a, tol, "sym_eig")
    w, v = np.linalg.eigh(a)
    return w, v
