"""Small dense real linear algebra: projections, symmetric eigendecomposition,
inversion.

Everything here operates on plain numpy arrays at desk scale (dimension is
capped at 64 when data enters through the CLI).  Matrices are dense and
row-major; all functions are pure.
"""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch, NotSymmetric, Singular, ZeroVector

DIM_CAP = 64


def as_vec(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise DimMismatch(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DimMismatch("vector entries must be finite")
    return v


def as_mat(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise DimMismatch(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimMismatch("matrix entries must be finite")
    return m


def project_par(v, x) -> np.ndarray:
    """Project x onto span(v): (v.x / ||v||^2) v."""
    v, x = as_vec(v), as_vec(x)
    if v.shape != x.shape:
        raise DimMismatch(f"dim(v)={v.size} != dim(x)={x.size}")
    nv2 = float(v @ v)
    if nv2 == 0.0:
        raise ZeroVector("projection direction is zero")
    return (float(v @ x) / nv2) * v


def project_perp(v, x) -> np.ndarray:
    """Project x onto the orthogonal complement of span(v)."""
    v, x = as_vec(v), as_vec(x)
    return x - project_par(v, x)


def eig_sym(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns (values, vectors) with values ascending and vectors orthonormal
    columns, so the last index carries the maximal eigenvalue.
    """
    M = as_mat(M)
    if M.shape[0] != M.shape[1]:
        raise DimMismatch("eig_sym needs a square matrix")
    scale = max(1.0, float(np.linalg.norm(M)))
    if np.max(np.abs(M - M.T)) > 1e-10 * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-10 relative")
    # numpy's eigh (LAPACK) already returns ascending eigenvalues.
    values, vectors = np.linalg.eigh(0.5 * (M + M.T))
    return values, vectors


def inverse(B) -> np.ndarray:
    """Inverse of a square matrix; raises Singular on near-singular pivots."""
    B = as_mat(B)
    n = B.shape[0]
    if B.shape[1] != n:
        raise DimMismatch("inverse needs a square matrix")
    scale = max(1.0, float(np.linalg.norm(B)))
    # Partial-pivot LU just to detect the tiny-pivot condition the contract
    # promises; the actual inverse comes from LAPACK.
    A = B.copy()
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[p, k]) < 1e-12 * scale:
            raise Singular(f"pivot {abs(A[p, k]):.3e} below threshold")
        if p != k:
            A[[k, p]] = A[[p, k]]
        A[k + 1:, k] /= A[k, k]
        A[k + 1:, k + 1:] -= np.outer(A[k + 1:, k], A[k, k + 1:])
    return np.linalg.inv(B)
