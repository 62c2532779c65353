"""Symmetric-matrix tools: Jacobi eigensolver, DD/PSD tests, Gram factorizations.

Matrices are plain ``numpy`` arrays. A *realization* is an ``(n, K)`` array
whose row ``i`` is the position of vertex ``i``; a *Gram matrix* is the
``(n, n)`` array of inner products of those rows.
"""

from typing import NamedTuple

import numpy as np

from .rng import generator

#: Relative off-diagonal mass at which the Jacobi sweeps stop.
SPECTRAL_TOL = 1e-10

#: Default relative tolerance below zero accepted for PSD input to extraction.
PSD_TOL = 1e-9

_MAX_SWEEPS = 100


class SpectralDecomposition(NamedTuple):
    """Eigenvalues (descending) and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        p = self.eigenvectors
        return (p * self.eigenvalues) @ p.T


def as_symmetric(X, name="X"):
    """Validate and return ``X`` as a float symmetric matrix (a fresh copy)."""
    A = np.array(X, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > 1e-12 * scale:
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


def as_realization(x):
    """Validate and return ``x`` as a float ``(n, K)`` coordinate array."""
    a = np.array(x, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[1] < 1:
        raise ValueError(f"realization must be an (n, K) array with K >= 1, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("realization has non-finite coordinates")
    return a


def _off_norm(A):
    return np.linalg.norm(A - np.diag(np.diag(A)))


def spectral_decompose(X):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps over all ``(p, q)`` pairs in row order until the Frobenius norm of
    the off-diagonal part drops below ``SPECTRAL_TOL * ||X||_F``.

    Parameters
    ----------
    X : (n, n) array_like
        Symmetric, finite matrix.

    Returns
    -------
    SpectralDecomposition
        Eigenvalues sorted in descending order, eigenvectors as columns. Each
        column is signed so that its largest-magnitude entry is positive.
    """
    A = as_symmetric(X)
    n = A.shape[0]
    V = np.eye(n)
    target = SPECTRAL_TOL * np.linalg.norm(A)

    for _ in range(_MAX_SWEEPS):
        if _off_norm(A) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = A[:, p].copy()
                colq = A[:, q]
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :]
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        if _off_norm(A) > target:
            raise np.linalg.LinAlgError("Jacobi sweeps did not converge")

    lam = np.diag(A).copy()
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    V = V[:, order]
    lead = np.argmax(np.abs(V), axis=0)
    signs = np.where(V[lead, np.arange(n)] < 0, -1.0, 1.0)
    return SpectralDecomposition(lam, V * signs)


def is_dd(X):
    """True iff every row satisfies ``X_ii >= sum_{j != i} |X_ij|`` exactly."""
    A = np.asarray(X, dtype=float)
    d = np.diag(A)
    off = np.sum(np.abs(A), axis=1) - np.abs(d)
    return bool(np.all(d >= off))


def gershgorin_intervals(X):
    """Row-wise Gershgorin intervals as an ``(n, 2)`` array of ``[lo, hi]``."""
    A = np.asarray(X, dtype=float)
    d = np.diag(A)
    r = np.sum(np.abs(A), axis=1) - np.abs(d)
    return np.column_stack([d - r, d + r])


def is_psd(X, tol=1e-9):
    """True iff the smallest eigenvalue is at least ``-tol * max(1, ||X||_F)``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    A = as_symmetric(X)
    lam = spectral_decompose(A).eigenvalues
    return bool(lam[-1] >= -tol * max(1.0, np.linalg.norm(A)))


def _clamped_spectrum(X, tol):
    A = as_symmetric(X)
    dec = spectral_decompose(A)
    floor = -tol * np.linalg.norm(A)
    if dec.eigenvalues[-1] < floor:
        raise ValueError(
            f"not PSD: eigenvalue {dec.eigenvalues[-1]:.3e} below {floor:.3e}"
        )
    return np.maximum(dec.eigenvalues, 0.0), dec.eigenvectors


def pca_realization(X, K, tol=PSD_TOL):
    """Best rank-``K`` factor ``P sqrt(Lambda_K)`` of a PSD matrix.

    Eigenvalues in ``[-tol ||X||_F, 0)`` are clamped to zero; anything more
    negative raises ``ValueError``. If ``K`` exceeds ``n`` the extra columns
    are zero.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    lam, P = _clamped_spectrum(X, tol)
    n = P.shape[0]
    k = min(K, n)
    out = np.zeros((n, K))
    out[:, :k] = P[:, :k] * np.sqrt(lam[:k])
    return out


def barvinok_realization(X, K, seed, tol=PSD_TOL):
    """Random projection ``F Z`` of the full factor ``F = P sqrt(Lambda)``.

    ``Z`` is ``(n, K)`` with i.i.d. entries of mean 0 and standard deviation
    ``1/sqrt(K)``, drawn from the stream ``seed``. Since ``E[Z Z^T] = I``, the
    expected value of ``x x^T`` is ``X`` itself.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    lam, P = _clamped_spectrum(X, tol)
    F = P * np.sqrt(lam)
    Z = generator(seed).normal(0.0, 1.0 / np.sqrt(K), size=(F.shape[1], K))
    return F @ Z


def gram_from_realization(x):
    """Gram matrix ``X_ij = <x_i, x_j>``."""
    a = as_realization(x)
    return a @ a.T


def squared_distances_from_gram(X):
    """``D_ij = X_ii + X_jj - 2 X_ij``."""
    A = np.asarray(X, dtype=float)
    d = np.diag(A)
    return d[:, None] + d[None, :] - 2.0 * A
