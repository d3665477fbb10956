"""Dense symmetric linear algebra helpers.

Symmetric matrices are read from their lower triangle; the upper triangle
is ignored on input and mirrored on output.
"""
import numpy as np
from scipy import linalg

from .errors import DimensionMismatch, NotPositiveDefinite

__all__ = [
    "symmetrize",
    "cholesky",
    "logdet",
    "cho_inverse",
    "mahalanobis_sq",
    "vecs",
    "unvecs",
    "vech",
    "unvech",
    "sqrtm_sym",
]

_EPS = np.finfo(float).eps


def symmetrize(m):
    """Return a copy of `m` whose upper triangle mirrors the lower one."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    low = np.tril(m)
    return low + np.tril(m, -1).T


def cholesky(m):
    """Lower-triangular Cholesky factor ``L`` with ``m = L @ L.T``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is not larger than ``N * eps * max|diag(m)|``.
    """
    m = symmetrize(m)
    n = m.shape[0]
    if n == 0:
        raise DimensionMismatch("empty matrix")
    if not np.all(np.isfinite(m)):
        raise NotPositiveDefinite("matrix has non-finite entries")
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    threshold = n * _EPS * np.max(np.abs(np.diag(m)))
    pivots = np.diag(chol) ** 2
    if not np.all(pivots > threshold):
        raise NotPositiveDefinite(
            f"pivot {pivots.min():.3e} below threshold {threshold:.3e}")
    return chol


def logdet(m=None, chol=None):
    """Log-determinant of a positive-definite matrix (via its Cholesky factor)."""
    if chol is None:
        chol = cholesky(m)
    return 2.0 * np.sum(np.log(np.diag(chol)))


def cho_inverse(m):
    chol = cholesky(m)
    inv = linalg.cho_solve((chol, True), np.eye(chol.shape[0]))
    return symmetrize(inv)


def mahalanobis_sq(x, mu, sigma=None, *, chol=None):
    """Squared Mahalanobis distance ``(x - mu)^t sigma^{-1} (x - mu)``.

    Parameters
    ----------
    x : array_like, shape (N,) or (T, N)
        One point or a stack of points (rows).
    mu : array_like, shape (N,)
    sigma : array_like, shape (N, N)
        Positive-definite scatter matrix. Ignored when `chol` is given.
    chol : ndarray, optional
        Precomputed lower Cholesky factor of `sigma`.

    Returns
    -------
    float or ndarray of shape (T,)
    """
    x = np.asarray(x, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if chol is None:
        chol = cholesky(sigma)
    n = chol.shape[0]
    if mu.shape != (n,) or x.shape[-1] != n or x.ndim > 2:
        raise DimensionMismatch(
            f"x {x.shape}, mu {mu.shape} incompatible with sigma ({n}, {n})")
    centered = x - mu
    z = linalg.solve_triangular(chol, np.atleast_2d(centered).T, lower=True)
    d = np.einsum("ij,ij->j", z, z)
    if x.ndim == 1:
        return float(d[0])
    return d


def vecs(sigma):
    """Scaled half-vectorization.

    Diagonal entries divided by sqrt(2) come first, followed by the strictly
    lower entries stacked column by column:
    ``(s11/√2, ..., sNN/√2, s21, s31, ..., sN1, s32, ..., sN,N-1)``.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0]
    cols, rows = np.triu_indices(n, 1)
    return np.concatenate([np.diag(sigma) / np.sqrt(2.0), sigma[rows, cols]])


def unvecs(v, n=None):
    """Inverse of :func:`vecs`; returns the symmetric matrix."""
    v = np.asarray(v, dtype=float)
    if n is None:
        n = int(round((np.sqrt(8 * v.size + 1) - 1) / 2))
    if v.size != n * (n + 1) // 2:
        raise DimensionMismatch(f"length {v.size} is not a vecs length for N={n}")
    out = np.diag(v[:n] * np.sqrt(2.0))
    cols, rows = np.triu_indices(n, 1)
    out[rows, cols] = v[n:]
    out[cols, rows] = v[n:]
    return out


def vech(sigma):
    """Stack the columns of the lower triangle, diagonal included."""
    sigma = np.asarray(sigma, dtype=float)
    # column-major order of the lower triangle == row-major order of the upper
    # triangle of the transpose
    cols, rows = np.triu_indices(sigma.shape[0])
    return sigma[rows, cols]


def unvech(v, n=None):
    v = np.asarray(v, dtype=float)
    if n is None:
        n = int(round((np.sqrt(8 * v.size + 1) - 1) / 2))
    if v.size != n * (n + 1) // 2:
        raise DimensionMismatch(f"length {v.size} is not a vech length for N={n}")
    out = np.zeros((n, n))
    cols, rows = np.triu_indices(n)
    out[rows, cols] = v
    out[cols, rows] = v
    return out


def sqrtm_sym(sigma):
    """Symmetric positive square root via the spectral decomposition."""
    evals, evecs = np.linalg.eigh(symmetrize(sigma))
    if evals.min() < 0:
        raise NotPositiveDefinite("negative eigenvalue in square root")
    root = (evecs * np.sqrt(evals)) @ evecs.T
    return symmetrize(root)
