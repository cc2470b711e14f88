"""Dense linear-algebra kernels used by every solver.

All functions are pure: they validate their inputs, never mutate them, and
use fixed (left-to-right) reduction order so repeated runs are bit-identical.
Matrices are 2-D float64 ndarrays, vectors 1-D float64 ndarrays.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, NumericalError

_EPS = np.finfo(np.float64).eps


def as_matrix(m, name="matrix"):
    """Validate and return ``m`` as a finite 2-D float64 array."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def as_vector(v, name="vector"):
    """Validate and return ``v`` as a finite 1-D float64 array."""
    a = np.asarray(v, dtype=np.float64)
    if a.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``m = u @ diag(singular_values) @ vt``.

    ``singular_values`` is non-increasing and non-negative; ``u`` has
    orthonormal columns and ``vt`` orthonormal rows.
    """

    u: np.ndarray
    singular_values: np.ndarray
    vt: np.ndarray


def svd_factors(m):
    """Thin SVD of ``m``, raising :class:`NumericalError` on non-convergence."""
    m = as_matrix(m)
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}", *m.shape) from exc
    return SvdFactors(u=u, singular_values=s, vt=vt)


def pinv(m, rank_tol=None):
    """Moore-Penrose pseudoinverse via SVD.

    Singular values <= rank_tol * sigma_max are treated as zero.  The default
    tolerance is max(rows, cols) * machine_eps, the standard truncation for
    numerical rank decisions.
    """
    m = as_matrix(m)
    if rank_tol is None:
        rank_tol = max(m.shape) * _EPS
    elif rank_tol < 0:
        raise ValueError(f"rank_tol must be >= 0, got {rank_tol}")
    f = svd_factors(m)
    s = f.singular_values
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((m.shape[1], m.shape[0]))
    keep = s > rank_tol * s[0]
    inv_s = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    return (f.vt.T * inv_s) @ f.u.T


def hadamard(u, v):
    """Elementwise (Hadamard) product of two equal-length vectors."""
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    if u.shape != v.shape:
        raise DimensionError(f"length mismatch: {u.shape[0]} vs {v.shape[0]}")
    return u * v


def scale_cols(m, d):
    """Column scaling ``m @ diag(d)`` without forming the diagonal matrix."""
    m = as_matrix(m)
    d = as_vector(d, "d")
    if m.shape[1] != d.shape[0]:
        raise DimensionError(
            f"matrix has {m.shape[1]} columns but diagonal has {d.shape[0]} entries"
        )
    return m * d[np.newaxis, :]


def spd_inverse(g):
    """Full inverse of a symmetric positive definite matrix via Cholesky.

    The result is symmetrized to remove rounding asymmetry.  Raises
    :class:`NumericalError` when factorization fails so the caller can fall
    back to a pseudoinverse.
    """
    g = as_matrix(g, "g")
    if g.shape[0] != g.shape[1]:
        raise DimensionError(f"g must be square, got {g.shape[0]}x{g.shape[1]}")
    try:
        factor = scipy.linalg.cho_factor(g, lower=True, check_finite=False)
        inv = scipy.linalg.cho_solve(factor, np.eye(g.shape[0]), check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"Cholesky factorization failed: {exc}", *g.shape) from exc
    return 0.5 * (inv + inv.T)


def solve_spd(g, c):
    """Solve ``g @ z = c`` for symmetric positive definite ``g`` via Cholesky.

    One step of iterative refinement is applied when the residual exceeds
    1e-8 * ||c||; failure to factorize or to meet the residual bound raises
    :class:`NumericalError` so the caller can fall back to a pseudoinverse.
    """
    g = as_matrix(g, "g")
    c = as_vector(c, "c")
    if g.shape[0] != g.shape[1]:
        raise DimensionError(f"g must be square, got {g.shape[0]}x{g.shape[1]}")
    if g.shape[0] != c.shape[0]:
        raise DimensionError(
            f"g is {g.shape[0]}x{g.shape[1]} but c has length {c.shape[0]}"
        )
    try:
        factor = scipy.linalg.cho_factor(g, lower=True, check_finite=False)
        z = scipy.linalg.cho_solve(factor, c, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"Cholesky factorization failed: {exc}", *g.shape) from exc
    bound = 1e-8 * np.linalg.norm(c)
    residual = np.linalg.norm(g @ z - c)
    if residual > bound:
        z = z + scipy.linalg.cho_solve(factor, c - g @ z, check_finite=False)
        residual = np.linalg.norm(g @ z - c)
        if residual > bound:
            raise NumericalError(
                f"solve residual {residual:.3e} exceeds bound {bound:.3e}", *g.shape
            )
    return z
