"""Reference sparse-recovery baselines: SBL, IRLS, and basis pursuit.

All three return the same :class:`~npsparse.solvers.RecoveryResult` as the
product-model drivers and obey the same stop rule (first iteration whose
relative change drops to epsilon, else the iteration cap), so traces are
directly comparable across methods.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError, NumericalError
from .solvers import (
    CONVERGED,
    MAX_ITERATIONS,
    NUMERICAL_FAILURE,
    RecoveryResult,
    TraceRow,
    relative_change,
)

METHODS = ("sbl", "irls", "bp")

# Guards a division by a sum of squares that can underflow to zero.
_DENOM_FLOOR = 1e-300


@dataclass(frozen=True)
class BaselineConfig:
    """Per-method settings.

    epsilon and t_max define the shared stop rule.  The remaining knobs are
    method-specific: sbl_* set the fixed observation-noise variance and the
    precision above which a coefficient is treated as pruned to zero;
    irls_* set the reweighting exponent p and the starting value of the
    smoothing term that the continuation schedule divides by 10; bp_* set
    the ADMM penalty and the residual tolerances used to pick the reported
    iterate when the cap is hit before convergence.
    """

    method: str
    epsilon: float = 1e-6
    t_max: int = 1000
    sbl_noise_var: float = 1e-10
    sbl_prune_threshold: float = 1e12
    irls_p: float = 1.0
    irls_eps_start: float = 1.0
    bp_rho: float = 10.0
    bp_primal_tol: float = 1e-6
    bp_dual_tol: float = 1e-6

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "t_max", int(self.t_max))
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {self.t_max}")
        if not self.sbl_noise_var > 0:
            raise ValueError("sbl_noise_var must be > 0")
        if not self.sbl_prune_threshold > 0:
            raise ValueError("sbl_prune_threshold must be > 0")
        if not 0 < self.irls_p <= 2:
            raise ValueError(f"irls_p must be in (0, 2], got {self.irls_p}")
        if not self.irls_eps_start > 0:
            raise ValueError("irls_eps_start must be > 0")
        if not self.bp_rho > 0:
            raise ValueError("bp_rho must be > 0")
        if not (self.bp_primal_tol > 0 and self.bp_dual_tol > 0):
            raise ValueError("bp tolerances must be > 0")


def default_config(method):
    """Tuned defaults: iteration budgets sized so each method reaches its
    own fixed point on recoverable instances at these problem scales."""
    if method == "sbl":
        return BaselineConfig(method="sbl", epsilon=1e-6, t_max=1000)
    if method == "irls":
        return BaselineConfig(method="irls", epsilon=1e-6, t_max=500)
    if method == "bp":
        return BaselineConfig(method="bp", epsilon=1e-6, t_max=2000)
    raise ValueError(f"method must be one of {METHODS}, got {method!r}")


def _check_inputs(a, y, x_true):
    a = linalg.as_matrix(a, "A")
    y = linalg.as_vector(y, "y")
    m, n = a.shape
    if y.shape[0] != m:
        raise DimensionError(f"A is {m}x{n} but y has length {y.shape[0]}")
    if x_true is not None:
        x_true = linalg.as_vector(x_true, "x_true")
        if x_true.shape[0] != n:
            raise DimensionError(f"x_true must have length {n}")
        if np.linalg.norm(x_true) == 0.0:
            raise ValueError("x_true must be nonzero")
    return a, y, x_true


def _rel_error(x, x_true):
    if x_true is None:
        return None
    return float(np.linalg.norm(x - x_true) / np.linalg.norm(x_true))


def sbl_recover(a, y, config=None, x_true=None):
    """Sparse Bayesian learning with fixed noise variance.

    EM on per-coefficient precisions alpha: the posterior moments are
    computed through the M x M form K = noise_var I + A diag(1/alpha) A',
    mu = diag(1/alpha) A' K^-1 y, then alpha_i <- 1/(mu_i^2 + Sigma_ii).
    The reported iterate zeroes coefficients whose precision exceeds the
    pruning threshold.
    """
    if config is None:
        config = default_config("sbl")
    if config.method != "sbl":
        raise ValueError(f"config.method must be 'sbl', got {config.method!r}")
    a, y, x_true = _check_inputs(a, y, x_true)
    m, n = a.shape
    eye_m = np.eye(m)
    alpha = np.ones(n)
    x_prev = np.zeros(n)
    trace = []
    termination = MAX_ITERATIONS
    iterations = 0
    start = time.monotonic()
    for t in range(1, config.t_max + 1):
        d = 1.0 / alpha
        k = config.sbl_noise_var * eye_m + (a * d) @ a.T
        try:
            k_inv = linalg.spd_inverse(k)
        except NumericalError:
            termination = NUMERICAL_FAILURE
            break
        mu = d * (a.T @ (k_inv @ y))
        sigma_diag = d - d * d * np.einsum("ij,ij->j", a, k_inv @ a)
        sigma_diag = np.maximum(sigma_diag, 0.0)
        alpha = 1.0 / np.maximum(mu * mu + sigma_diag, _DENOM_FLOOR)
        x = np.where(alpha > config.sbl_prune_threshold, 0.0, mu)
        change = relative_change(x, x_prev)
        iterations = t
        trace.append(TraceRow(t, change, _rel_error(x, x_true),
                              time.monotonic() - start))
        x_prev = x
        if change <= config.epsilon:
            termination = CONVERGED
            break
    return RecoveryResult(x_hat=x_prev, iterations=iterations,
                          termination=termination, trace=tuple(trace))


def irls_recover(a, y, config=None, x_true=None):
    """Iteratively reweighted least squares with smoothing continuation.

    x <- W A'(A W A')^-1 y with W = diag((x_i^2 + eps)^(1 - p/2)); the
    smoothing term eps is divided by 10 whenever the relative change falls
    below sqrt(eps), so the weights sharpen as the iterate settles.  The
    zero start makes the first iterate the minimum-norm solution.
    """
    if config is None:
        config = default_config("irls")
    if config.method != "irls":
        raise ValueError(f"config.method must be 'irls', got {config.method!r}")
    a, y, x_true = _check_inputs(a, y, x_true)
    m, n = a.shape
    if m > n:
        raise DimensionError(
            f"A must have at least as many columns as rows, got {m}x{n}"
        )
    exponent = 1.0 - config.irls_p / 2.0
    eps_irls = config.irls_eps_start
    x_prev = np.zeros(n)
    trace = []
    termination = MAX_ITERATIONS
    iterations = 0
    start = time.monotonic()
    for t in range(1, config.t_max + 1):
        w = (x_prev * x_prev + eps_irls) ** exponent
        awat = (a * w) @ a.T
        try:
            try:
                z = linalg.solve_spd(awat, y)
            except NumericalError:
                z = linalg.pinv(awat) @ y
        except NumericalError:
            termination = NUMERICAL_FAILURE
            break
        x = w * (a.T @ z)
        change = relative_change(x, x_prev)
        iterations = t
        trace.append(TraceRow(t, change, _rel_error(x, x_true),
                              time.monotonic() - start))
        x_prev = x
        if change <= config.epsilon:
            termination = CONVERGED
            break
        if change < math.sqrt(eps_irls):
            eps_irls /= 10.0
    return RecoveryResult(x_hat=x_prev, iterations=iterations,
                          termination=termination, trace=tuple(trace))


def _soft_threshold(v, thr):
    return np.sign(v) * np.maximum(np.abs(v) - thr, 0.0)


def bp_recover(a, y, config=None, x_true=None):
    """Equality-constrained l1 minimization by ADMM.

    Alternates projection onto the affine constraint set {x: Ax = y} (so
    every x-iterate is exactly feasible) with soft-thresholding.  The
    threshold is max|q| / rho where q is the min-norm solution, so the
    penalty tracks the scale of the data.  On convergence the last iterate
    is returned; if the cap is hit first, the reported iterate is the
    lowest-l1 one among those meeting the primal/dual residual tolerances,
    else the lowest-l1 overall.
    """
    if config is None:
        config = default_config("bp")
    if config.method != "bp":
        raise ValueError(f"config.method must be 'bp', got {config.method!r}")
    a, y, x_true = _check_inputs(a, y, x_true)
    m, n = a.shape
    a_pinv = linalg.pinv(a)
    q = a_pinv @ y
    y_norm = float(np.linalg.norm(y))
    if float(np.linalg.norm(a @ q - y)) > 1e-8 * max(y_norm, 1e-300):
        raise NumericalError("y is not in the range of A", m, n)
    proj = np.eye(n) - a_pinv @ a
    rho = config.bp_rho
    # Soft-threshold level scaled to the data: the min-norm solution q sets
    # the magnitude of the iterates, and a fixed absolute threshold larger
    # than every |q_i| would zero z forever and freeze x at q.
    q_max = float(np.max(np.abs(q))) if q.size else 0.0
    thr = q_max / rho if q_max > 0 else 1.0 / rho
    x_prev = np.zeros(n)
    z = np.zeros(n)
    u = np.zeros(n)
    best_l1 = np.inf
    best_x = q
    best_ok_l1 = np.inf
    best_ok_x = None
    trace = []
    termination = MAX_ITERATIONS
    iterations = 0
    start = time.monotonic()
    for t in range(1, config.t_max + 1):
        x = q + proj @ (z - u)
        z_new = _soft_threshold(x + u, thr)
        dual_resid = rho * float(np.linalg.norm(z_new - z))
        z = z_new
        u = u + x - z
        change = relative_change(x, x_prev)
        iterations = t
        trace.append(TraceRow(t, change, _rel_error(x, x_true),
                              time.monotonic() - start))
        x_prev = x
        l1 = float(np.sum(np.abs(x)))
        if l1 < best_l1:
            best_l1 = l1
            best_x = x
        scale = max(float(np.linalg.norm(x)), float(np.linalg.norm(z)), 1.0)
        primal_ok = float(np.linalg.norm(x - z)) <= config.bp_primal_tol * scale
        dual_ok = dual_resid <= config.bp_dual_tol * max(
            rho * float(np.linalg.norm(u)), 1.0
        )
        if primal_ok and dual_ok and l1 < best_ok_l1:
            best_ok_l1 = l1
            best_ok_x = x
        if change <= config.epsilon:
            termination = CONVERGED
            break
    if termination == CONVERGED:
        x_hat = x_prev
    elif best_ok_x is not None:
        x_hat = best_ok_x
    else:
        x_hat = best_x
    return RecoveryResult(x_hat=x_hat, iterations=iterations,
                          termination=termination, trace=tuple(trace))
