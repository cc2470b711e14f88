"""Alternating mean-field updates for the product model x = a * b.

Writing the unknown vector as a Hadamard product of two Gaussian factors
turns sparse recovery into a sequence of weighted least-norm problems.  Two
drivers share the update kernels below: ``run_np0`` keeps the factor scales
fixed at one, while ``run_np1`` also learns per-component precisions through
conjugate Gamma updates, which is what prunes the support.  Both stop at the
first iteration whose relative change falls to the configured threshold.

Update kernels come in two flavors per factor: a finite-noise form that
solves an SPD system built from the data misfit plus the prior precision,
and its noiseless limit, where the solve collapses to a scaled minimum-norm
solution and the posterior covariance to a scaled null-space projector.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError, NumericalError

CONVERGED = "converged"
MAX_ITERATIONS = "max_iterations"
NUMERICAL_FAILURE = "numerical_failure"

# Below this norm an iterate is treated as numerically zero in the
# relative-change denominator.
_TINY_NORM = 1e-30

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by both drivers.

    alpha, beta are the Gamma hyperprior shape and rate (zero gives the
    scale-free limit), epsilon and t_max define the stop rule, noise_var
    selects the finite-noise path when positive and the noiseless limit when
    zero, and precision_floor guards the hyperparameter divisions.
    """

    alpha: float = 0.0
    beta: float = 0.0
    epsilon: float = 1e-3
    t_max: int = 300
    noise_var: float = 0.0
    precision_floor: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "t_max", int(self.t_max))
        object.__setattr__(self, "noise_var", float(self.noise_var))
        object.__setattr__(self, "precision_floor", float(self.precision_floor))
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {self.t_max}")
        if self.noise_var < 0:
            raise ValueError(f"noise_var must be >= 0, got {self.noise_var}")
        if not self.precision_floor > 0:
            raise ValueError(
                f"precision_floor must be > 0, got {self.precision_floor}"
            )


@dataclass(frozen=True)
class PosteriorState:
    """Factor posterior moments and precision means, all length N."""

    a_mean: np.ndarray
    a_var: np.ndarray
    b_mean: np.ndarray
    b_var: np.ndarray
    kappa_inv2_mean: np.ndarray
    gamma_inv2_mean: np.ndarray

    def __post_init__(self):
        n = self.a_mean.shape[0]
        for name in ("a_mean", "a_var", "b_mean", "b_var",
                     "kappa_inv2_mean", "gamma_inv2_mean"):
            v = getattr(self, name)
            if v.ndim != 1 or v.shape[0] != n:
                raise DimensionError(f"{name} must be a length-{n} vector")
        if np.any(self.a_var < 0) or np.any(self.b_var < 0):
            raise ValueError("variances must be >= 0")
        if np.any(self.kappa_inv2_mean <= 0) or np.any(self.gamma_inv2_mean <= 0):
            raise ValueError("precision means must be > 0")


@dataclass(frozen=True)
class TraceRow:
    """One iteration: index, relative change, relative error (when ground
    truth is known, else None), and cumulative elapsed seconds."""

    iteration: int
    rel_change: float
    rel_error: float | None
    seconds: float


@dataclass(frozen=True)
class RecoveryResult:
    """Solver output: estimate, iteration count, why it stopped, and the
    per-iteration trace (one row per completed iteration)."""

    x_hat: np.ndarray
    iterations: int
    termination: str
    trace: tuple
    state: PosteriorState | None = None


def relative_change(x, x_prev):
    """Stop-rule metric ||x - x_prev|| / ||x_prev||.

    When the previous iterate is numerically zero the ratio is undefined:
    return 0.0 if the new iterate is also zero (converged at zero) and inf
    otherwise (no basis for a relative comparison yet).
    """
    denom = float(np.linalg.norm(x_prev))
    if denom < _TINY_NORM:
        return 0.0 if float(np.linalg.norm(x)) < _TINY_NORM else np.inf
    return float(np.linalg.norm(x - x_prev)) / denom


def _scaled_minnorm(m, scale, y):
    # Minimum-norm solution of m z = y and the diagonal of the scaled
    # null-space projector: mean = scale * (m+ y),
    # var = scale^2 * diag(I - m+ m).  One SVD serves both.
    f = linalg.svd_factors(m)
    s = f.singular_values
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(m.shape[1]), scale * scale * np.ones(m.shape[1])
    tol = max(m.shape) * _EPS * s[0]
    r = int(np.count_nonzero(s > tol))
    if r == 0:
        return np.zeros(m.shape[1]), scale * scale * np.ones(m.shape[1])
    vt_r = f.vt[:r, :]
    coef = (f.u[:, :r].T @ y) / s[:r]
    mean = scale * (vt_r.T @ coef)
    proj = np.einsum("ij,ij->j", vt_r, vt_r)
    var = scale * scale * np.maximum(1.0 - proj, 0.0)
    return mean, var


def _check_problem(a, y, name_third, third, name_fourth, fourth):
    a = linalg.as_matrix(a, "A")
    y = linalg.as_vector(y, "y")
    third = linalg.as_vector(third, name_third)
    fourth = linalg.as_vector(fourth, name_fourth)
    m, n = a.shape
    if y.shape[0] != m:
        raise DimensionError(f"A is {m}x{n} but y has length {y.shape[0]}")
    if third.shape[0] != n:
        raise DimensionError(f"{name_third} must have length {n}")
    if fourth.shape[0] != n:
        raise DimensionError(f"{name_fourth} must have length {n}")
    return a, y, third, fourth


def update_b_noiseless(a, y, a_mean, gamma):
    """Noiseless-limit posterior of the second factor.

    b_mean = gamma * (B+ y) and b_var = gamma^2 * diag(I - B+ B) with
    B = A diag(a_mean) diag(gamma): the minimum-norm solution of the
    column-weighted system and the matching null-space variance.
    """
    a, y, a_mean, gamma = _check_problem(a, y, "a_mean", a_mean, "gamma", gamma)
    if np.any(gamma <= 0):
        raise ValueError("gamma must be positive componentwise")
    b = linalg.scale_cols(a, a_mean * gamma)
    return _scaled_minnorm(b, gamma, y)


def update_a_noiseless(a, y, b_mean, kappa):
    """Noiseless-limit posterior of the first factor (roles of the factors
    swapped relative to :func:`update_b_noiseless`)."""
    a, y, b_mean, kappa = _check_problem(a, y, "b_mean", b_mean, "kappa", kappa)
    if np.any(kappa <= 0):
        raise ValueError("kappa must be positive componentwise")
    c = linalg.scale_cols(a, b_mean * kappa)
    return _scaled_minnorm(c, kappa, y)


def _finite_noise_posterior(a, y, mean_other, prior_inv2, noise_var):
    ad = linalg.scale_cols(a, mean_other)
    m, n = ad.shape
    if m <= n:
        # Dual form: Gamma^-1 = G - G Ad' K^-1 Ad G with G = diag(1/prior_inv2)
        # and K = noise_var I + Ad G Ad'.  Algebraically equal to inverting the
        # N x N system but conditioned independently of noise_var, so the
        # noiseless limit is reached without cancellation.
        g = 1.0 / prior_inv2
        adg = linalg.scale_cols(ad, g)
        k = noise_var * np.eye(m) + adg @ ad.T
        try:
            mean = g * (ad.T @ linalg.solve_spd(k, y))
            k_inv_ad = linalg.spd_inverse(k) @ ad
        except NumericalError:
            k_pinv = linalg.pinv(k)
            mean = g * (ad.T @ (k_pinv @ y))
            k_inv_ad = k_pinv @ ad
        var = g - g * g * np.einsum("ij,ij->j", ad, k_inv_ad)
        return mean, np.maximum(var, 0.0)
    gram = (ad.T @ ad) / noise_var + np.diag(prior_inv2)
    c = (ad.T @ y) / noise_var
    try:
        mean = linalg.solve_spd(gram, c)
        var = np.diag(linalg.spd_inverse(gram)).copy()
    except NumericalError:
        gram_pinv = linalg.pinv(gram)
        mean = gram_pinv @ c
        var = np.diag(gram_pinv).copy()
    return mean, np.maximum(var, 0.0)


def update_b_finite_noise(a, y, a_mean, a_var, gamma_inv2_mean, noise_var):
    """Finite-noise posterior of the second factor.

    Solves Gamma b = c with Gamma = (1/noise_var) diag(a_mean) A'A
    diag(a_mean) + diag(gamma_inv2_mean) and c = (1/noise_var) diag(a_mean)
    A'y, returning (Gamma^-1 c, diag(Gamma^-1)).  Under the rank-one
    relaxation of the factor second moment, a_var drops out of the update;
    the argument is kept for signature parity with the exact model.
    """
    a, y, a_mean, gamma_inv2_mean = _check_problem(
        a, y, "a_mean", a_mean, "gamma_inv2_mean", gamma_inv2_mean
    )
    if noise_var <= 0:
        raise ValueError(f"noise_var must be > 0, got {noise_var}")
    if np.any(gamma_inv2_mean <= 0):
        raise ValueError("gamma_inv2_mean must be positive componentwise")
    return _finite_noise_posterior(a, y, a_mean, gamma_inv2_mean, float(noise_var))


def update_a_finite_noise(a, y, b_mean, b_var, kappa_inv2_mean, noise_var):
    """Finite-noise posterior of the first factor (mirror of
    :func:`update_b_finite_noise`)."""
    a, y, b_mean, kappa_inv2_mean = _check_problem(
        a, y, "b_mean", b_mean, "kappa_inv2_mean", kappa_inv2_mean
    )
    if noise_var <= 0:
        raise ValueError(f"noise_var must be > 0, got {noise_var}")
    if np.any(kappa_inv2_mean <= 0):
        raise ValueError("kappa_inv2_mean must be positive componentwise")
    return _finite_noise_posterior(a, y, b_mean, kappa_inv2_mean, float(noise_var))


def update_kappa_inv2(a_mean, a_var, gamma_inv2_mean, alpha, beta,
                      precision_floor=1e-12):
    """Gamma-posterior mean of the first factor's inverse-square scale.

    (1/2 + alpha) / (1/2 (a_mean^2 + a_var + 2 beta gamma_inv2_mean)), with
    the denominator floored at precision_floor/2 to keep the result finite
    when a component has collapsed to zero.
    """
    a_mean = linalg.as_vector(a_mean, "a_mean")
    a_var = linalg.as_vector(a_var, "a_var")
    gamma_inv2_mean = linalg.as_vector(gamma_inv2_mean, "gamma_inv2_mean")
    if a_mean.shape != a_var.shape or a_mean.shape != gamma_inv2_mean.shape:
        raise DimensionError("a_mean, a_var, gamma_inv2_mean must share length")
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be >= 0")
    if not precision_floor > 0:
        raise ValueError(f"precision_floor must be > 0, got {precision_floor}")
    if np.any(a_var < 0):
        raise ValueError("a_var must be >= 0 componentwise")
    second_moment = a_mean * a_mean + a_var
    denom = 0.5 * np.maximum(
        second_moment + 2.0 * beta * gamma_inv2_mean, precision_floor
    )
    return (0.5 + alpha) / denom


def update_gamma_inv2(b_mean, b_var, kappa_inv2_mean, alpha, beta,
                      precision_floor=1e-12):
    """Gamma-posterior mean of the second factor's inverse-square scale
    (mirror of :func:`update_kappa_inv2`)."""
    return update_kappa_inv2(b_mean, b_var, kappa_inv2_mean, alpha, beta,
                             precision_floor=precision_floor)


def _check_system(a, y, x_true):
    a = linalg.as_matrix(a, "A")
    y = linalg.as_vector(y, "y")
    m, n = a.shape
    if m > n:
        raise DimensionError(
            f"A must have at least as many columns as rows, got {m}x{n}"
        )
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


def run_np0(a, y, config=None, x_true=None):
    """One-layer driver: alternate the two factor updates with unit scales.

    Starts from all-ones factors (a deliberate symmetric start; a zero or
    random start loses the clean minimum-norm interpretation of the first
    step), never touches the precisions, and stops at the first iteration
    whose relative change is at most ``config.epsilon``, or at
    ``config.t_max``.  When ``x_true`` is given each trace row also records
    the relative error against it.
    """
    if config is None:
        config = SolverConfig()
    a, y, x_true = _check_system(a, y, x_true)
    n = a.shape[1]
    ones = np.ones(n)
    zeros = np.zeros(n)
    a_mean = ones.copy()
    b_mean = ones.copy()
    x_prev = linalg.hadamard(a_mean, b_mean)
    trace = []
    termination = MAX_ITERATIONS
    iterations = 0
    start = time.monotonic()
    for t in range(1, config.t_max + 1):
        try:
            if config.noise_var == 0.0:
                a_mean, _ = update_a_noiseless(a, y, b_mean, ones)
                b_mean, _ = update_b_noiseless(a, y, a_mean, ones)
            else:
                a_mean, _ = update_a_finite_noise(
                    a, y, b_mean, zeros, ones, config.noise_var
                )
                b_mean, _ = update_b_finite_noise(
                    a, y, a_mean, zeros, ones, config.noise_var
                )
        except NumericalError:
            termination = NUMERICAL_FAILURE
            break
        x = linalg.hadamard(a_mean, b_mean)
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


def run_np1(a, y, config=None, x_true=None):
    """Two-layer driver: factor updates plus per-component precision learning.

    Each iteration updates, in order: the first factor's mean and variance,
    the second factor's mean and variance, the estimate x, then the two
    precision means.  The first precision update sees the second factor's
    precision from the previous iteration; the second sees the freshly
    updated value.  Scales feed back as the inverse square root of the
    precision means.  Same start and stop rule as :func:`run_np0`.
    """
    if config is None:
        config = SolverConfig()
    a, y, x_true = _check_system(a, y, x_true)
    n = a.shape[1]
    a_mean = np.ones(n)
    a_var = np.zeros(n)
    b_mean = np.ones(n)
    b_var = np.zeros(n)
    kappa_inv2 = np.ones(n)
    gamma_inv2 = np.ones(n)
    x_prev = linalg.hadamard(a_mean, b_mean)
    trace = []
    termination = MAX_ITERATIONS
    iterations = 0
    start = time.monotonic()
    for t in range(1, config.t_max + 1):
        try:
            if config.noise_var == 0.0:
                kappa = kappa_inv2 ** -0.5
                a_mean, a_var = update_a_noiseless(a, y, b_mean, kappa)
                gamma = gamma_inv2 ** -0.5
                b_mean, b_var = update_b_noiseless(a, y, a_mean, gamma)
            else:
                a_mean, a_var = update_a_finite_noise(
                    a, y, b_mean, b_var, kappa_inv2, config.noise_var
                )
                b_mean, b_var = update_b_finite_noise(
                    a, y, a_mean, a_var, gamma_inv2, config.noise_var
                )
            x = linalg.hadamard(a_mean, b_mean)
            kappa_inv2 = update_kappa_inv2(
                a_mean, a_var, gamma_inv2, config.alpha, config.beta,
                precision_floor=config.precision_floor,
            )
            gamma_inv2 = update_gamma_inv2(
                b_mean, b_var, kappa_inv2, config.alpha, config.beta,
                precision_floor=config.precision_floor,
            )
        except NumericalError:
            termination = NUMERICAL_FAILURE
            break
        change = relative_change(x, x_prev)
        iterations = t
        trace.append(TraceRow(t, change, _rel_error(x, x_true),
                              time.monotonic() - start))
        x_prev = x
        if change <= config.epsilon:
            termination = CONVERGED
            break
    state = PosteriorState(
        a_mean=a_mean, a_var=a_var, b_mean=b_mean, b_var=b_var,
        kappa_inv2_mean=kappa_inv2, gamma_inv2_mean=gamma_inv2,
    )
    return RecoveryResult(x_hat=x_prev, iterations=iterations,
                          termination=termination, trace=tuple(trace),
                          state=state)
