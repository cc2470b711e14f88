"""Built-in verification suite, runnable in-process or from the CLI.

Each check recomputes an expected value through an independent route
(defining identities, quadrature of an integral representation, hand
arithmetic, a finite-noise solve at tiny noise) and compares the library
against it, so a silently corrupted kernel or constant table turns the
suite red.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from . import prior, solvers
from .linalg import pinv
from .rng import make_generator


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_pinv_identities():
    # The four defining identities of the Moore-Penrose pseudoinverse, on
    # random shapes including exactly rank-deficient ones.
    worst = 0.0
    for i in range(50):
        rng = make_generator((9001, i))
        rows = int(rng.integers(1, 9))
        cols = int(rng.integers(1, 9))
        m = rng.standard_normal((rows, cols))
        if i % 3 == 0:
            rank = int(rng.integers(1, min(rows, cols) + 1))
            m = rng.standard_normal((rows, rank)) @ rng.standard_normal(
                (rank, cols)
            )
        p = pinv(m)
        scale = max(np.linalg.norm(m), 1.0)
        devs = (
            np.linalg.norm(m @ p @ m - m) / scale,
            np.linalg.norm(p @ m @ p - p) / max(np.linalg.norm(p), 1.0),
            np.linalg.norm((m @ p) - (m @ p).T) / scale,
            np.linalg.norm((p @ m) - (p @ m).T) / scale,
        )
        worst = max(worst, max(devs))
    return CheckResult(
        name="pinv-identities",
        passed=worst <= 1e-10,
        detail=f"max deviation {worst:.3e} over 50 seeded matrices",
    )


def _k0_quad_reference(x):
    # K0(x) = integral_0^inf exp(-x cosh t) dt; the integrand underflows to
    # zero past acosh(700/x), so a finite upper limit loses nothing.
    upper = math.acosh(700.0 / x) if x < 700.0 else 1.0
    value, _ = scipy.integrate.quad(
        lambda t: math.exp(-x * math.cosh(t)), 0.0, upper,
        epsabs=0.0, epsrel=1e-13, limit=200,
    )
    return value


def _check_k0_quadrature():
    worst = 0.0
    for x in (0.05, 0.5, 1.0, 1.9, 2.1, 5.0, 20.0, 80.0):
        reference = _k0_quad_reference(x)
        rel = abs(prior.bessel_k0(x) - reference) / reference
        worst = max(worst, rel)
    return CheckResult(
        name="k0-quadrature",
        passed=worst <= 1e-10,
        detail=f"max relative deviation {worst:.3e} on 8 spot points",
    )


def _check_precision_update():
    # Hand-evaluated case: alpha=beta=1, mean 2, variance 1, other-factor
    # precision 3 gives (1/2+1)/((1/2)(4+1+2*3)) = 3/11.  And with
    # alpha=beta=0, zero variance, the scale must reduce to |mean|.
    got = solvers.update_kappa_inv2(
        np.array([2.0]), np.array([1.0]), np.array([3.0]), 1.0, 1.0
    )[0]
    dev_hand = abs(got - 3.0 / 11.0)
    rng = make_generator((9002, 0))
    a_mean = rng.standard_normal(16)
    a_mean[a_mean == 0.0] = 1.0
    kappa_inv2 = solvers.update_kappa_inv2(
        a_mean, np.zeros(16), np.ones(16), 0.0, 0.0
    )
    dev_zero = float(np.max(np.abs(kappa_inv2 ** -0.5 - np.abs(a_mean))))
    passed = dev_hand <= 1e-15 and dev_zero <= 1e-12 * float(
        np.max(np.abs(a_mean))
    )
    return CheckResult(
        name="precision-update",
        passed=passed,
        detail=f"hand-case deviation {dev_hand:.3e}, "
               f"scale-identity deviation {dev_zero:.3e}",
    )


def _check_noiseless_limit():
    # The closed-form noiseless updates must agree with an explicit
    # finite-noise solve at noise variance 1e-12.
    worst = 0.0
    for i in range(5):
        rng = make_generator((9003, i))
        a = rng.standard_normal((5, 8))
        y = rng.standard_normal(5)
        a_mean = rng.standard_normal(8)
        gamma = np.abs(rng.standard_normal(8)) + 0.5
        mean_limit, var_limit = solvers.update_b_noiseless(a, y, a_mean, gamma)
        mean_fin, var_fin = solvers.update_b_finite_noise(
            a, y, a_mean, np.zeros(8), gamma ** -2.0, 1e-12
        )
        dev_mean = np.linalg.norm(mean_limit - mean_fin) / max(
            np.linalg.norm(mean_fin), 1e-30
        )
        dev_var = np.linalg.norm(var_limit - var_fin) / max(
            np.linalg.norm(var_fin), 1e-30
        )
        worst = max(worst, float(dev_mean), float(dev_var))
    return CheckResult(
        name="noiseless-limit",
        passed=worst <= 1e-4,
        detail=f"max relative deviation {worst:.3e} over 5 seeded systems",
    )


def run_all_checks():
    """Run every embedded check and return the results in a fixed order."""
    return [
        _check_pinv_identities(),
        _check_k0_quadrature(),
        _check_precision_update(),
        _check_noiseless_limit(),
    ]
