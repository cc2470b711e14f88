import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from npsparse import linalg
from npsparse.errors import DimensionError, NumericalError
from npsparse.rng import make_generator


def random_matrix(seed, m, n, rank=None):
    rng = make_generator((8800, seed, m, n, 0 if rank is None else rank + 1))
    if rank is None:
        return rng.standard_normal((m, n))
    left = rng.standard_normal((m, rank))
    right = rng.standard_normal((rank, n))
    return left @ right


def mp_residuals(a, x):
    """The four Moore-Penrose identities, as relative Frobenius residuals."""
    def rel(delta, ref):
        d = np.linalg.norm(ref)
        return np.linalg.norm(delta) / (d if d > 0 else 1.0)

    ax, xa = a @ x, x @ a
    return (
        rel(a @ x @ a - a, a),
        rel(x @ a @ x - x, x) if np.linalg.norm(x) > 0 else 0.0,
        rel(ax.T - ax, ax) if np.linalg.norm(ax) > 0 else 0.0,
        rel(xa.T - xa, xa) if np.linalg.norm(xa) > 0 else 0.0,
    )


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 12), st.integers(1, 12))
def test_pinv_satisfies_moore_penrose_identities(seed, m, n):
    a = random_matrix(seed, m, n)
    assert max(mp_residuals(a, linalg.pinv(a))) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 10), st.integers(2, 10))
def test_pinv_handles_rank_deficiency(seed, m, n):
    rank = min(m, n) - 1
    a = random_matrix(seed, m, n, rank=rank)
    x = linalg.pinv(a)
    assert max(mp_residuals(a, x)) < 1e-10
    assert np.linalg.matrix_rank(x) == rank


def test_pinv_zero_matrix():
    x = linalg.pinv(np.zeros((3, 5)))
    assert x.shape == (5, 3)
    assert np.all(x == 0)


def test_pinv_identity():
    np.testing.assert_allclose(linalg.pinv(np.eye(4)), np.eye(4), atol=1e-14)


def test_pinv_rank_tol_truncates_small_singular_values():
    # diag(1, 1e-8): a generous tolerance must treat the small direction as null
    a = np.diag([1.0, 1e-8])
    loose = linalg.pinv(a, rank_tol=1e-4)
    assert loose[1, 1] == 0.0
    tight = linalg.pinv(a)
    np.testing.assert_allclose(tight[1, 1], 1e8, rtol=1e-10)


def test_pinv_min_norm_least_squares():
    rng = make_generator(4021)
    a = rng.standard_normal((3, 7))
    y = rng.standard_normal(3)
    z = linalg.pinv(a) @ y
    np.testing.assert_allclose(a @ z, y, atol=1e-10)
    # minimum-norm solution lies in the row space
    proj = a.T @ np.linalg.solve(a @ a.T, a @ z)
    np.testing.assert_allclose(proj, z, atol=1e-10)


def test_svd_factors_reconstruct():
    rng = make_generator(4022)
    a = rng.standard_normal((5, 8))
    f = linalg.svd_factors(a)
    np.testing.assert_allclose((f.u * f.singular_values) @ f.vt, a, atol=1e-12)


def test_hadamard():
    u = np.array([1.0, -2.0, 3.0])
    v = np.array([4.0, 5.0, -6.0])
    np.testing.assert_array_equal(linalg.hadamard(u, v), [4.0, -10.0, -18.0])


def test_hadamard_shape_mismatch():
    with pytest.raises(DimensionError):
        linalg.hadamard(np.ones(3), np.ones(4))


def test_scale_cols_matches_diag_product():
    rng = make_generator(4023)
    a = rng.standard_normal((4, 6))
    d = rng.standard_normal(6)
    np.testing.assert_allclose(linalg.scale_cols(a, d), a @ np.diag(d), atol=1e-14)


def test_scale_cols_length_mismatch():
    with pytest.raises(DimensionError):
        linalg.scale_cols(np.ones((4, 6)), np.ones(5))


def test_solve_spd_matches_dense_solve():
    rng = make_generator(4024)
    b = rng.standard_normal((6, 6))
    g = b @ b.T + 6 * np.eye(6)
    c = rng.standard_normal(6)
    np.testing.assert_allclose(linalg.solve_spd(g, c), np.linalg.solve(g, c),
                               rtol=1e-10, atol=1e-12)


def test_solve_spd_rejects_indefinite():
    g = np.diag([1.0, -1.0])
    with pytest.raises(NumericalError):
        linalg.solve_spd(g, np.ones(2))


def test_solve_spd_ill_conditioned_residual():
    # condition 1e8: refinement must hold the residual to the documented bound
    rng = make_generator(4025)
    q, _ = np.linalg.qr(rng.standard_normal((8, 8)))
    g = (q * np.geomspace(1.0, 1e-8, 8)) @ q.T
    g = 0.5 * (g + g.T)
    c = rng.standard_normal(8)
    z = linalg.solve_spd(g, c)
    assert np.linalg.norm(g @ z - c) <= 1e-8 * np.linalg.norm(c)


def test_spd_inverse_round_trip_and_symmetry():
    rng = make_generator(4026)
    b = rng.standard_normal((5, 5))
    g = b @ b.T + 5 * np.eye(5)
    inv = linalg.spd_inverse(g)
    np.testing.assert_allclose(inv, inv.T, atol=0)
    np.testing.assert_allclose(g @ inv, np.eye(5), atol=1e-10)


def test_spd_inverse_rejects_indefinite():
    with pytest.raises(NumericalError):
        linalg.spd_inverse(np.diag([1.0, 0.0]))


def test_validators_reject_bad_shapes_and_values():
    with pytest.raises(DimensionError):
        linalg.as_matrix(np.ones(3))
    with pytest.raises(DimensionError):
        linalg.as_vector(np.ones((2, 2)))
    with pytest.raises(ValueError):
        linalg.as_matrix(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        linalg.as_vector(np.array([1.0, np.inf]))
