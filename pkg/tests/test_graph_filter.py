import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topotrack.graph_core import (build_edge_index_map, build_incidence,
                                  laplacian_from_weights)
from topotrack.graph_filter import (PolynomialGraphFilter, apply_filter,
                                    jacobian_dp, jacobian_naive,
                                    linear_observation, measurement)

from conftest import fd_jacobian, random_problem

TRIANGLE = laplacian_from_weights(build_incidence(build_edge_index_map(3)),
                                  [1.0, 1.0, 1.0])


def test_filter_needs_a_coefficient():
    with pytest.raises(ValueError):
        PolynomialGraphFilter(())


def test_apply_filter_examples(rng):
    L = laplacian_from_weights(build_incidence(build_edge_index_map(5)),
                               rng.uniform(0, 2, 10))
    np.testing.assert_allclose(apply_filter(PolynomialGraphFilter((1, 1)), L,
                                            np.ones(5)), np.ones(5), atol=1e-12)
    q = rng.standard_normal(5)
    np.testing.assert_array_equal(apply_filter(PolynomialGraphFilter((2.5,)), L, q),
                                  2.5 * q)
    np.testing.assert_array_equal(
        apply_filter(PolynomialGraphFilter((0, 1)), TRIANGLE, np.array([1.0, 0, 0])),
        [2, -1, -1])


def test_apply_filter_matches_matrix_polynomial(rng):
    filt, emap, B, x, q = random_problem(rng, 7, 5)
    L = laplacian_from_weights(B, x)
    hL = sum(a * np.linalg.matrix_power(L, p) for p, a in enumerate(filt.coeffs))
    np.testing.assert_allclose(apply_filter(filt, L, q), hL @ q, rtol=1e-12)


def test_apply_filter_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_filter(PolynomialGraphFilter((1, 1)), TRIANGLE, np.ones(4))


def test_jacobians_at_zero_laplacian(rng):
    filt, emap, B, _, q = random_problem(rng, 6, 4)
    x = np.zeros(emap.max_edges)
    expected = filt.coeffs[1] * B * (B.T @ q)
    np.testing.assert_allclose(jacobian_naive(filt, x, B, q), expected, atol=1e-14)
    np.testing.assert_allclose(jacobian_dp(filt, x, emap, np.zeros((6, 6)), q),
                               expected, atol=1e-14)


def test_first_order_jacobian_is_linear_form(rng):
    filt, emap, B, x, q = random_problem(rng, 6, 1)
    a0, a1 = filt.coeffs
    H, c = linear_observation(a0, a1, B, q)
    L = laplacian_from_weights(B, x)
    np.testing.assert_allclose(jacobian_naive(filt, x, B, q), H, atol=1e-14)
    np.testing.assert_allclose(jacobian_dp(filt, x, emap, L, q), H, atol=1e-14)
    # the same for any other weights
    np.testing.assert_allclose(
        jacobian_dp(filt, 3 * x, emap, laplacian_from_weights(B, 3 * x), q), H,
        atol=1e-14)


def test_dp_first_order_columns(rng):
    emap = build_edge_index_map(4)
    q = rng.standard_normal(4)
    J = jacobian_dp(PolynomialGraphFilter((0.3, 2.0)), None, emap,
                    np.zeros((4, 4)), q)
    for m in range(emap.max_edges):
        n, k = emap.pair(m)
        e = np.zeros(4)
        e[n], e[k] = 1.0, -1.0
        np.testing.assert_allclose(J[:, m], 2.0 * (q[n] - q[k]) * e, atol=1e-15)


def test_order_zero_jacobian_vanishes(rng):
    filt, emap, B, x, q = random_problem(rng, 5, 0)
    L = laplacian_from_weights(B, x)
    assert not jacobian_dp(filt, x, emap, L, q).any()
    assert not jacobian_naive(filt, x, B, q).any()


def test_naive_matches_finite_differences(rng):
    filt, emap, B, x, q = random_problem(rng, 6, 4)
    fd = fd_jacobian(lambda v: measurement(filt, B, v, q), x)
    J = jacobian_naive(filt, x, B, q)
    assert np.max(np.abs(J - fd)) <= 1e-5 * np.max(np.abs(J))


def test_dp_equals_naive_random(rng):
    for _ in range(100):
        n = int(rng.integers(4, 13))
        P = int(rng.integers(1, 7))
        filt, emap, B, x, q = random_problem(rng, n, P)
        L = laplacian_from_weights(B, x)
        Jn = jacobian_naive(filt, x, B, q)
        Jd = jacobian_dp(filt, x, emap, L, q)
        assert np.max(np.abs(Jd - Jn)) <= 1e-9 * np.max(np.abs(Jn))


def test_dp_dimension_checks(rng):
    filt, emap, B, x, q = random_problem(rng, 5, 2)
    L = laplacian_from_weights(B, x)
    with pytest.raises(ValueError):
        jacobian_dp(filt, x, build_edge_index_map(4), L, q)
    with pytest.raises(ValueError):
        jacobian_dp(filt, x[:-1], emap, L, q)
    with pytest.raises(ValueError):
        jacobian_naive(filt, x, B, q[:-1])


def test_linear_observation_example():
    B = build_incidence(build_edge_index_map(3))
    H, c = linear_observation(0.0, 1.0, B, np.array([1.0, 0.0, 0.0]))
    np.testing.assert_array_equal(H, [[1, 1, 0], [-1, 0, 0], [0, -1, 0]])
    np.testing.assert_array_equal(c, 0)
    H, c = linear_observation(1.5, 0.0, B, np.array([1.0, 2.0, 3.0]))
    assert not H.any()
    np.testing.assert_array_equal(c, [1.5, 3.0, 4.5])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 10), st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**32 - 1))
def test_linear_observation_identity(n, a0, a1, seed):
    rng = np.random.default_rng(seed)
    B = build_incidence(build_edge_index_map(n))
    x = rng.uniform(0, 2, B.shape[1])
    q = rng.standard_normal(n)
    H, c = linear_observation(a0, a1, B, q)
    h = measurement(PolynomialGraphFilter((a0, a1)), B, x, q)
    scale = 1.0 + np.abs(H).sum(axis=1).max() * x.max() + abs(a0) * np.abs(q).max()
    assert np.max(np.abs(h - (H @ x + c))) <= 1e-12 * scale


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 8), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_jacobian_permutation_equivariance(n, P, seed):
    rng = np.random.default_rng(seed)
    filt, emap, B, x, q = random_problem(rng, n, P)
    perm = rng.permutation(n)
    # weight of pair {perm[a], perm[b]} in the relabelled graph is x of {a, b}
    x_perm = np.empty_like(x)
    col_of = np.empty(emap.max_edges, dtype=int)
    for m in range(emap.max_edges):
        a, b = emap.pair(m)
        mp = emap.index(perm[a], perm[b])
        x_perm[mp] = x[m]
        col_of[m] = mp
    q_perm = np.empty_like(q)
    q_perm[perm] = q
    J = jacobian_dp(filt, x, emap, laplacian_from_weights(B, x), q)
    Jp = jacobian_dp(filt, x_perm, emap, laplacian_from_weights(B, x_perm), q_perm)
    # row perm[i] of Jp, column col_of[m]  ==  row i of J, column m
    np.testing.assert_allclose(Jp[np.ix_(perm, col_of)], J,
                               atol=1e-10 * max(1.0, np.abs(J).max()))
