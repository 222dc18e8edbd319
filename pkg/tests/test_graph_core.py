import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from topotrack.graph_core import (build_edge_index_map, build_incidence,
                                  laplacian_from_edges, laplacian_from_weights,
                                  support_of, weights_from_laplacian)


def test_edge_order_three_nodes():
    emap = build_edge_index_map(3)
    assert emap.pairs() == [(1, 0), (2, 0), (2, 1)]
    assert emap.max_edges == 3


def test_edge_map_sizes():
    assert build_edge_index_map(2).pairs() == [(1, 0)]
    assert build_edge_index_map(2).max_edges == 1
    assert build_edge_index_map(20).max_edges == 190


def test_edge_map_rejects_single_node():
    with pytest.raises(ValueError):
        build_edge_index_map(1)


@pytest.mark.parametrize("n", [2, 3, 7, 20])
def test_edge_map_round_trip(n):
    emap = build_edge_index_map(n)
    seen = set()
    for m in range(emap.max_edges):
        a, b = emap.pair(m)
        assert 0 <= b < a < n
        assert emap.index(a, b) == m
        assert emap.index(b, a) == m
        seen.add((a, b))
    assert len(seen) == n * (n - 1) // 2


def test_incidence_small():
    np.testing.assert_array_equal(build_incidence(build_edge_index_map(2)),
                                  [[1.0], [-1.0]])
    B = build_incidence(build_edge_index_map(3))
    np.testing.assert_array_equal(B, [[1, 1, 0], [-1, 0, 1], [0, -1, -1]])


@pytest.mark.parametrize("n", [2, 5, 12])
def test_incidence_columns(n):
    emap = build_edge_index_map(n)
    B = build_incidence(emap)
    assert B.shape == (n, emap.max_edges)
    np.testing.assert_array_equal(B.sum(axis=0), 0)
    np.testing.assert_array_equal((B == 1).sum(axis=0), 1)
    np.testing.assert_array_equal((B == -1).sum(axis=0), 1)
    for m in range(emap.max_edges):
        a, b = emap.pair(m)
        assert set(np.flatnonzero(B[:, m])) == {a, b}
    L = laplacian_from_weights(B, np.ones(emap.max_edges))
    np.testing.assert_allclose(L.sum(axis=1), 0)


def test_laplacian_examples():
    B = build_incidence(build_edge_index_map(3))
    np.testing.assert_array_equal(laplacian_from_weights(B, [1, 1, 1]),
                                  [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    np.testing.assert_array_equal(laplacian_from_weights(B, [0, 0, 0]),
                                  np.zeros((3, 3)))
    np.testing.assert_array_equal(laplacian_from_weights(B, [2, 0, 0]),
                                  [[2, -2, 0], [-2, 2, 0], [0, 0, 0]])


def test_laplacian_dimension_mismatch():
    B = build_incidence(build_edge_index_map(3))
    with pytest.raises(ValueError):
        laplacian_from_weights(B, np.ones(4))
    with pytest.raises(ValueError):
        laplacian_from_edges(build_edge_index_map(3), np.ones(2))


def test_support_of():
    assert support_of(np.array([0.05, 0.2, 1.0]), 0.1) == {1, 2}
    assert support_of(np.zeros(5), 0.1) == frozenset()
    assert support_of(np.array([0.0, 1e-12, 1.0]), 0.0) == {1, 2}
    with pytest.raises(ValueError):
        support_of(np.zeros(3), -1.0)


weights = st.integers(2, 9).flatmap(
    lambda n: st.tuples(st.just(n), arrays(
        float, n * (n - 1) // 2,
        elements=st.floats(-5, 5, allow_nan=False, allow_subnormal=False))))


@settings(max_examples=60, deadline=None)
@given(weights)
def test_laplacian_algebra_any_sign(nx):
    n, x = nx
    emap = build_edge_index_map(n)
    B = build_incidence(emap)
    L = laplacian_from_weights(B, x)
    np.testing.assert_array_equal(L, L.T)
    np.testing.assert_allclose(L.sum(axis=1), 0, atol=1e-12)
    # edge-by-edge assembly agrees with the dense product
    np.testing.assert_allclose(laplacian_from_edges(emap, x), L, atol=1e-13)


@settings(max_examples=60, deadline=None)
@given(weights)
def test_laplacian_nonnegative_weights(nx):
    n, x = nx
    x = np.abs(x)
    emap = build_edge_index_map(n)
    L = laplacian_from_weights(build_incidence(emap), x)
    off = L[~np.eye(n, dtype=bool)]
    assert np.all(off <= 0)
    lam_min = np.linalg.eigvalsh(L)[0]
    assert lam_min >= -np.finfo(float).eps * max(np.linalg.norm(L, 2), 1.0) * n
    # exact recovery of the weights from the Laplacian
    np.testing.assert_array_equal(weights_from_laplacian(emap, laplacian_from_edges(emap, x)), x)


@settings(max_examples=30, deadline=None)
@given(weights, st.data())
def test_column_sign_flip_invariance(nx, data):
    n, x = nx
    B = build_incidence(build_edge_index_map(n))
    flips = np.array(data.draw(st.lists(st.sampled_from([-1.0, 1.0]),
                                        min_size=B.shape[1], max_size=B.shape[1])))
    np.testing.assert_allclose(laplacian_from_weights(B * flips, x),
                               laplacian_from_weights(B, x), atol=0)
