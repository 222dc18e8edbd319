import numpy as np
import pytest

from topotrack.graph_core import build_edge_index_map, build_incidence
from topotrack.graph_filter import PolynomialGraphFilter


def random_problem(rng, n, order, low=0.0, high=2.0):
    """Filter, map, incidence, weights and input for a random instance."""
    emap = build_edge_index_map(n)
    B = build_incidence(emap)
    filt = PolynomialGraphFilter(tuple(rng.normal(size=order + 1)))
    x = rng.uniform(low, high, emap.max_edges)
    q = rng.standard_normal(n)
    return filt, emap, B, x, q


def fd_jacobian(fun, x, step=1e-6):
    """Central finite differences, column by column."""
    cols = []
    for m in range(x.size):
        e = np.zeros_like(x)
        e[m] = step
        cols.append((fun(x + e) - fun(x - e)) / (2 * step))
    return np.column_stack(cols)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
