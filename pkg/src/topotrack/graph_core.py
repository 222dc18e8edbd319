"""Edge indexing, incidence matrix and Laplacian assembly for undirected graphs.

All indices are zero-based.  Edge ``m`` joins the node pair ``(n, k)`` with
``k < n``; pairs are enumerated lexicographically by ``(n, k)``, so for four
nodes the order is ``(1,0), (2,0), (2,1), (3,0), (3,1), (3,2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class EdgeIndexMap:
    """Bijection between edge indices and unordered node pairs."""

    n_nodes: int
    sources: np.ndarray = field(init=False, repr=False)  # larger node n
    sinks: np.ndarray = field(init=False, repr=False)  # smaller node k

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError(f"need at least 2 nodes, got {self.n_nodes}")
        n, k = [], []
        for a in range(1, self.n_nodes):
            for b in range(a):
                n.append(a)
                k.append(b)
        for name, arr in (("sources", n), ("sinks", k)):
            arr = np.asarray(arr, dtype=np.intp)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def max_edges(self) -> int:
        return self.n_nodes * (self.n_nodes - 1) // 2

    def pair(self, m: int) -> tuple[int, int]:
        """Return ``(n, k)`` for edge ``m``."""
        if not 0 <= m < self.max_edges:
            raise IndexError(m)
        return int(self.sources[m]), int(self.sinks[m])

    def index(self, n: int, k: int) -> int:
        """Return the edge index of the pair ``{n, k}`` (order-insensitive)."""
        if n == k:
            raise ValueError("self-loops are not edges")
        if n < k:
            n, k = k, n
        if k < 0 or n >= self.n_nodes:
            raise IndexError((n, k))
        return n * (n - 1) // 2 + k

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.sources.tolist(), self.sinks.tolist()))


def build_edge_index_map(n_nodes: int) -> EdgeIndexMap:
    return EdgeIndexMap(int(n_nodes))


def build_incidence(emap: EdgeIndexMap) -> np.ndarray:
    """Signed incidence matrix of the complete graph, shape (N, N(N-1)/2).

    Column ``m`` carries +1 at the smaller node ``k`` and -1 at ``n``.
    """
    B = np.zeros((emap.n_nodes, emap.max_edges))
    cols = np.arange(emap.max_edges)
    B[emap.sinks, cols] = 1.0
    B[emap.sources, cols] = -1.0
    return B


def laplacian_from_weights(B: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Return ``B diag(x) B^T``."""
    x = np.asarray(x, dtype=float)
    if B.ndim != 2 or x.shape != (B.shape[1],):
        raise ValueError(
            f"weights of shape {x.shape} do not match incidence {B.shape}")
    return (B * x) @ B.T


def laplacian_from_edges(emap: EdgeIndexMap, x: np.ndarray) -> np.ndarray:
    """Edge-by-edge Laplacian assembly, O(N^2) for the complete graph."""
    x = np.asarray(x, dtype=float)
    if x.shape != (emap.max_edges,):
        raise ValueError(
            f"expected {emap.max_edges} weights, got shape {x.shape}")
    N = emap.n_nodes
    L = np.zeros((N, N))
    L[emap.sources, emap.sinks] = -x
    L[emap.sinks, emap.sources] = -x
    L[np.diag_indices(N)] = -L.sum(axis=1)
    return L


def weights_from_laplacian(emap: EdgeIndexMap, L: np.ndarray) -> np.ndarray:
    """Inverse of :func:`laplacian_from_edges` (reads ``-L[n, k]``)."""
    return -L[emap.sources, emap.sinks]


def support_of(x: np.ndarray, threshold: float = 0.1) -> frozenset[int]:
    """Edges whose weight strictly exceeds ``threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    return frozenset(np.flatnonzero(np.asarray(x) > threshold).tolist())


def support_indicator(support, max_edges: int) -> np.ndarray:
    """0/1 vector of length ``max_edges`` marking ``support``."""
    ind = np.zeros(max_edges)
    ind[list(support)] = 1.0
    return ind
