"""Polynomial graph filters and their Jacobians with respect to edge weights.

A filter ``h(L) = sum_p a_p L^p`` applied to an input signal ``q`` gives the
measurement map ``x -> h(B diag(x) B^T) q``.  Two Jacobian routines are
provided: :func:`jacobian_naive` evaluates the term-by-term product-rule
expansion and is kept as a reference, :func:`jacobian_dp` reuses the shared
vectors ``c_p = L^p q`` and matrices ``D_p = sum_r a_{p+r+1} L^r`` and costs
O(P N^3).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_core import EdgeIndexMap, laplacian_from_weights


@dataclass(frozen=True)
class PolynomialGraphFilter:
    """Coefficients ``(a_0, ..., a_P)`` of ``h(L) = sum_p a_p L^p``."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(a) for a in np.atleast_1d(self.coeffs))
        if len(coeffs) < 1:
            raise ValueError("a graph filter needs at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, L, q):
        return apply_filter(self, L, q)


def _check_square(L, q):
    L = np.asarray(L, dtype=float)
    q = np.asarray(q, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or q.shape != (L.shape[0],):
        raise ValueError(
            f"Laplacian {L.shape} and signal {q.shape} do not agree")
    return L, q


def apply_filter(filt: PolynomialGraphFilter, L, q) -> np.ndarray:
    """Return ``sum_p a_p L^p q`` by repeated matrix-vector products."""
    L, q = _check_square(L, q)
    v = q
    out = filt.coeffs[0] * q
    for a in filt.coeffs[1:]:
        v = L @ v
        out = out + a * v
    return out


def measurement(filt: PolynomialGraphFilter, B, x, q) -> np.ndarray:
    """The measurement map ``h(B diag(x) B^T) q``."""
    return apply_filter(filt, laplacian_from_weights(B, x), q)


def jacobian_naive(filt: PolynomialGraphFilter, x, B, q) -> np.ndarray:
    """Jacobian of :func:`measurement` by the direct product-rule formula.

    Column ``m`` is ``sum_{p>=1} a_p sum_{k<p} (b^T L^{p-k-1} q) L^k b`` with
    ``b = B[:, m]``.  Every power is rebuilt from scratch by matrix-vector
    products, so the cost is O(P^3 N^4).  Use it as a reference only.
    """
    B = np.asarray(B, dtype=float)
    L = laplacian_from_weights(B, x)
    L, q = _check_square(L, q)
    a = filt.coeffs
    J = np.zeros(B.shape)
    for m in range(B.shape[1]):
        b = B[:, m]
        col = np.zeros(B.shape[0])
        for p in range(1, filt.order + 1):
            if a[p] == 0.0:
                continue
            for k in range(p):
                right = q
                for _ in range(p - k - 1):
                    right = L @ right
                left = b
                for _ in range(k):
                    left = L @ left
                col += a[p] * (b @ right) * left
        J[:, m] = col
    return J


def jacobian_dp(filt: PolynomialGraphFilter, x, emap: EdgeIndexMap, L, q
                ) -> np.ndarray:
    """Jacobian of :func:`measurement` by dynamic programming.

    ``x`` is accepted for interface symmetry; only ``L`` (which must equal
    ``B diag(x) B^T``) enters the computation.
    """
    L, q = _check_square(L, q)
    N = emap.n_nodes
    if L.shape != (N, N):
        raise ValueError(f"Laplacian {L.shape} does not match {N} nodes")
    if x is not None and np.shape(x) != (emap.max_edges,):
        raise ValueError(f"weights of shape {np.shape(x)} do not match map")
    P = filt.order
    a = filt.coeffs
    if P == 0:
        return np.zeros((N, emap.max_edges))

    c = np.empty((P, N))
    D = np.empty((P, N, N))
    c[0] = q
    D[P - 1] = a[P] * np.eye(N)
    for p in range(1, P):
        c[p] = L @ c[p - 1]
        D[P - 1 - p] = L @ D[P - p]
        D[P - 1 - p][np.diag_indices(N)] += a[P - p]

    n, k = emap.sources, emap.sinks
    dc = c[:, n] - c[:, k]  # (P, M)
    dD = D[:, :, n] - D[:, :, k]  # (P, N, M)
    return np.einsum("pm,pim->im", dc, dD)


def linear_observation(a0: float, a1: float, B, q):
    """Affine form ``h(x) = H x + c`` of a first-order filter.

    Returns ``H = a1 B diag(B^T q)`` and ``c = a0 q``.
    """
    B = np.asarray(B, dtype=float)
    q = np.asarray(q, dtype=float)
    H = a1 * (B * (B.T @ q))
    return H, a0 * q
