"""Tracking performance measures."""
from __future__ import annotations

import math

import numpy as np


def normalized_mse(estimate, truth) -> float:
    """Squared error divided by the number of candidate edges."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ValueError(
            f"length mismatch: {estimate.shape} vs {truth.shape}")
    err = estimate - truth
    return float(err @ err) / err.size


def eier(est_support, true_support, n_nodes: int) -> float:
    """Edge identification error rate in percent.

    The denominator is ``N(N-1)``, i.e. twice the number of candidate edges,
    so missing every edge of a graph with ``|true| + |est| = N(N-1)/2``
    scores 50%, not 100%.
    """
    diff = set(est_support) ^ set(true_support)
    return 100.0 * len(diff) / (n_nodes * (n_nodes - 1))


def to_db(value: float) -> float:
    return 10.0 * math.log10(value) if value > 0 else -math.inf
