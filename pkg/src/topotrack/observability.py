"""T-step observability of the linear time-varying edge-weight model."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph_filter import linear_observation


@dataclass
class ObservabilityProblem:
    """Observation matrices ``H_t..H_{t+T-1}`` and transitions ``F_{t+1}..F_{t+T-1}``.

    ``F_seq`` may be left empty to mean identity transitions.
    """

    H_seq: list
    F_seq: list = field(default_factory=list)

    def __post_init__(self):
        self.H_seq = [np.asarray(H, dtype=float) for H in self.H_seq]
        self.F_seq = [np.asarray(F, dtype=float) for F in self.F_seq]
        if not self.H_seq:
            raise ValueError("need at least one observation matrix")
        rows, cols = self.H_seq[0].shape
        if any(H.shape != (rows, cols) for H in self.H_seq):
            raise ValueError("observation matrices differ in shape")
        if self.F_seq:
            if len(self.F_seq) != len(self.H_seq) - 1:
                raise ValueError(
                    f"{len(self.H_seq)} observations need {len(self.H_seq) - 1} "
                    f"transitions, got {len(self.F_seq)}")
            if any(F.shape != (cols, cols) for F in self.F_seq):
                raise ValueError("transition matrices must be square in the state")

    @property
    def horizon(self) -> int:
        return len(self.H_seq)


def observability_matrix(problem: ObservabilityProblem) -> np.ndarray:
    """Stack ``H_t, H_{t+1} F_{t+1}, ..., H_{t+T-1} F_{t+T-1} ... F_{t+1}``."""
    blocks = [problem.H_seq[0]]
    Phi = None
    for i, H in enumerate(problem.H_seq[1:]):
        if problem.F_seq:
            F = problem.F_seq[i]
            Phi = F if Phi is None else F @ Phi
            blocks.append(H @ Phi)
        else:
            blocks.append(H)
    return np.vstack(blocks)


def numerical_rank(A, tol: float | None = None) -> int:
    """Count singular values above ``tol * s_max * max(A.shape)``."""
    if tol is None:
        tol = np.finfo(float).eps
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0] * max(A.shape)))


def is_t_step_observable(problem: ObservabilityProblem,
                         tol: float | None = None) -> tuple[bool, int]:
    """Full-column-rank test; returns ``(observable, rank)``."""
    O = observability_matrix(problem)
    r = numerical_rank(O, tol)
    return r == O.shape[1], r


def min_observability_horizon(n_nodes: int) -> int:
    """Smallest T with ``T N >= N(N-1)/2``."""
    if n_nodes < 2:
        raise ValueError("n_nodes must be at least 2")
    return math.ceil((n_nodes - 1) / 2)


def random_linear_problem(B, horizon: int, rng: np.random.Generator,
                          a1: float = 1.0) -> ObservabilityProblem:
    """Identity transitions and first-order observation matrices from Gaussian inputs."""
    H_seq = [linear_observation(0.0, a1, B, rng.standard_normal(B.shape[0]))[0]
             for _ in range(horizon)]
    return ObservabilityProblem(H_seq)
