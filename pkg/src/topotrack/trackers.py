"""Kalman-type trackers for the edge-weight vector.

Each ``*_step`` function advances a :class:`TrackerState` by one observation
and returns a new state; inputs are never modified.  The thin tracker classes
at the bottom bundle the fixed model pieces so an experiment loop only has to
feed ``(q_t, y_t)`` pairs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as la

from .graph_core import EdgeIndexMap, laplacian_from_weights
from .graph_filter import (PolynomialGraphFilter, apply_filter, jacobian_dp,
                           jacobian_naive, linear_observation)


class NumericalFailure(ArithmeticError):
    """A covariance or gain computation broke down."""


@dataclass
class TrackerState:
    estimate: np.ndarray
    covariance: np.ndarray

    def copy(self) -> "TrackerState":
        return TrackerState(self.estimate.copy(), self.covariance.copy())


@dataclass
class NoiseModel:
    Q: np.ndarray
    R: np.ndarray

    @classmethod
    def isotropic(cls, max_edges: int, n_nodes: int, sigma_e: float,
                  sigma_v: float) -> "NoiseModel":
        return cls(sigma_e ** 2 * np.eye(max_edges),
                   sigma_v ** 2 * np.eye(n_nodes))


@dataclass
class IstaConfig:
    """Proximal-gradient settings; the shrinkage at iteration m is mu*rho[m]."""

    iterations: int = 1
    mu: float = 0.25
    step_sizes: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        self.step_sizes = tuple(float(s) for s in self.step_sizes)
        if self.iterations < 1:
            raise ValueError("need at least one ISTA iteration")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if len(self.step_sizes) != self.iterations:
            raise ValueError(
                f"{self.iterations} iterations but {len(self.step_sizes)} step sizes")
        if any(s <= 0 for s in self.step_sizes):
            raise ValueError("step sizes must be positive")

    @classmethod
    def constant(cls, threshold: float, iterations: int = 1,
                 step: float = 1.0) -> "IstaConfig":
        """Constant step with per-iteration shrinkage ``threshold``."""
        return cls(iterations, threshold / step, (step,) * iterations)


@dataclass
class StateTransition:
    """``f_t`` and its Jacobian; both ``None`` means the identity map."""

    f: Callable[[np.ndarray], np.ndarray] | None = None
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None

    @classmethod
    def linear(cls, F) -> "StateTransition":
        F = np.asarray(F, dtype=float)
        return cls(lambda x: F @ x, lambda x: F)

    @property
    def is_identity(self) -> bool:
        return self.f is None

    def __call__(self, x):
        return x.copy() if self.f is None else np.asarray(self.f(x), dtype=float)

    def jac(self, x):
        if self.f is None:
            return np.eye(len(x))
        return np.asarray(self.jacobian(x), dtype=float)


@dataclass(frozen=True)
class SupportMask:
    active: frozenset
    max_edges: int

    def __post_init__(self):
        active = frozenset(int(m) for m in self.active)
        if any(not 0 <= m < self.max_edges for m in active):
            raise ValueError("mask index out of range")
        object.__setattr__(self, "active", active)

    @property
    def vector(self) -> np.ndarray:
        v = np.zeros(self.max_edges)
        v[sorted(self.active)] = 1.0
        return v

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.vector)


# --- building blocks ---------------------------------------------------------

def predict(state: TrackerState, trans: StateTransition, noise: NoiseModel
            ) -> TrackerState:
    x = trans(state.estimate)
    if trans.is_identity:
        P = state.covariance + noise.Q
    else:
        F = trans.jac(state.estimate)
        P = F @ state.covariance @ F.T + noise.Q
    return TrackerState(x, P)


def innovation_moments(pred: TrackerState, H, noise: NoiseModel):
    """Innovation covariance ``S`` and gain ``K = P H^T S^-1``."""
    PHt = pred.covariance @ H.T
    S = H @ PHt + noise.R
    S = 0.5 * (S + S.T)
    try:
        cho = la.cho_factor(S)
    except la.LinAlgError:
        raise NumericalFailure(
            f"innovation covariance is singular (cond={np.linalg.cond(S):.3e})")
    K = la.cho_solve(cho, PHt.T).T
    if not np.all(np.isfinite(K)):
        raise NumericalFailure(
            f"non-finite gain (cond(S)={np.linalg.cond(S):.3e})")
    return S, K


def joseph_update(P, K, H, R) -> np.ndarray:
    """``(I - KH) P (I - KH)^T + K R K^T``, symmetrised."""
    A = -K @ H
    A[np.diag_indices_from(A)] += 1.0
    out = A @ P @ A.T + K @ R @ K.T
    return 0.5 * (out + out.T)


def soft_threshold(v, beta: float) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(0.0, np.abs(v) - beta)


def precision(P, pseudo: bool = False) -> np.ndarray:
    """Inverse of a covariance matrix.

    Cholesky first; on failure retry with ``1e-10 * trace/dim`` added to the
    diagonal.  With ``pseudo=True`` use the Moore-Penrose inverse, dropping
    singular values below ``dim * eps * s_max``.
    """
    P = np.asarray(P, dtype=float)
    dim = P.shape[0]
    if pseudo:
        return np.linalg.pinv(P, rcond=dim * np.finfo(float).eps, hermitian=True)
    eye = np.eye(dim)
    try:
        return la.cho_solve(la.cho_factor(P), eye)
    except la.LinAlgError:
        pass
    jitter = 1e-10 * max(np.trace(P), np.finfo(float).tiny) / dim
    try:
        return la.cho_solve(la.cho_factor(P + jitter * eye), eye)
    except la.LinAlgError:
        raise NumericalFailure("predicted covariance is not positive definite")


def update_objective(x, pred: TrackerState, H, R, dy, P_inv) -> float:
    """Linearised MAP objective: squared innovation and prior misfits."""
    d = x - pred.estimate
    r = dy - H @ d
    return float(r @ np.linalg.solve(R, r) + d @ P_inv @ d)


def update_gradient(x, pred: TrackerState, H, R, dy, P_inv) -> np.ndarray:
    """Gradient of :func:`update_objective`."""
    HtRinv = np.linalg.solve(R, H).T
    return 2.0 * ((HtRinv @ H + P_inv) @ (x - pred.estimate)) - 2.0 * HtRinv @ dy


def ista_update(pred: TrackerState, H, noise: NoiseModel, y, h_pred,
                cfg: IstaConfig, init=None, gain=None) -> np.ndarray:
    """Sparsity-regularised update by proximal gradient.

    Minimises ``update_objective + mu * ||x||_1``.  When ``init`` is omitted
    the iterations start from the unregularised Kalman update, where the
    smooth gradient vanishes, so the first iteration reduces to a plain soft
    threshold and needs no covariance inverse.
    """
    dy = np.asarray(y, dtype=float) - h_pred
    start = 0
    if init is None:
        if gain is None:
            _, gain = innovation_moments(pred, H, noise)
        x = soft_threshold(pred.estimate + gain @ dy, cfg.mu * cfg.step_sizes[0])
        start = 1
    else:
        x = np.asarray(init, dtype=float).copy()
    if start >= cfg.iterations:
        return x

    P_inv = precision(pred.covariance)
    for rho in cfg.step_sizes[start:]:
        g = update_gradient(x, pred, H, noise.R, dy, P_inv)
        if not np.all(np.isfinite(g)):
            raise NumericalFailure("non-finite gradient in ISTA update")
        x = soft_threshold(x - rho * g, cfg.mu * rho)
    return x


def _jacobian(filt, x, B, emap, L, q, method):
    if method == "dp":
        return jacobian_dp(filt, x, emap, L, q)
    if method == "naive":
        return jacobian_naive(filt, x, B, q)
    raise ValueError(f"unknown jacobian method {method!r}")


def _linearise(pred, filt, B, emap, q, method):
    L = laplacian_from_weights(B, pred.estimate)
    h_pred = apply_filter(filt, L, q)
    H = _jacobian(filt, pred.estimate, B, emap, L, q, method)
    return h_pred, H


# --- trackers -----------------------------------------------------------------

def ekf_step(state: TrackerState, trans: StateTransition, noise: NoiseModel,
             filt: PolynomialGraphFilter, B, emap: EdgeIndexMap, q, y,
             jacobian: str = "dp", clamp: bool = True) -> TrackerState:
    pred = predict(state, trans, noise)
    h_pred, H = _linearise(pred, filt, B, emap, q, jacobian)
    _, K = innovation_moments(pred, H, noise)
    x = pred.estimate + K @ (np.asarray(y, dtype=float) - h_pred)
    if clamp:
        x = np.maximum(x, 0.0)
    return TrackerState(x, joseph_update(pred.covariance, K, H, noise.R))


def gsp_ekf_step(state: TrackerState, trans: StateTransition,
                 noise: NoiseModel, filt: PolynomialGraphFilter, B,
                 emap: EdgeIndexMap, q, y, cfg: IstaConfig,
                 jacobian: str = "dp", clamp: bool = True) -> TrackerState:
    """EKF prediction, sparsity-regularised state update.

    The covariance is updated in Joseph form with the unregularised gain,
    independently of the ISTA output.
    """
    pred = predict(state, trans, noise)
    h_pred, H = _linearise(pred, filt, B, emap, q, jacobian)
    _, K = innovation_moments(pred, H, noise)
    x = ista_update(pred, H, noise, y, h_pred, cfg, gain=K)
    if clamp:
        x = np.maximum(x, 0.0)
    return TrackerState(x, joseph_update(pred.covariance, K, H, noise.R))


def oracle_step(state: TrackerState, trans: StateTransition, noise: NoiseModel,
                filt: PolynomialGraphFilter, B, emap: EdgeIndexMap, q, y,
                mask, mean_jump=None, jacobian: str = "dp",
                clamp: bool = True) -> TrackerState:
    """Known-support update: inactive weights are pinned to zero.

    The masked prediction covariance is singular; the closed-form gain only
    needs ``S = H P H^T + R``, which stays invertible through ``R``.
    """
    if not isinstance(mask, SupportMask):
        mask = SupportMask(frozenset(mask), emap.max_edges)
    w = mask.vector
    x = trans(state.estimate)
    if mean_jump is not None:
        x = x + mean_jump
    x = w * x
    if trans.is_identity:
        P = state.covariance
    else:
        F = trans.jac(state.estimate)
        P = F @ state.covariance @ F.T
    P = w[:, None] * (P + noise.Q) * w[None, :]
    pred = TrackerState(x, P)

    h_pred, H = _linearise(pred, filt, B, emap, q, jacobian)
    _, K = innovation_moments(pred, H, noise)
    x = w * (pred.estimate + K @ (np.asarray(y, dtype=float) - h_pred))
    if clamp:
        x = np.maximum(x, 0.0)
    return TrackerState(x, joseph_update(P, K, H, noise.R))


def linear_kf_step(state: TrackerState, F, noise: NoiseModel, a0: float,
                   a1: float, B, q, y, clamp: bool = True) -> TrackerState:
    """Exact Kalman step for the first-order filter ``a0 I + a1 L``."""
    trans = StateTransition() if F is None else StateTransition.linear(F)
    pred = predict(state, trans, noise)
    H, c = linear_observation(a0, a1, B, q)
    _, K = innovation_moments(pred, H, noise)
    x = pred.estimate + K @ (np.asarray(y, dtype=float) - (H @ pred.estimate + c))
    if clamp:
        x = np.maximum(x, 0.0)
    return TrackerState(x, joseph_update(pred.covariance, K, H, noise.R))


@dataclass
class Tracker:
    """A tracker bound to a fixed model; ``step`` consumes one observation.

    ``kind`` is one of ``EKF``, ``GSP-EKF``, ``Oracle`` or ``LinearKF``.  The
    Oracle needs the true support of each step; others ignore it.
    """

    kind: str
    filt: PolynomialGraphFilter
    B: np.ndarray
    emap: EdgeIndexMap
    noise: NoiseModel
    state: TrackerState
    ista: IstaConfig = field(default_factory=IstaConfig)
    jacobian: str = "dp"
    trans: StateTransition = field(default_factory=StateTransition)
    new_edge_mean: float = 1.0
    support: frozenset | None = None

    KINDS = ("EKF", "GSP-EKF", "Oracle", "LinearKF")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown tracker kind {self.kind!r}")
        if self.kind == "LinearKF" and self.filt.order > 1:
            raise ValueError("LinearKF needs a first-order filter")

    def step(self, q, y, support=None) -> TrackerState:
        k = self.kind
        if k == "EKF":
            self.state = ekf_step(self.state, self.trans, self.noise, self.filt,
                                  self.B, self.emap, q, y, self.jacobian)
        elif k == "GSP-EKF":
            self.state = gsp_ekf_step(self.state, self.trans, self.noise,
                                      self.filt, self.B, self.emap, q, y,
                                      self.ista, self.jacobian)
        elif k == "Oracle":
            if support is None:
                raise ValueError("the Oracle tracker needs the true support")
            support = frozenset(support)
            jump = np.zeros(self.emap.max_edges)
            if self.support is not None:
                born = sorted(support - self.support)
                jump[born] = self.new_edge_mean
            self.state = oracle_step(self.state, self.trans, self.noise,
                                     self.filt, self.B, self.emap, q, y,
                                     support, jump, self.jacobian)
            self.support = support
        else:
            coeffs = self.filt.coeffs + (0.0,)
            F = None if self.trans.is_identity else self.trans.jac(self.state.estimate)
            self.state = linear_kf_step(self.state, F, self.noise, coeffs[0],
                                        coeffs[1], self.B, q, y)
        return self.state
