"""Synthetic trajectories of slowly drifting sparse topologies.

Time runs over ``t = 1..t_max``.  The starting graph (``t = 0``) has
``init_edge_count`` unit-weight edges.  At every ``t`` that is a multiple of
``change_interval`` the support is edited ``changes_per_event`` times, each
edit adding a random absent edge (weight drawn from
``Normal(new_edge_mean, new_edge_var)``) or removing a random present one
with equal probability.  Active weights then take a Gaussian random-walk
step and are clipped at zero.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph_core import build_edge_index_map, build_incidence
from .graph_filter import PolynomialGraphFilter, measurement

BUILTIN_FILTERS = ("Lin", "NL4", "NL5", "NLP")


def builtin_filter(name: str, order: int | None = None) -> PolynomialGraphFilter:
    """Observation models used in the experiments."""
    if name == "Lin":
        coeffs = (0.0, 1.0)
    elif name == "NL4":
        coeffs = (1.0, 1.0, 1.0, 0.1, 1.0)
    elif name == "NL5":
        coeffs = (1.0, 1.0, 0.8, 0.6, 0.4, 0.2)
    elif name == "NLP":
        if order is None or order < 0:
            raise ValueError("NLP needs a nonnegative order")
        coeffs = tuple(0.5 ** p for p in range(order + 1))
    else:
        raise ValueError(f"unknown filter {name!r}; choose from {BUILTIN_FILTERS}")
    if name != "NLP" and order is not None:
        raise ValueError(f"{name} has a fixed order")
    return PolynomialGraphFilter(coeffs)


@dataclass
class ScenarioConfig:
    n_nodes: int = 20
    t_max: int = 159
    init_edge_count: int = 60
    change_interval: int = 40
    changes_per_event: int = 1
    sigma_e: float = 0.01
    sigma_v: float = 0.01
    filter: PolynomialGraphFilter = field(
        default_factory=lambda: builtin_filter("Lin"))
    new_edge_mean: float = 1.0
    new_edge_var: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.filter, PolynomialGraphFilter):
            self.filter = PolynomialGraphFilter(self.filter)
        max_edges = self.n_nodes * (self.n_nodes - 1) // 2
        if self.n_nodes < 2:
            raise ValueError("n_nodes must be at least 2")
        if not 0 <= self.init_edge_count <= max_edges:
            raise ValueError(
                f"init_edge_count must lie in [0, {max_edges}]")
        if self.change_interval < 1 or self.t_max < 1:
            raise ValueError("change_interval and t_max must be >= 1")
        if self.changes_per_event < 0:
            raise ValueError("changes_per_event must be >= 0")
        if self.sigma_e < 0 or self.sigma_v < 0 or self.new_edge_var < 0:
            raise ValueError("noise levels must be nonnegative")

    @property
    def max_edges(self) -> int:
        return self.n_nodes * (self.n_nodes - 1) // 2

    def event_times(self) -> list[int]:
        return list(range(self.change_interval, self.t_max + 1,
                          self.change_interval))


@dataclass
class Trajectory:
    """Ground truth and observations; row ``i`` of each array is ``t = i+1``."""

    initial_state: np.ndarray
    initial_support: frozenset
    true_states: np.ndarray  # (T, M)
    inputs: np.ndarray  # (T, N)
    observations: np.ndarray  # (T, N)
    true_supports: list = field(default_factory=list)

    def __len__(self):
        return len(self.true_states)

    @property
    def n_nodes(self) -> int:
        return self.inputs.shape[1]


def trial_rng(seed: int, trial: int | None = None) -> np.random.Generator:
    """PCG64 generator for ``seed``; ``trial`` selects an independent substream.

    Substream ``i`` is the ``i``-th child of ``SeedSequence(seed)``, identical
    to ``SeedSequence(seed).spawn(i + 1)[i]``.
    """
    if trial is None:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    ss = np.random.SeedSequence(seed, spawn_key=(int(trial),))
    return np.random.Generator(np.random.PCG64(ss))


def generate(config: ScenarioConfig, rng: np.random.Generator | None = None
             ) -> Trajectory:
    """Draw one trajectory.  Deterministic given ``config.seed`` (or ``rng``)."""
    if rng is None:
        rng = trial_rng(config.seed)
    N, M, T = config.n_nodes, config.max_edges, config.t_max
    B = build_incidence(build_edge_index_map(N))
    new_sd = np.sqrt(config.new_edge_var)

    active = np.zeros(M, dtype=bool)
    active[rng.choice(M, size=config.init_edge_count, replace=False)] = True
    x = active.astype(float)
    x0, support0 = x.copy(), frozenset(np.flatnonzero(active).tolist())

    states = np.empty((T, M))
    inputs = np.empty((T, N))
    obs = np.empty((T, N))
    supports = []
    for i in range(T):
        t = i + 1
        if t % config.change_interval == 0:
            for _ in range(config.changes_per_event):
                if rng.random() < 0.5:
                    absent = np.flatnonzero(~active)
                    if absent.size:
                        m = rng.choice(absent)
                        active[m] = True
                        x[m] = max(0.0, rng.normal(config.new_edge_mean, new_sd))
                else:
                    present = np.flatnonzero(active)
                    if present.size:
                        m = rng.choice(present)
                        active[m] = False
                        x[m] = 0.0
        x = x + config.sigma_e * rng.standard_normal(M) * active
        np.maximum(x, 0.0, out=x)
        q = rng.standard_normal(N)
        y = measurement(config.filter, B, x, q) + config.sigma_v * rng.standard_normal(N)
        states[i], inputs[i], obs[i] = x, q, y
        supports.append(frozenset(np.flatnonzero(active).tolist()))
    return Trajectory(x0, support0, states, inputs, obs, supports)


def save_trajectory_csv(traj: Trajectory, path) -> None:
    """One row per ``t``: ``t, x_*, q_*, y_*`` at round-trip precision.

    A ``t = 0`` row holds the initial state with empty ``q``/``y`` cells.
    The support of each row is the set of edges carried by ``support`` as a
    space-separated list, since zero-weight active edges cannot be read off
    the weights.
    """
    M, N = traj.true_states.shape[1], traj.inputs.shape[1]
    header = (["t"] + [f"x{m}" for m in range(M)] + [f"q{n}" for n in range(N)]
              + [f"y{n}" for n in range(N)] + ["support"])
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerow(["0"] + [repr(float(v)) for v in traj.initial_state]
                   + [""] * (2 * N) + [_fmt_support(traj.initial_support)])
        for i in range(len(traj)):
            w.writerow([str(i + 1)]
                       + [repr(float(v)) for v in traj.true_states[i]]
                       + [repr(float(v)) for v in traj.inputs[i]]
                       + [repr(float(v)) for v in traj.observations[i]]
                       + [_fmt_support(traj.true_supports[i])])


def load_trajectory_csv(path) -> Trajectory:
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    M = sum(h.startswith("x") for h in header)
    N = sum(h.startswith("q") for h in header)
    first = rows[1]
    x0 = np.array([float(v) for v in first[1:1 + M]])
    data = rows[2:]
    xs = np.array([[float(v) for v in r[1:1 + M]] for r in data]).reshape(-1, M)
    qs = np.array([[float(v) for v in r[1 + M:1 + M + N]] for r in data]).reshape(-1, N)
    ys = np.array([[float(v) for v in r[1 + M + N:1 + M + 2 * N]]
                   for r in data]).reshape(-1, N)
    supports = [_parse_support(r[-1]) for r in data]
    return Trajectory(x0, _parse_support(first[-1]), xs, qs, ys, supports)


def _fmt_support(s) -> str:
    return " ".join(str(m) for m in sorted(s))


def _parse_support(text: str) -> frozenset:
    return frozenset(int(v) for v in text.split())
