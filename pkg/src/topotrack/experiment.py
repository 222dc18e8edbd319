"""Monte-Carlo experiment runner, Jacobian benchmark and observability study.

Experiments are described by JSON documents (see ``presets/``).  A run writes

``rows.csv``
    one row per (experiment, trial, t, tracker) with nmse, EIER, per-step
    wall time and a status flag;
``aggregate.csv``
    per (experiment, t, tracker) means over the trials that produced a
    finite value;
``summary.csv``
    per (experiment, tracker) time averages, one line per sweep point.

Floats are written with ``repr`` so they parse back bit-exactly.
"""
from __future__ import annotations

import copy
import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .graph_core import (build_edge_index_map, build_incidence,
                         laplacian_from_weights, support_indicator, support_of)
from .graph_filter import PolynomialGraphFilter, jacobian_dp, jacobian_naive
from .metrics import eier, normalized_mse, to_db
from .observability import is_t_step_observable, random_linear_problem
from .ssm_sim import ScenarioConfig, builtin_filter, generate, trial_rng
from .trackers import (IstaConfig, NoiseModel, NumericalFailure, Tracker,
                       TrackerState)

log = logging.getLogger(__name__)

ROW_FIELDS = ["experiment", "trial", "t", "tracker", "nmse", "eier",
              "wall_time_s", "status"]
AGG_FIELDS = ["experiment", "t", "tracker", "n_ok", "nmse", "nmse_db", "eier",
              "wall_time_s"]
SUMMARY_FIELDS = ["experiment", "tracker", "n_ok", "nmse", "nmse_db", "eier",
                  "wall_time_s", "failures"]


@dataclass
class TrackerSpec:
    kind: str
    ista: IstaConfig | None = None
    jacobian: str | None = None
    label: str | None = None

    def __post_init__(self):
        if self.kind not in Tracker.KINDS:
            raise ValueError(f"unknown tracker kind {self.kind!r}")
        if self.ista is None and self.kind == "GSP-EKF":
            self.ista = IstaConfig()
        if self.jacobian is None:
            # the plain EKF baseline evaluates the direct Jacobian formula
            self.jacobian = "naive" if self.kind == "EKF" else "dp"
        if self.label is None:
            self.label = self.kind


@dataclass
class ExperimentConfig:
    scenario: ScenarioConfig
    trackers: list[TrackerSpec]
    name: str = "experiment"
    assumed_Q_sigma: float | None = None
    assumed_R_sigma: float | None = None
    init_estimate: str | float = "ones"
    init_covariance_scale: float = 0.25
    mc_trials: int = 1
    eier_threshold: float = 0.1
    output_dir: str | None = None
    seed: int = 0
    record_timing: bool = True
    sweep: list = field(default_factory=list)
    source: dict | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.mc_trials < 1:
            raise ValueError("mc_trials must be >= 1")
        if not self.trackers:
            raise ValueError("at least one tracker is required")
        labels = [t.label for t in self.trackers]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate tracker labels {labels}")

    @property
    def q_sigma(self) -> float:
        if self.assumed_Q_sigma is None:
            return self.scenario.sigma_e
        return self.assumed_Q_sigma

    @property
    def r_sigma(self) -> float:
        if self.assumed_R_sigma is None:
            return self.scenario.sigma_v
        return self.assumed_R_sigma

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        source = copy.deepcopy(d)
        d = copy.deepcopy(d)
        sc = dict(d.pop("scenario"))
        sc["filter"] = _parse_filter(sc.get("filter", {"name": "Lin"}))
        trackers = [_parse_tracker(t) for t in d.pop("trackers")]
        d.pop("description", None)
        return cls(scenario=ScenarioConfig(**sc), trackers=trackers,
                   source=source, **d)

    @classmethod
    def load(cls, path_or_preset) -> "ExperimentConfig":
        p = Path(str(path_or_preset))
        if p.suffix != ".json" and not p.exists():
            return load_preset(str(path_or_preset))
        with open(p) as fh:
            return cls.from_dict(json.load(fh))

    def points(self) -> list[tuple[str, "ExperimentConfig"]]:
        """Expand the sweep into ``(experiment id, config)`` pairs."""
        if not self.sweep:
            return [(self.name, self)]
        out = []
        base = {k: v for k, v in self.source.items() if k != "sweep"}
        for point in self.sweep:
            d = copy.deepcopy(base)
            for key, value in point.get("set", {}).items():
                _set_path(d, key, value)
            cfg = ExperimentConfig.from_dict(d)
            out.append((f"{self.name}/{point['label']}", cfg))
        return out

    def with_overrides(self, **kw) -> "ExperimentConfig":
        d = copy.deepcopy(self.source)
        for k, v in kw.items():
            if v is not None:
                d[k] = v
        return ExperimentConfig.from_dict(d)


def _parse_filter(spec) -> PolynomialGraphFilter:
    if isinstance(spec, PolynomialGraphFilter):
        return spec
    if "coeffs" in spec:
        return PolynomialGraphFilter(tuple(spec["coeffs"]))
    return builtin_filter(spec["name"], spec.get("order"))


def _parse_tracker(spec: dict) -> TrackerSpec:
    spec = dict(spec)
    ista = spec.pop("ista", None)
    if ista is not None:
        ista = dict(ista)
        if "threshold" in ista:
            ista = IstaConfig.constant(ista["threshold"], ista.get("iterations", 1),
                                       ista.get("step", 1.0))
        else:
            ista = IstaConfig(**ista)
    return TrackerSpec(ista=ista, **spec)


def _set_path(d: dict, key: str, value):
    parts = key.split(".")
    if parts[0] == "trackers":
        matches = [t for t in d["trackers"]
                   if parts[1] in (t.get("label"), t.get("kind"))]
        if not matches:
            raise KeyError(f"no tracker {parts[1]!r} for override {key}")
        for t in matches:
            if parts[2:] == ["ista", "threshold"]:
                t["ista"] = {"threshold": value,
                             "iterations": t.get("ista", {}).get("iterations", 1)}
            else:
                _assign(t, parts[2:], value)
        return
    _assign(d, parts, value)


def _assign(d: dict, parts: list, value):
    for p in parts[:-1]:
        d = d.setdefault(p, {})
    d[parts[-1]] = value


def preset_names() -> list[str]:
    files = resources.files("topotrack").joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def load_preset(name: str) -> ExperimentConfig:
    path = resources.files("topotrack").joinpath("presets", f"{name}.json")
    if not path.is_file():
        raise ValueError(f"unknown preset {name!r}; known: {preset_names()}")
    return ExperimentConfig.from_dict(json.loads(path.read_text()))


def preset_description(name: str) -> str:
    path = resources.files("topotrack").joinpath("presets", f"{name}.json")
    return json.loads(path.read_text()).get("description", "")


# --- one trial ---------------------------------------------------------------

def _initial_state(cfg: ExperimentConfig, spec: TrackerSpec, traj, M):
    if spec.kind == "Oracle":
        ind = support_indicator(traj.initial_support, M)
        return TrackerState(traj.initial_state.copy(),
                            cfg.init_covariance_scale * np.diag(ind))
    if cfg.init_estimate == "ones":
        x0 = np.ones(M)
    elif cfg.init_estimate == "zeros":
        x0 = np.zeros(M)
    else:
        x0 = np.full(M, float(cfg.init_estimate))
    return TrackerState(x0, cfg.init_covariance_scale * np.eye(M))


def run_trial(cfg: ExperimentConfig, trial: int, exp_id: str | None = None
              ) -> list[list]:
    """Run every tracker on one trajectory; returns result rows."""
    exp_id = cfg.name if exp_id is None else exp_id
    sc = cfg.scenario
    traj = generate(sc, trial_rng(cfg.seed, trial))
    emap = build_edge_index_map(sc.n_nodes)
    B = build_incidence(emap)
    M = emap.max_edges
    noise = NoiseModel.isotropic(M, sc.n_nodes, cfg.q_sigma, cfg.r_sigma)
    rows = []
    for spec in cfg.trackers:
        tracker = Tracker(spec.kind, sc.filter, B, emap, noise,
                          _initial_state(cfg, spec, traj, M),
                          ista=spec.ista or IstaConfig(), jacobian=spec.jacobian,
                          new_edge_mean=sc.new_edge_mean,
                          support=traj.initial_support)
        failed = None
        for i in range(len(traj)):
            t = i + 1
            if failed is not None:
                rows.append([exp_id, trial, t, spec.label, math.nan, math.nan,
                             math.nan, failed])
                continue
            tic = time.perf_counter()
            try:
                state = tracker.step(traj.inputs[i], traj.observations[i],
                                     traj.true_supports[i])
            except NumericalFailure as exc:
                log.warning("%s trial %d: %s failed at t=%d: %s", exp_id, trial,
                            spec.label, t, exc)
                failed = "numerical-failure"
                rows.append([exp_id, trial, t, spec.label, math.nan, math.nan,
                             math.nan, failed])
                continue
            wall = time.perf_counter() - tic if cfg.record_timing else 0.0
            x = state.estimate
            rows.append([exp_id, trial, t, spec.label,
                         normalized_mse(x, traj.true_states[i]),
                         eier(support_of(x, cfg.eier_threshold),
                              traj.true_supports[i], sc.n_nodes),
                         wall, "ok"])
    return rows


def _trial_job(args):
    cfg, trial, exp_id = args
    return run_trial(cfg, trial, exp_id)


# --- aggregation and output --------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _mean(vals) -> float:
    vals = [v for v in vals if math.isfinite(v)]
    return math.fsum(vals) / len(vals) if vals else math.nan


def aggregate(rows: list[list]) -> list[list]:
    """Per (experiment, t, tracker) means over finite trial values."""
    groups: dict[tuple, list] = {}
    for exp_id, _trial, t, label, nmse, e, wall, _status in rows:
        groups.setdefault((exp_id, t, label), []).append((nmse, e, wall))
    out = []
    for (exp_id, t, label), vals in groups.items():
        nm = _mean([v[0] for v in vals])
        out.append([exp_id, t, label,
                    sum(math.isfinite(v[0]) for v in vals), nm,
                    to_db(nm) if math.isfinite(nm) else math.nan,
                    _mean([v[1] for v in vals]), _mean([v[2] for v in vals])])
    return out


def summarize(agg: list[list], rows: list[list]) -> list[list]:
    """Time averages of the aggregate curves, one line per (experiment, tracker)."""
    groups: dict[tuple, list] = {}
    for exp_id, _t, label, n_ok, nm, _db, e, wall in agg:
        groups.setdefault((exp_id, label), []).append((n_ok, nm, e, wall))
    failures: dict[tuple, set] = {}
    for exp_id, trial, _t, label, *_rest, status in rows:
        if status != "ok":
            failures.setdefault((exp_id, label), set()).add(trial)
    out = []
    for (exp_id, label), vals in groups.items():
        nm = _mean([v[1] for v in vals])
        out.append([exp_id, label, min(v[0] for v in vals), nm,
                    to_db(nm) if math.isfinite(nm) else math.nan,
                    _mean([v[2] for v in vals]), _mean([v[3] for v in vals]),
                    len(failures.get((exp_id, label), ()))])
    return out


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run_experiment(cfg: ExperimentConfig, output_dir=None, parallel: int = 1,
                   progress=None) -> dict:
    """Run all sweep points and trials, write CSVs, return their paths.

    Trials are independent and may run in worker processes; rows are
    collected in (point, trial) order, so output does not depend on
    ``parallel``.
    """
    out = Path(output_dir or cfg.output_dir or f"results/{cfg.name}")
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(pcfg, trial, exp_id) for exp_id, pcfg in cfg.points()
            for trial in range(pcfg.mc_trials)]
    rows: list[list] = []
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            for k, r in enumerate(pool.map(_trial_job, jobs)):
                rows.extend(r)
                if progress:
                    progress(k + 1, len(jobs))
    else:
        for k, job in enumerate(jobs):
            rows.extend(_trial_job(job))
            if progress:
                progress(k + 1, len(jobs))
    agg = aggregate(rows)
    paths = {"rows": out / "rows.csv", "aggregate": out / "aggregate.csv",
             "summary": out / "summary.csv"}
    write_csv(paths["rows"], ROW_FIELDS, rows)
    write_csv(paths["aggregate"], AGG_FIELDS, agg)
    write_csv(paths["summary"], SUMMARY_FIELDS, summarize(agg, rows))
    return paths


# --- Jacobian benchmark ------------------------------------------------------

BENCH_FIELDS = ["N", "P", "method", "median_seconds"]


def random_instance(n_nodes: int, order: int, rng: np.random.Generator,
                    density: float = 1.0):
    """Random weights in [0, 2] (optionally sparse), Gaussian input, NLP filter."""
    emap = build_edge_index_map(n_nodes)
    B = build_incidence(emap)
    x = rng.uniform(0.0, 2.0, emap.max_edges)
    if density < 1.0:
        x *= rng.random(emap.max_edges) < density
    q = rng.standard_normal(n_nodes)
    return builtin_filter("NLP", order), emap, B, x, q


def run_jacobian_bench(n_list, p_list, repeats: int = 3, seed: int = 0,
                       out=None) -> list[list]:
    """Median wall time of the naive and DP Jacobians per (N, P)."""
    rows = []
    if repeats > 0:
        rng = trial_rng(seed)
        for N in n_list:
            for P in p_list:
                filt, emap, B, x, q = random_instance(N, P, rng)
                L = laplacian_from_weights(B, x)
                for method in ("naive", "dp"):
                    times = []
                    for _ in range(repeats):
                        tic = time.perf_counter()
                        if method == "dp":
                            jacobian_dp(filt, x, emap, L, q)
                        else:
                            jacobian_naive(filt, x, B, q)
                        times.append(time.perf_counter() - tic)
                    rows.append([N, P, method, float(np.median(times))])
    if out is not None:
        write_csv(out, BENCH_FIELDS, rows)
    return rows


# --- observability study -----------------------------------------------------

OBS_FIELDS = ["N", "T", "fraction_observable", "mean_rank"]


def run_observability_study(n: int, t_range, trials: int = 100, seed: int = 0,
                            out=None) -> list[list]:
    """Fraction of random first-order problems that are T-step observable."""
    if n < 2:
        raise ValueError("n must be at least 2")
    B = build_incidence(build_edge_index_map(n))
    rows = []
    for T in t_range:
        hits, ranks = 0, []
        for trial in range(trials):
            rng = trial_rng(seed, trial)
            ok, r = is_t_step_observable(random_linear_problem(B, T, rng))
            hits += ok
            ranks.append(r)
        rows.append([n, T, hits / trials if trials else math.nan,
                     _mean([float(r) for r in ranks])])
    if out is not None:
        write_csv(out, OBS_FIELDS, rows)
    return rows
