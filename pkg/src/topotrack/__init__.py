"""Tracking sparse time-varying graph topologies from graph-filtered signals."""
from .graph_core import (EdgeIndexMap, build_edge_index_map, build_incidence,
                         laplacian_from_edges, laplacian_from_weights,
                         support_of)
from .graph_filter import (PolynomialGraphFilter, apply_filter, jacobian_dp,
                           jacobian_naive, linear_observation, measurement)
from .metrics import eier, normalized_mse, to_db
from .observability import (ObservabilityProblem, is_t_step_observable,
                            min_observability_horizon, observability_matrix)
from .ssm_sim import ScenarioConfig, Trajectory, builtin_filter, generate
from .trackers import (IstaConfig, NoiseModel, NumericalFailure,
                       StateTransition, SupportMask, Tracker, TrackerState,
                       ekf_step, gsp_ekf_step, innovation_moments,
                       ista_update, linear_kf_step, oracle_step, predict,
                       soft_threshold)

__version__ = "0.1.0"
