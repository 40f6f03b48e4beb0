"""Discrete-time distributed median solver by Implicit-Explicit discretization."""

from .errors import *  # noqa: F401,F403
from .explicit import ExplicitConfig, explicit_step, run_explicit
from .graph import (
    Graph,
    build_graph,
    complete_graph,
    graph_from_weights,
    laplacian,
    path_graph,
    ring_graph,
    star_graph,
)
from .imex import ImexConfig, imex_step, run_imex, s_map
from .median import MedianSet, ObservationSet, dist_to_median, median_objective, median_set
from .metrics import RunMetrics, compute_metrics, theorem1_check
from .spectral import (
    SpectralReport,
    contraction_constants,
    gain_for_tolerance,
    iteration_matrix,
    left_eigenvector,
    steady_state_error_bound,
    symmetric_eigs,
    verify_decay_bound,
)
from .trajectory import Trajectory

__version__ = "0.1.0"
