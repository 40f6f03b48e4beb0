"""
Post-processing of recorded trajectories.

The tail window is the last ``ceil(tail_fraction * len)`` recorded states;
suprema over it stand in for ``limsup`` as ``n -> infinity``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import TrajectoryTooShort
from .graph import Graph
from .median import as_observations, dist_to_median, median_set
from .spectral import left_eigenvector, steady_state_error_bound
from .trajectory import MIN_METRIC_LENGTH as MIN_LENGTH, Trajectory

__all__ = [
    "RunMetrics",
    "tail_window",
    "chattering_index",
    "compute_metrics",
    "TheoremCheck",
    "theorem1_check",
]


@dataclass(frozen=True, eq=False)
class RunMetrics:
    """
    Per-agent arrays have shape (N,). `iters_to_band` is None when the run
    never has every agent within `band` of the median set.
    """

    final_dist_to_median: np.ndarray
    sup_tail_dist: np.ndarray
    disagreement_norm: float
    chattering_index: np.ndarray
    steady_state_amplitude: np.ndarray
    iters_to_band: Optional[int]
    band: float
    tail_length: int


def tail_window(states: np.ndarray, tail_fraction: float) -> np.ndarray:
    length = states.shape[0]
    return states[length - int(math.ceil(tail_fraction * length)):]


def chattering_index(tail: np.ndarray, zero_tol: Optional[float] = None) -> np.ndarray:
    """
    Per-agent sign flips of the increments ``x_i[n+1] - x_i[n]`` over the
    window, divided by the window length.

    Increments with magnitude at most `zero_tol` count as zero and never
    flip; the default is ``1e-12 * (1 + max |x|)`` to ignore round-off at a
    fixed point.
    """
    if zero_tol is None:
        finite = tail[np.isfinite(tail)]
        zero_tol = 1e-12 * (1.0 + (np.max(np.abs(finite)) if finite.size else 0.0))
    inc = np.diff(tail, axis=0)
    sgn = np.where(np.abs(inc) > zero_tol, np.sign(inc), 0.0)
    flips = (sgn[1:] * sgn[:-1] < 0).sum(axis=0)
    return flips / tail.shape[0]


def compute_metrics(
    traj: Trajectory,
    g: Graph,
    obs,
    k: float,
    tail_fraction: float = 0.25,
    band: float = 0.1,
) -> RunMetrics:
    """
    Summarize a trajectory against the median set of `obs`.

    ``disagreement_norm`` is the largest Euclidean norm of
    ``(I - 1 w_k^T) X[n]`` over the tail window.
    """
    if not 0 < tail_fraction <= 0.5:
        raise ValueError("tail_fraction must lie in (0, 0.5]")
    length = traj.states.shape[0]
    if length < MIN_LENGTH:
        raise TrajectoryTooShort(f"trajectory has {length} states, need at least {MIN_LENGTH}")
    obs = as_observations(obs)
    m = median_set(obs)
    states = traj.states
    tail = tail_window(states, tail_fraction)

    w = left_eigenvector(g, k)
    disagreement = tail - (tail @ w)[:, None]

    dist_all = dist_to_median(states, m)
    inside = np.flatnonzero(np.all(dist_all <= band, axis=1))

    return RunMetrics(
        final_dist_to_median=dist_all[-1],
        sup_tail_dist=dist_to_median(tail, m).max(axis=0),
        disagreement_norm=float(np.max(np.linalg.norm(disagreement, axis=1))),
        chattering_index=chattering_index(tail),
        steady_state_amplitude=tail.max(axis=0) - tail.min(axis=0),
        iters_to_band=int(inside[0]) if inside.size else None,
        band=float(band),
        tail_length=tail.shape[0],
    )


@dataclass(frozen=True, eq=False)
class TheoremCheck:
    """Measured per-agent tail distance against the allowed accuracy."""

    measured: np.ndarray
    allowed: float
    error_bound: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.measured <= self.allowed))

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"theorem check {verdict}: max tail distance {np.max(self.measured):.6g}"
            f" <= allowed {self.allowed:.6g} (3 x bound {self.error_bound:.6g})"
        )


def theorem1_check(traj: Trajectory, g: Graph, obs, k: float, tail_fraction: float = 0.25) -> TheoremCheck:
    """
    Compare each agent's tail distance to the median set with
    ``3 * steady_state_error_bound(g, k)``.

    The convergence argument leaves a third of the accuracy for
    disagreement and two thirds for the drift of the weighted average, so
    the disagreement bound times three is the per-agent accuracy asserted.
    """
    bound = steady_state_error_bound(g, k)
    met = compute_metrics(traj, g, obs, k, tail_fraction)
    return TheoremCheck(measured=met.sup_tail_dist, allowed=3.0 * bound, error_bound=bound)
