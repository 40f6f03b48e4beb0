"""
Forward-Euler discretization of the continuous-time median solver,

    x_i[n+1] = x_i[n] + T_s sgn(o_i - x_i[n]) + k T_s sum_j a_ij (x_j[n] - x_i[n]),

kept as the comparison baseline for the IMEX network.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import Graph
from .imex import _check_state
from .median import as_observations
from .trajectory import Trajectory, settled_length

__all__ = ["ExplicitConfig", "explicit_step", "run_explicit", "default_divergence_threshold"]


@dataclass(frozen=True)
class ExplicitConfig:
    """
    `divergence_threshold` bounds ``||X[n]||_inf``; ``None`` selects
    `default_divergence_threshold` for the observations at run time.
    `settle_tail` behaves as in `ImexConfig`.
    """

    k: float
    t_s: float
    max_iters: int = 10000
    convergence_tol: float = 1e-12
    divergence_threshold: Optional[float] = None
    settle_tail: Optional[float] = None

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise ValueError(f"k must be positive and finite, got {self.k}")
        if not (self.t_s >= 0 and math.isfinite(self.t_s)):
            raise ValueError(f"t_s must be nonnegative and finite, got {self.t_s}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.divergence_threshold is not None and not self.divergence_threshold > 0:
            raise ValueError("divergence_threshold must be positive")
        if self.settle_tail is not None and not 0 < self.settle_tail < 1:
            raise ValueError("settle_tail must lie in (0, 1)")


def default_divergence_threshold(obs) -> float:
    return 1e6 * (1.0 + float(np.max(np.abs(as_observations(obs).values))))


def _stepper(g: Graph, o: np.ndarray, k: float, t_s: float):
    w = g.weights
    d = g.degrees

    def step(x):
        return x + t_s * np.sign(o - x) + (k * t_s) * (w @ x - d * x)

    return step


def explicit_step(g: Graph, obs, cfg: ExplicitConfig, x) -> np.ndarray:
    obs = as_observations(obs)
    x = _check_state(g, obs, x)
    return _stepper(g, obs.values, cfg.k, cfg.t_s)(x)


def run_explicit(g: Graph, obs, cfg: ExplicitConfig, x0) -> Trajectory:
    """
    Iterate `explicit_step`. The run halts with ``diverged=True`` as soon as
    the state norm exceeds the divergence threshold or becomes non-finite.
    """
    obs = as_observations(obs)
    x = _check_state(g, obs, x0).copy()
    step = _stepper(g, obs.values, cfg.k, cfg.t_s)
    threshold = cfg.divergence_threshold or default_divergence_threshold(obs)

    states = [x]
    converged_at = None
    diverged = False
    limit = cfg.max_iters
    n = 0
    while n < limit:
        x_next = step(x)
        states.append(x_next)
        peak = np.max(np.abs(x_next))
        if not peak <= threshold:
            diverged = True
            break
        if converged_at is None and np.max(np.abs(x_next - x)) <= cfg.convergence_tol:
            converged_at = n
            if cfg.settle_tail is None:
                break
            limit = min(cfg.max_iters, settled_length(n, cfg.settle_tail) - 1)
        x = x_next
        n += 1

    states = np.array(states)
    return Trajectory(
        method="explicit",
        k=float(cfg.k),
        t_s=float(cfg.t_s),
        states=states,
        averaged=states.mean(axis=1),
        converged_at=converged_at,
        diverged=diverged,
    )
