"""
IMEX-discretized median solver.

Each agent forms ``u_i = x_i[n] + k sum_j a_ij x_j[n]`` from the current
snapshot and applies the closed-form left inverse of
``x -> (1 + k d_i) x - sgn(o_i - x)``:

    x_i[n+1] = (u_i + s_i) / (1 + k d_i)

with drive ``s_i = +1`` if ``u_i < (1 + k d_i) o_i - 1``, ``-1`` if
``u_i > (1 + k d_i) o_i + 1`` and 0 otherwise. Equivalently
``X[n+1] = B_k X[n] + s / (1 + k d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, NonFiniteInput
from .graph import Graph
from .median import as_observations
from .trajectory import Trajectory, settled_length

__all__ = ["ImexConfig", "s_map", "imex_step", "run_imex"]


@dataclass(frozen=True)
class ImexConfig:
    """
    Parameters
    ----------
    k : float
        Coupling gain.
    max_iters : int
        Maximum number of steps.
    convergence_tol : float
        Stop once ``||X[n+1] - X[n]||_inf`` is at most this.
    settle_tail : float, optional
        After convergence keep iterating until the last ``settle_tail``
        fraction of recorded states all follow the convergence step, so
        tail-window metrics see only the settled regime. Capped by
        `max_iters`.
    """

    k: float
    max_iters: int = 10000
    convergence_tol: float = 1e-12
    settle_tail: Optional[float] = None

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise ValueError(f"k must be positive and finite, got {self.k}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.convergence_tol < 0:
            raise ValueError("convergence_tol must be nonnegative")
        if self.settle_tail is not None and not 0 < self.settle_tail < 1:
            raise ValueError("settle_tail must lie in (0, 1)")


def s_map(u: float, o_i: float, k: float, d_i: float):
    """
    Left inverse of ``x -> (1 + k d_i) x - sgn(o_i - x)``.

    Returns
    -------
    x_next : float
    drive : int
        +1, -1 or 0 according to the branch taken. The boundaries
        ``u = (1 + k d_i) o_i +- 1`` fall in the middle branch.

    >>> s_map(0.0, 1.0, 10.0, 2.0)
    (0.047619047619047616, 1)
    """
    if not all(math.isfinite(v) for v in (u, o_i, k, d_i)):
        raise NonFiniteInput("s_map inputs must be finite")
    c = 1.0 + k * d_i
    if u < c * o_i - 1.0:
        return (u + 1.0) / c, 1
    if u > c * o_i + 1.0:
        return (u - 1.0) / c, -1
    return u / c, 0


def _check_state(g, obs, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n_agents,):
        raise DimensionMismatch(f"state has shape {x.shape}, expected ({g.n_agents},)")
    if len(obs) != g.n_agents:
        raise DimensionMismatch(f"{len(obs)} observations for {g.n_agents} agents")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("state must be finite")
    return x


def _stepper(g: Graph, o: np.ndarray, k: float):
    w = g.weights
    c = 1.0 + k * g.degrees
    lo = c * o - 1.0
    hi = c * o + 1.0

    def step(x):
        u = x + k * (w @ x)
        s = (u < lo).astype(np.int8) - (u > hi).astype(np.int8)
        return (u + s) / c, s

    return step


def imex_step(g: Graph, obs, cfg: ImexConfig, x):
    """
    One synchronous round: every agent reads ``X[n]``, none reads ``X[n+1]``.

    Returns
    -------
    x_next : ndarray, shape (N,)
    drives : ndarray of int8, shape (N,)
    """
    obs = as_observations(obs)
    x = _check_state(g, obs, x)
    return _stepper(g, obs.values, cfg.k)(x)


def run_imex(g: Graph, obs, cfg: ImexConfig, x0) -> Trajectory:
    """Iterate `imex_step` from `x0` until convergence or `cfg.max_iters`."""
    obs = as_observations(obs)
    x = _check_state(g, obs, x0).copy()
    step = _stepper(g, obs.values, cfg.k)
    weights = (1.0 + cfg.k * g.degrees) / np.sum(1.0 + cfg.k * g.degrees)

    states = [x]
    drives = []
    converged_at = None
    limit = cfg.max_iters
    n = 0
    while n < limit:
        x_next, s = step(x)
        states.append(x_next)
        drives.append(s)
        if converged_at is None and np.max(np.abs(x_next - x)) <= cfg.convergence_tol:
            converged_at = n
            if cfg.settle_tail is None:
                break
            limit = min(cfg.max_iters, settled_length(n, cfg.settle_tail) - 1)
        x = x_next
        n += 1

    states = np.array(states)
    return Trajectory(
        method="imex",
        k=float(cfg.k),
        states=states,
        averaged=states @ weights,
        drives=np.array(drives, dtype=np.int8).reshape(-1, g.n_agents),
        converged_at=converged_at,
    )
