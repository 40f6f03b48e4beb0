"""Recorded solver runs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    States of a synchronous network run.

    Attributes
    ----------
    states : ndarray, shape (n_steps + 1, N)
        ``X[0], ..., X[n_steps]``.
    averaged : ndarray, shape (n_steps + 1,)
        Weighted average ``w^T X[n]`` (``w_k`` for IMEX, uniform for the
        explicit method).
    drives : ndarray of int8, shape (n_steps, N), or None
        Per-agent drive ``s_hat_i[n]`` in {-1, 0, +1}; IMEX runs only.
    converged_at : int or None
        First ``n`` with ``||X[n+1] - X[n]||_inf <= convergence_tol``.
    diverged : bool
        Explicit runs only: the state norm left the divergence threshold.
    """

    method: str
    k: float
    states: np.ndarray
    averaged: np.ndarray
    drives: Optional[np.ndarray] = None
    converged_at: Optional[int] = None
    diverged: bool = False
    t_s: Optional[float] = None

    @property
    def n_steps(self) -> int:
        return self.states.shape[0] - 1

    @property
    def n_agents(self) -> int:
        return self.states.shape[1]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def converged(self) -> bool:
        return self.converged_at is not None


MIN_METRIC_LENGTH = 10


def settled_length(converged_at: int, tail_fraction: float, min_length: int = MIN_METRIC_LENGTH) -> int:
    """
    Smallest state count, at least `min_length`, whose last
    ``ceil(tail_fraction * count)`` states all come after a convergence
    detected at step `converged_at`.
    """
    first_settled = converged_at + 1
    count = max(first_settled + 1, min_length)
    while count - int(np.ceil(tail_fraction * count)) < first_settled:
        count += 1
    return count
