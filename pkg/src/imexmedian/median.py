"""
Relaxed median of a finite collection of reals.

For odd N the median set is the middle order statistic; for even N it is
the closed interval between the two middle order statistics. It coincides
with the set of minimizers of ``sum_i |o_i - x|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyObservations, NonFiniteInput

__all__ = [
    "ObservationSet",
    "MedianSet",
    "as_observations",
    "median_set",
    "dist_to_median",
    "median_objective",
]


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Per-agent reference values ``o_i`` and their sorted copy."""

    values: np.ndarray
    sorted_values: np.ndarray = field(init=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size == 0:
            raise EmptyObservations("at least one observation is required")
        if not np.all(np.isfinite(v)):
            raise NonFiniteInput("observations must be finite")
        v.setflags(write=False)
        s = np.sort(v, kind="stable")
        s.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sorted_values", s)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class MedianSet:
    """Closed interval ``[lo, hi]``; a single point when ``lo == hi``."""

    lo: float
    hi: float

    def __contains__(self, x):
        return self.lo <= x <= self.hi


def as_observations(obs) -> ObservationSet:
    return obs if isinstance(obs, ObservationSet) else ObservationSet(obs)


def median_set(obs) -> MedianSet:
    """
    Median set of the observations.

    >>> median_set([0, 1, 100])
    MedianSet(lo=1.0, hi=1.0)
    >>> median_set([0, 1, 2, 100])
    MedianSet(lo=1.0, hi=2.0)
    """
    s = as_observations(obs).sorted_values
    n = s.size
    if n % 2:
        m = float(s[(n - 1) // 2])
        return MedianSet(m, m)
    return MedianSet(float(s[n // 2 - 1]), float(s[n // 2]))


def dist_to_median(x, m: MedianSet):
    """Distance from `x` (scalar or array, elementwise) to the interval `m`."""
    x = np.asarray(x, dtype=float)
    d = np.maximum(0.0, np.maximum(m.lo - x, x - m.hi))
    return float(d) if d.ndim == 0 else d


def median_objective(x, obs):
    """``sum_i |o_i - x|``, vectorized over `x`."""
    v = as_observations(obs).values
    x = np.asarray(x, dtype=float)
    val = np.abs(v - x[..., None]).sum(axis=-1)
    return float(val) if val.ndim == 0 else val
