"""
Undirected weighted communication graphs.

Agents are numbered 1..N in the public edge-list API (``build_graph``) and
0..N-1 everywhere else (arrays, neighbor lists).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DisconnectedGraph,
    DuplicateEdge,
    GraphError,
    NonPositiveWeight,
    SelfLoop,
)

__all__ = [
    "Graph",
    "build_graph",
    "graph_from_weights",
    "complete_graph",
    "ring_graph",
    "star_graph",
    "path_graph",
    "laplacian",
    "is_connected",
]


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Immutable undirected connected graph.

    Attributes
    ----------
    n_agents : int
        Number of agents N.
    weights : ndarray, shape (N, N)
        Symmetric adjacency weights with zero diagonal. Read-only.
    degrees : ndarray, shape (N,)
        Weighted degrees, row sums of `weights`. Read-only.
    neighbors : tuple of tuple of int
        0-based neighbor indices of each agent.
    """

    n_agents: int
    weights: np.ndarray
    degrees: np.ndarray
    neighbors: tuple

    @property
    def is_bipartite(self) -> bool:
        color = [-1] * self.n_agents
        color[0] = 0
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in self.neighbors[i]:
                if color[j] < 0:
                    color[j] = 1 - color[i]
                    queue.append(j)
                elif color[j] == color[i]:
                    return False
        return True

    def __repr__(self):
        n_edges = sum(len(nb) for nb in self.neighbors) // 2
        return f"Graph(n_agents={self.n_agents}, n_edges={n_edges})"


def is_connected(weights: np.ndarray) -> bool:
    """Breadth-first reachability from agent 0 over positive-weight edges."""
    n = weights.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(weights[i] > 0):
            if not seen[j]:
                seen[j] = True
                queue.append(j)
    return bool(seen.all())


def graph_from_weights(weights) -> Graph:
    """
    Validate a dense weight matrix and wrap it as a `Graph`.

    Parameters
    ----------
    weights : array_like, shape (N, N)
        Symmetric, nonnegative, zero diagonal.

    Raises
    ------
    SelfLoop, NonPositiveWeight, GraphError, DisconnectedGraph
    """
    w = np.array(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
        raise GraphError(f"weights must be a square matrix, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise GraphError("weights must be finite")
    if np.any(np.diag(w) != 0):
        raise SelfLoop("diagonal weights must be zero")
    if np.any(w < 0):
        raise NonPositiveWeight("weights must be nonnegative")
    if not np.array_equal(w, w.T):
        raise GraphError("weights must be symmetric (undirected graph)")
    n = w.shape[0]
    if n < 2:
        raise DisconnectedGraph("a connected graph needs at least two agents")
    if not is_connected(w):
        raise DisconnectedGraph("communication graph is not connected")
    degrees = w.sum(axis=1)
    neighbors = tuple(tuple(int(j) for j in np.flatnonzero(w[i] > 0)) for i in range(n))
    w.setflags(write=False)
    degrees.setflags(write=False)
    return Graph(n_agents=n, weights=w, degrees=degrees, neighbors=neighbors)


def build_graph(n_agents: int, edges: Iterable[Sequence]) -> Graph:
    """
    Build a graph from a 1-based edge list of ``(i, j, weight)`` triples.

    A pair given twice, in either orientation, is rejected.
    """
    n = int(n_agents)
    if n < 1:
        raise GraphError("n_agents must be positive")
    w = np.zeros((n, n))
    for edge in edges:
        if len(edge) != 3:
            raise GraphError(f"edge must be (i, j, weight), got {edge!r}")
        i, j, weight = int(edge[0]), int(edge[1]), float(edge[2])
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphError(f"edge ({i}, {j}) out of range 1..{n}")
        if i == j:
            raise SelfLoop(f"self-loop at agent {i}")
        if not weight > 0 or not np.isfinite(weight):
            raise NonPositiveWeight(f"edge ({i}, {j}) has weight {weight}")
        if w[i - 1, j - 1] != 0:
            raise DuplicateEdge(f"edge ({i}, {j}) given more than once")
        w[i - 1, j - 1] = w[j - 1, i - 1] = weight
    return graph_from_weights(w)


def complete_graph(n_agents: int, weight: float = 1.0) -> Graph:
    n = int(n_agents)
    return build_graph(n, [(i, j, weight) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def ring_graph(n_agents: int, weight: float = 1.0) -> Graph:
    n = int(n_agents)
    if n < 3:
        return path_graph(n, weight)
    return build_graph(n, [(i, i % n + 1, weight) for i in range(1, n + 1)])


def star_graph(n_agents: int, weight: float = 1.0) -> Graph:
    """Agent 1 is the center."""
    n = int(n_agents)
    return build_graph(n, [(1, j, weight) for j in range(2, n + 1)])


def path_graph(n_agents: int, weight: float = 1.0) -> Graph:
    n = int(n_agents)
    return build_graph(n, [(i, i + 1, weight) for i in range(1, n)])


def laplacian(g: Graph) -> np.ndarray:
    """Graph Laplacian D - A."""
    return np.diag(g.degrees) - g.weights
