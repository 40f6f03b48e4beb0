"""Random instances and independent oracles shared by the tests."""

import itertools

import numpy as np

from imexmedian import DisconnectedGraph, complete_graph, graph_from_weights


def k3():
    return complete_graph(3, 1.0)


PAPER_OBS = np.array([0.0, 1.0, 100.0])
PAPER_X0 = np.array([0.0, 1.0, 1.5])


def random_weights(rng, n, p=0.5, low=0.5, high=2.0):
    m = np.triu((rng.random((n, n)) < p) * rng.uniform(low, high, (n, n)), 1)
    return m + m.T


def random_connected_graph(rng, n_min=3, n_max=10, non_bipartite=False):
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        try:
            g = graph_from_weights(random_weights(rng, n))
        except DisconnectedGraph:
            continue
        if non_bipartite and g.is_bipartite:
            continue
        return g


def reachable_by_matrix_powers(weights):
    """Connectivity oracle: (I + A)^(N-1) has no zero entry iff connected."""
    n = weights.shape[0]
    reach = np.eye(n, dtype=bool)
    adj = (weights > 0) | np.eye(n, dtype=bool)
    for _ in range(n - 1):
        reach = (reach.astype(int) @ adj.astype(int)) > 0
    return bool(reach.all())


def bipartite_by_enumeration(weights):
    n = weights.shape[0]
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if weights[i, j] > 0]
    for colors in itertools.product((0, 1), repeat=n):
        if all(colors[i] != colors[j] for i, j in edges):
            return True
    return False
