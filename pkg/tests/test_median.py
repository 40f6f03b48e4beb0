import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imexmedian import EmptyObservations, MedianSet, ObservationSet, dist_to_median, median_objective, median_set


@pytest.mark.parametrize(
    "values, lo, hi",
    [([0, 1, 100], 1, 1), ([0, 1, 2, 100], 1, 2), ([5], 5, 5), ([3, 1, 2, 2], 2, 2), ([7, 7], 7, 7)],
)
def test_median_set_examples(values, lo, hi):
    assert median_set(values) == MedianSet(lo, hi)


def test_empty_observations():
    with pytest.raises(EmptyObservations):
        median_set([])


def test_sorted_values():
    obs = ObservationSet([3.0, -1.0, 2.0])
    np.testing.assert_array_equal(obs.sorted_values, [-1, 2, 3])
    np.testing.assert_array_equal(obs.values, [3, -1, 2])


@pytest.mark.parametrize("x, m, expected", [(1.5, (1, 2), 0.0), (3, (1, 2), 1.0), (0.9, (1, 1), 0.1)])
def test_dist_to_median(x, m, expected):
    assert dist_to_median(x, MedianSet(*m)) == pytest.approx(expected, abs=1e-15)


def test_median_objective_examples():
    assert median_objective(1.0, [0, 1, 100]) == 100.0
    assert median_objective(4.0, [4.0]) == 0.0


@pytest.mark.parametrize("seed", range(40))
def test_median_set_matches_grid_minimizer(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 10))
    o = np.round(rng.uniform(-5, 5, n), 2)
    grid = np.linspace(-6, 6, 12001)
    h = grid[1] - grid[0]
    vals = median_objective(grid, o)
    best = vals.min()
    m = median_set(o)
    minimizers = grid[vals <= best + 1e-9]
    assert np.all(dist_to_median(minimizers, m) <= h)
    for x in np.linspace(m.lo, m.hi, 7):
        assert median_objective(x, o) <= best + 1e-9


finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(finite, min_size=1, max_size=12), st.randoms(use_true_random=False))
def test_median_set_permutation_invariant(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert median_set(values) == median_set(shuffled)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=12), st.integers(-1000, 1000))
def test_median_set_shift(values, c):
    m = median_set(values)
    shifted = median_set([v + c for v in values])
    assert (shifted.lo, shifted.hi) == (m.lo + c, m.hi + c)


@settings(max_examples=200, deadline=None)
@given(st.lists(finite, min_size=1, max_size=12))
def test_median_set_is_ordered(values):
    m = median_set(values)
    assert m.lo <= m.hi
