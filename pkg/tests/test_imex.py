import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from imexmedian import (
    DimensionMismatch,
    ImexConfig,
    NonFiniteInput,
    build_graph,
    imex_step,
    iteration_matrix,
    left_eigenvector,
    median_set,
    run_imex,
    s_map,
    steady_state_error_bound,
)
from imexmedian.median import dist_to_median

from helpers import PAPER_OBS, PAPER_X0, k3, random_connected_graph


def test_s_map_examples():
    x, s = s_map(0.0, 1.0, 10.0, 2.0)
    assert (x, s) == (pytest.approx(1 / 21, abs=1e-16), 1)
    x, s = s_map(23.0, 1.0, 10.0, 2.0)
    assert (x, s) == (pytest.approx(22 / 21, abs=1e-15), -1)


@pytest.mark.parametrize("o, k, d", [(1.0, 10.0, 2.0), (-3.5, 0.2, 1.5), (0.0, 7.0, 4.0)])
def test_s_map_at_observation(o, k, d):
    assert s_map((1 + k * d) * o, o, k, d) == (pytest.approx(o, abs=1e-15), 0)


def test_s_map_boundaries_in_middle_band():
    c = 21.0
    for u in (c - 1, c + 1):
        x, s = s_map(u, 1.0, 10.0, 2.0)
        assert s == 0
        assert x == pytest.approx(u / c)
    # the two adjacent branches agree at each boundary
    assert (c - 1 + 1) / c == pytest.approx((c - 1) / c + 1 / c)


def test_s_map_rejects_non_finite():
    with pytest.raises(NonFiniteInput):
        s_map(float("nan"), 0.0, 1.0, 1.0)


def _sgn(v):
    return (v > 0) - (v < 0)


@settings(max_examples=300, deadline=None)
@given(
    st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-2, 10),
)
def test_left_inverse_identity(x, o, k, d):
    # below this separation the sign of o - x is not resolvable in u
    assume(x == o or abs(x - o) > 1e-12 * (1 + abs(o)))
    u = (1 + k * d) * x - _sgn(o - x)
    x_back, _ = s_map(u, o, k, d)
    assert math.isclose(x_back, x, rel_tol=1e-12, abs_tol=1e-12 * (1 + abs(u)) / (1 + k * d))


def test_imex_step_paper_example():
    x, s = imex_step(k3(), PAPER_OBS, ImexConfig(10.0), PAPER_X0)
    np.testing.assert_allclose(x, [24 / 21, 17 / 21, 12.5 / 21], rtol=0, atol=1e-15)
    np.testing.assert_array_equal(s, [-1, 1, 1])


def test_imex_step_common_observation_fixed_point():
    g = random_connected_graph(np.random.default_rng(0))
    c = 2.5
    x, s = imex_step(g, np.full(g.n_agents, c), ImexConfig(3.0), np.full(g.n_agents, c))
    np.testing.assert_allclose(x, c, rtol=1e-15)
    assert not s.any()


def test_imex_step_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        imex_step(k3(), PAPER_OBS, ImexConfig(1.0), [0.0, 1.0])
    with pytest.raises(DimensionMismatch):
        imex_step(k3(), [0.0, 1.0], ImexConfig(1.0), PAPER_X0)


def _matrix_form(g, o, k, x, s):
    return iteration_matrix(g, k) @ x + s / (1 + k * g.degrees)


def test_imex_step_matrix_form_single_edge():
    g = build_graph(2, [(1, 2, 1.5)])
    for x in ([0.0, 4.0], [3.0, -2.0], [1.0, 1.0]):
        x = np.array(x)
        x_next, s = imex_step(g, [0.5, 1.0], ImexConfig(2.0), x)
        np.testing.assert_allclose(x_next, _matrix_form(g, None, 2.0, x, s), rtol=0, atol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_drive_signs_match_thresholds(seed):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(rng)
    k = float(rng.uniform(0.5, 50))
    o = rng.uniform(-10, 10, g.n_agents)
    x = rng.uniform(-10, 10, g.n_agents)
    _, s = imex_step(g, o, ImexConfig(k), x)
    c = 1 + k * g.degrees
    u = x + k * g.weights @ x
    np.testing.assert_array_equal(s == -1, u > c * o + 1)
    np.testing.assert_array_equal(s == 1, u < c * o - 1)


def test_run_imex_paper_scenario():
    traj = run_imex(k3(), PAPER_OBS, ImexConfig(10.0), PAPER_X0)
    assert traj.converged
    assert np.all(np.abs(traj.final - 1.0) <= 0.15)
    # once the drive pattern stops changing the state is constant
    assert np.all(traj.drives[-5:] == traj.drives[-1])


def test_run_imex_zero_trajectory():
    traj = run_imex(k3(), np.zeros(3), ImexConfig(10.0), np.zeros(3))
    assert traj.converged_at == 0
    assert np.all(traj.states == 0)


def test_settle_tail_extends_after_convergence():
    short = run_imex(k3(), PAPER_OBS, ImexConfig(10.0), PAPER_X0)
    long = run_imex(k3(), PAPER_OBS, ImexConfig(10.0, settle_tail=0.25), PAPER_X0)
    assert long.converged_at == short.converged_at
    n_tail = math.ceil(0.25 * long.states.shape[0])
    assert long.states.shape[0] - n_tail >= long.converged_at + 1
    np.testing.assert_array_equal(long.states[: short.states.shape[0]], short.states)


@pytest.mark.parametrize("seed", range(10))
def test_averaged_recursion_and_matrix_form(seed):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(rng)
    k = float(rng.uniform(1, 30))
    o = rng.uniform(-10, 10, g.n_agents)
    traj = run_imex(g, o, ImexConfig(k, max_iters=300), rng.uniform(-10, 10, g.n_agents))
    c = 1 + k * g.degrees
    expected = traj.drives.sum(axis=1) / c.sum()
    np.testing.assert_allclose(np.diff(traj.averaged), expected, rtol=0, atol=1e-12)
    b = iteration_matrix(g, k)
    pred = traj.states[:-1] @ b.T + traj.drives / c
    np.testing.assert_allclose(traj.states[1:], pred, rtol=0, atol=1e-12)
    assert set(np.unique(traj.drives)) <= {-1, 0, 1}


@pytest.mark.parametrize("seed", range(8))
def test_drift_sign_outside_median_band(seed):
    rng = np.random.default_rng(50 + seed)
    g = random_connected_graph(rng, n_max=7)
    k = float(rng.uniform(5, 40))
    o = rng.uniform(-10, 10, g.n_agents)
    x0 = rng.uniform(-30, 30, g.n_agents)
    traj = run_imex(g, o, ImexConfig(k, max_iters=5000), x0)
    eps = 3 * steady_state_error_bound(g, k)
    m = median_set(o)
    w = left_eigenvector(g, k)
    states = traj.states[:-1]
    avg = states @ w
    disagreement = np.linalg.norm(states - avg[:, None], axis=1)
    settled = disagreement <= eps / 3
    total = traj.drives.sum(axis=1)
    above = settled & (avg >= m.hi + 2 * eps / 3)
    below = settled & (avg <= m.lo - 2 * eps / 3)
    assert np.all(total[above] <= -1)
    assert np.all(total[below] >= 1)


def test_random_run_within_bound():
    rng = np.random.default_rng(11)
    g = random_connected_graph(rng, n_min=5, n_max=5)
    o = rng.uniform(-10, 10, 5)
    k = 50.0
    traj = run_imex(g, o, ImexConfig(k, max_iters=200000, settle_tail=0.25), rng.uniform(-10, 10, 5))
    assert traj.converged
    tail = traj.states[-math.ceil(0.25 * traj.states.shape[0]):]
    assert np.max(dist_to_median(tail, median_set(o))) <= 3 * steady_state_error_bound(g, k)


def test_config_validation():
    with pytest.raises(ValueError):
        ImexConfig(0.0)
    with pytest.raises(ValueError):
        ImexConfig(1.0, max_iters=0)
    with pytest.raises(ValueError):
        ImexConfig(1.0, settle_tail=1.0)
