"""
The forward-Euler baseline on the same network, at three time steps.

With T_s = 0.05 the agents oscillate around the median every step. A
slightly larger step, 0.07, crosses the linear stability limit
2 / (k lambda_max) = 1/15 and the state blows up. A tiny step, 0.005,
shrinks the oscillation but needs many more rounds to reach the band,
and the steady offset still does not vanish at this gain.
"""

import numpy as np

from imexmedian import (
    ExplicitConfig,
    ImexConfig,
    complete_graph,
    compute_metrics,
    contraction_constants,
    run_explicit,
    run_imex,
)

g = complete_graph(3)
obs = np.array([0.0, 1.0, 100.0])
x0 = np.array([0.0, 1.0, 1.5])
k = 10.0

print("stability limit for T_s:", contraction_constants(g, k).explicit_ts_threshold)

imex = compute_metrics(run_imex(g, obs, ImexConfig(k, settle_tail=0.25), x0), g, obs, k)
print(f"imex      : chattering {imex.chattering_index.max():.3f}  tail dist {imex.sup_tail_dist.max():.4f}"
      f"  iters to band {imex.iters_to_band}")

for t_s in (0.05, 0.07, 0.005):
    traj = run_explicit(g, obs, ExplicitConfig(k, t_s), x0)
    if traj.diverged:
        print(f"T_s={t_s:<6}: diverged after {traj.n_steps} steps, |x| = {np.abs(traj.final).max():.3g}")
        continue
    met = compute_metrics(traj, g, obs, k)
    print(f"T_s={t_s:<6}: chattering {met.chattering_index.max():.3f}  tail dist {met.sup_tail_dist.max():.4f}"
          f"  amplitude {met.steady_state_amplitude.max():.4f}  iters to band {met.iters_to_band}")

# as T_s -> 0 the offset of agent 1 tends to 1/30 at k = 10
print("continuous-time offset at k=10:", 1 / 30)
