"""
Accuracy against gain.

Choose k for a requested per-agent accuracy, then sweep k on the
three-agent example and watch the measured tail distance shrink roughly
like 1/k.
"""

import numpy as np

from imexmedian import (
    ImexConfig,
    complete_graph,
    compute_metrics,
    gain_for_tolerance,
    run_imex,
    steady_state_error_bound,
)

g = complete_graph(3)
obs = np.array([0.0, 1.0, 100.0])
x0 = np.array([0.0, 1.0, 1.5])

for eps in (0.5, 0.1, 0.01):
    k = gain_for_tolerance(g, eps)
    print(f"eps={eps:<5} needs k={k:.4f} (3 x bound = {3 * steady_state_error_bound(g, k):.4g})")

print("\n  k     measured   3 x bound")
for k in (5.0, 10.0, 20.0, 50.0, 100.0):
    traj = run_imex(g, obs, ImexConfig(k, settle_tail=0.25), x0)
    met = compute_metrics(traj, g, obs, k)
    print(f"{k:5.0f}   {met.sup_tail_dist.max():.5f}    {3 * steady_state_error_bound(g, k):.5f}")
