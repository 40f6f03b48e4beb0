"""
Contraction constants of the IMEX iteration matrix on a few graphs.

B_k = I - D_k L is row-stochastic with left eigenvector w_k proportional
to 1 + k d_i. ||B_k^n - 1 w_k^T|| decays like C_k q_k^n. On bipartite
graphs q_k tends to 1 as k grows, so the error bound stops improving.
"""

from imexmedian import (
    complete_graph,
    contraction_constants,
    path_graph,
    ring_graph,
    star_graph,
    verify_decay_bound,
)

graphs = {
    "K3": complete_graph(3),
    "ring 5": ring_graph(5),
    "ring 6 (bipartite)": ring_graph(6),
    "star 4 (bipartite)": star_graph(4),
    "path 4 (bipartite)": path_graph(4),
}

for name, g in graphs.items():
    print(name)
    for k in (1.0, 10.0, 100.0):
        rep = contraction_constants(g, k)
        check = verify_decay_bound(g, k, 50)
        print(f"  k={k:<5} C_k={rep.c_k:.4f} q_k={rep.q_k:.4f} bound={rep.error_bound:.4g}"
              f" decay ratio<={check.max_ratio:.4f}")
    rep = contraction_constants(g, 1.0)
    print(f"  limits: C_inf={rep.c_inf:.4f} q_inf={rep.q_inf:.4f}")
