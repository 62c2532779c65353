"""Realize the truncated icosahedron from its full distance graph.

With every pairwise distance assigned, the problem is a plain DGP and the
multistart should land on the generating shape up to a rigid motion.
"""

from udgp import (MultistartConfig, build_c60, complete_graph, mde, multistart,
                  procrustes_align, quartic_objective)

x_true = build_c60()
G = complete_graph(x_true)
print(f"{G.n} atoms, {G.num_edges} edges")

res = multistart(G, MultistartConfig(iterations=10, seed=0, K=3))
print(f"quartic objective  {quartic_objective(res.x, G):.3e}")
print(f"mean distance err  {mde(res.x, G):.3e}")
print(f"RMSD after Procrustes  {procrustes_align(res.x, x_true).rmsd:.3e}")
