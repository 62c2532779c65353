"""Solve a four-point planar instance end to end and compare with exhaustive search.

The MILP picks which vertex pair each listed distance belongs to; the DGP step
then places the points. Small instances can be checked against enumeration.
On this seed the MILP proves a zero objective for an assignment no planar
configuration realizes: the diagonally dominant relaxation of the Gram matrix
does not enforce rank, so the DGP step cannot reach the exhaustive optimum.
"""

from udgp import SolveConfig, brute_force_udgp, random_instance, solve_udgp

x_true, delta = random_instance(4, 2, seed=3)
print("distance list:", ", ".join(f"{v:.4f}" for v in delta.values))

result = solve_udgp(delta, SolveConfig(time_limit=60, seed=0))
print(f"MILP status {result.milp.status.value}, objective {result.milp.objective:.3e}, "
      f"{result.milp.nodes} nodes")
for (i, j), v in sorted(zip(map(tuple, result.assignment.pairs), delta.values)):
    print(f"  ({int(i)},{int(j)}) <- {v:.4f}")
print(f"matheuristic: MDE {result.report.mde:.3e}, quartic {result.f:.3e}")

_, _, f_best = brute_force_udgp(delta)
print(f"exhaustive search best quartic {f_best:.3e}")
