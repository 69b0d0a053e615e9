"""
A Z_p-tower and its Iwasawa invariants
======================================

We derive the layers of a tower of coverings of the 3-cycle from voltage
data, count spanning trees at each level and recover (lambda, mu, nu) by an
exact fit.
"""

# %%
# Voltages live in Z_2 x Z/2.  The first edge carries (1, 1), every vertex
# has inertia group Gamma = Z_2, so the tower is totally ramified.
from graphtower import fit_invariants, make_section5_voltage, tower_report
from graphtower.voltage import derive, quotient_voltage

vg = make_section5_voltage(p=2, m=3, case="b")
for n in range(4):
    layer = derive(vg, n)
    print(f"level {n}: {layer.graph.num_vertices} vertices, {layer.graph.num_undirected} edges")

# %%
# Dividing out G gives the Z_2-tower underneath.
base = quotient_voltage(vg, "G")
print([derive(base, n).graph.num_undirected for n in range(4)])

# %%
# The 2-adic valuations of the spanning-tree counts grow linearly.
report = tower_report(vg, "full", n_max=5)
print("kappa:", report.kappas)
print("ord_2:", report.ordp)

# %%
# The fit solves for (lambda, mu, nu) over the rationals on three levels
# and checks every later level; no floating point is involved.
fit = fit_invariants(report)
print(f"lambda={fit.lam} mu={fit.mu} nu={fit.nu} from n0={fit.n0}, stabilized={fit.stabilized}")

# %%
# With inertia G instead, the spanning-tree counts pick up a p^n term
# and mu becomes positive.
fit_a = fit_invariants(tower_report(make_section5_voltage(2, 3, "a"), "full", n_max=4))
print(f"case a: lambda={fit_a.lam} mu={fit_a.mu}")
