"""
Checking Kida's formula
=======================

For a Z_p x G tower we compare lambda of the full tower with lambda of
its Z_p-quotient, corrected by the local ramification terms.
"""

# %%
from graphtower import kida_check, limit_ramification, make_section5_voltage
from graphtower.reports import kida_table

# %%
# Inertia Gamma x G at every vertex.  The identity
# lambda~ + 1 = #G (lambda + 1) - sum_v n_v (m_v - 1) applies.
vg = make_section5_voltage(2, 3, "c")
for lim in limit_ramification(vg):
    print(vg.base.vertices[lim.vertex], "m_inf =", lim.m_inf, "n_inf =", lim.n_inf)
print(kida_table(kida_check(vg, n_max=4)))

# %%
# Inertia G only.  Condition (star) fails at every vertex, so the correction
# terms are undefined.  The full tower has mu equal to the cycle length.
report = kida_check(make_section5_voltage(2, 3, "a"), n_max=4)
print("star holds:", report.star_holds, " mu~ =", report.mu_tilde, " verdict:", report.verdict)

# %%
# Random voltage graphs with a different inertia group at each vertex.
# A voltage such as p^2 on a loop only starts to matter from level 3 on,
# so some towers need more levels before the fit is certified (level 8
# has a few hundred vertices and takes under a minute).
import random

from graphtower.families import random_voltage_graph
from graphtower.iwasawa import NotStabilizedError

rng = random.Random(1)
for _ in range(3):
    vg = random_voltage_graph(rng, 2, (2,), max_vertices=3, max_edges=4)
    for n_max in (4, 8):
        try:
            r = kida_check(vg, n_max=n_max)
        except NotStabilizedError as exc:
            print(f"n_max={n_max}: {exc}")
            continue
        print(f"n_max={n_max}: star={r.star_holds} mu={r.mu_base} mu~={r.mu_tilde} "
              f"lhs={r.lhs} rhs={r.rhs} verdict={r.verdict}")
        break
