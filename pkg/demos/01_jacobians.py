"""
Jacobians and spanning trees
============================

Graphs in Serre's formalism come with a Laplacian, and the torsion of its
cokernel is the group Jac(X) whose order counts spanning trees.
"""

# %%
# Build the multi-cycle Y(3, 2): three vertices on a cycle, with two
# parallel edges between consecutive vertices.
from graphtower import jacobian, kappa, kappa_bruteforce, laplacian_matrix, make_Y

g = make_Y(3, 2)
print(g.num_vertices, "vertices,", g.num_undirected, "edges")
print(laplacian_matrix(g).tolist())

# %%
# The Jacobian is the torsion of the cokernel of the Laplacian.  Its
# invariant factors come from a Smith normal form.
jac = jacobian(g)
print("Jac(Y(3,2)) =", jac, " order", jac.torsion_order)

# %%
# Kirchhoff: the order equals the number of spanning trees.  Here we count
# them twice, once as a principal minor and once by brute force.
print(kappa(g), kappa_bruteforce(g))

# %%
# The whole family follows m * N^(m-1).
for m in range(1, 5):
    print(m, [kappa(make_Y(m, N)) for N in range(1, 6)])
