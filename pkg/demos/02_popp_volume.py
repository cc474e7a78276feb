"""Popp's volume from the Gram matrices B_j, checked against the min-norm oracle.

The density does not depend on which adapted frame we use.  For Martinet
we compare the bracket frame (X, Y, [X, Y]) with (X, Y, dz): the adapted
densities differ, but after the change to dx dy dz both give
1 / (2 sqrt(2) |y|).
"""

import math

from popp.builtins import builtin
from popp.flag import adapted_frame
from popp.polyvec import VectorField
from popp.report import oracle_deviation
from popp.volume import adapted_constants, gram_matrices, popp_density_adapted, popp_density_coordinates

m = builtin("martinet")
dz = VectorField.coordinate(3, 2)
print("Martinet, two adapted frames:")
for y in (0.25, 1.0, -2.0):
    q = (0.0, y, 0.0)
    row = []
    for label, comp in (("[X,Y]", None), ("dz", [dz])):
        f = adapted_frame(m, q, completion=comp)
        g = gram_matrices(adapted_constants(f))
        row.append(f"{label}: det B_2 = {g.dets[1]:7.4f}, adapted {popp_density_adapted(g):.6f}, "
                   f"dx dy dz {popp_density_coordinates(f, g):.6f}")
    print(f"  y = {y:5}  " + "\n              ".join(row))
    print(f"              expected 1/(2 sqrt 2 |y|) = {1 / (2 * math.sqrt(2) * abs(y)):.6f}")

print("\nOracle check, relative gap between the min-norm Gram matrix and B_j^-1:")
for name in ("heisenberg", "engel", "carnot-k3"):
    s = builtin(name)
    q = tuple(0.3 for _ in range(s.nvars))
    f = adapted_frame(s, q)
    g = gram_matrices(adapted_constants(f))
    print(f"  {name:11s} det B_j = {[round(d, 12) for d in g.dets]}, "
          f"density {popp_density_coordinates(f, g):.12g}, gap {oracle_deviation(f, q):.1e}")
