"""Flags, growth vectors and where equiregularity breaks.

Heisenberg and Engel are equiregular everywhere.  Martinet is not: on
the plane y = 0 the bracket [X, Y] = -2y dz dies and one more bracket is
needed, so the growth vector jumps from (2, 3) to (2, 2, 3).
"""

import numpy as np

from popp.builtins import builtin
from popp.flag import adapted_frame, check_equiregular, growth_vector, hausdorff_dimension

for name, q in [("heisenberg", (0, 0, 0)), ("engel", (0, 0, 0, 0)), ("carnot-k3", (0,) * 6)]:
    s = builtin(name)
    g = growth_vector(s, q)
    frame = adapted_frame(s, q)
    print(f"{name:11s} growth {g}, Hausdorff dimension {hausdorff_dimension(g)}, "
          f"frame words {frame.word_labels()}")

m = builtin("martinet")
print("\nMartinet away from and on the singular plane:")
for q in [(0, 1, 0), (0, 0, 0)]:
    print(f"  {q}: {growth_vector(m, q)}")

axis = np.linspace(-1, 1, 5)
grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), -1).reshape(-1, 3)
rep = check_equiregular(m, grid)
print("\n5x5x5 grid on [-1, 1]^3:")
for g, pts in rep.strata.items():
    ys = sorted({p[1] for p in pts})
    print(f"  {g}: {len(pts)} points, y in {ys if len(ys) < 3 else [ys[0], '...', ys[-1]]}")
