"""The canonical sub-Laplacian and an integration-by-parts check.

On Carnot groups Popp's volume is Haar measure and the sub-Laplacian is
a plain sum of squares.  Martinet picks up a first-order term -1/y along
Y, which we also recover by switching to Lebesgue measure.
"""

import math

from popp.builtins import builtin
from popp.flag import adapted_frame
from popp.polyvec import Poly
from popp.sublap import apply_sublaplacian, frame_divergence, mu_divergence_shift, sublaplacian_coeffs, symmetry_check

for name in ("heisenberg", "engel", "carnot-k3"):
    s = builtin(name)
    q = tuple(0.4 for _ in range(s.nvars))
    a = sublaplacian_coeffs(adapted_frame(s, q)).coefficients
    print(f"{name:11s} first-order coefficients {[f'{v:.1e}' for v in a]}")

m = builtin("martinet")
print("\nMartinet, Delta = X^2 + Y^2 + a_2 Y:")
for y in (0.25, 0.5, 1.0, 2.0):
    q = (0.0, y, 0.0)
    f = adapted_frame(m, q)
    div = frame_divergence(f, q, 1)
    # Lebesgue = (2 sqrt 2 |y|) * Popp, and Y log(2 sqrt 2 |y|) = 1/y
    print(f"  y = {y:4}: a_2 = {div:+.9f} (closed form {-1 / y:+.9f}), "
          f"Lebesgue divergence {mu_divergence_shift(div, 1 / y):+.1e}")

x, y, z = Poly.variables(3)
print(f"\nDelta(y^2) at (0, 1, 0) = {apply_sublaplacian(adapted_frame(m, (0, 1, 0)), y**2):+.2e}")

h = builtin("heisenberg")
f = ((1 - x**2) * (1 - y**2) * (1 - z**2)) ** 2 * (1 + x + y * z)
frame = adapted_frame(h, (0, 0, 0))
print("\nHeisenberg, int f Delta f rho  vs  -int |grad f|^2 rho on [-1, 1]^3:")
for n in (21, 41):
    lhs, rhs = symmetry_check(frame, f, f, ((-1, -1, -1), (1, 1, 1)), n)
    print(f"  {n}^3 midpoint grid: {lhs:.7f} vs {rhs:.7f}, relative gap {abs(lhs - rhs) / abs(rhs):.1e}")
