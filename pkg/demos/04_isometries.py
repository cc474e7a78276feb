"""Isometries preserve Popp's volume; a dilation does not.

Left translations of the Heisenberg group push each frame field to
itself.  The dilation (2x, 2y, 4z) keeps the distribution but doubles
lengths, so the Gram matrix of the pushed frame is 4 Id and the volume
grows by 2^4 = 16 (the Hausdorff dimension is 4).  Weighting Popp's
volume by a non-constant function destroys translation invariance.
"""

from fractions import Fraction

import numpy as np

from popp.builtins import heisenberg, heisenberg_dilation, heisenberg_translation, martinet, martinet_flip
from popp.maps import check_volume_preserving, is_isometry, pushforward_field
from popp.polyvec import Poly

h = heisenberg()
pts = np.random.default_rng(0).uniform(-1, 1, (20, 3))

L = heisenberg_translation(Fraction(1, 2), -3, 2)
print(f"{L.name}: pushes X1, X2 to themselves: "
      f"{all(pushforward_field(L, X) == X for X in h.fields)}")
iso, vol = is_isometry(L, h, pts), check_volume_preserving(L, h, pts)
print(f"  isometry {iso.passed}, volume preserving {vol.passed} (max error {vol.max_error:.1e})")

D = heisenberg_dilation(2)
iso, vol = is_isometry(D, h, pts), check_volume_preserving(D, h, pts)
print(f"{D.name}: distribution kept {iso.preserves_distribution}, metric kept {iso.preserves_metric}")
print(f"  Gram matrix at a sample point:\n{iso.gram_matrices[0]}")
print(f"  volume ratio {np.mean(vol.ratios):.6g}")

x = Poly.var(3, 0)
vol = check_volume_preserving(L, h, pts, weight=1 + x**2)
print(f"(1 + x^2) * Popp under {L.name}: preserved {vol.passed}, max error {vol.max_error:.3f}")

m = martinet()
mpts = pts.copy()
mpts[:, 1] = np.sign(mpts[:, 1]) * (0.1 + np.abs(mpts[:, 1]))
F = martinet_flip()
print(f"Martinet {F.name}: isometry {is_isometry(F, m, mpts).passed}, "
      f"volume preserving {check_volume_preserving(F, m, mpts).passed}")
