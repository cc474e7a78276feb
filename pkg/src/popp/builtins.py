"""Builtin example structures, alternative completions and isometry families."""

from __future__ import annotations

from fractions import Fraction

from .errors import ValidationError
from .flag import SRStructure
from .polyvec import Poly, Surd, VectorField


def _vf(n, comps):
    return VectorField([c if isinstance(c, Poly) else Poly.constant(n, c) for c in comps])


def heisenberg() -> SRStructure:
    """X1 = dx - y/2 dz, X2 = dy + x/2 dz; [X1, X2] = dz."""
    x, y, z = Poly.variables(3)
    half = Fraction(1, 2)
    return SRStructure([_vf(3, [1, 0, -half * y]), _vf(3, [0, 1, half * x])],
                       name="heisenberg")


def martinet() -> SRStructure:
    """X = dx + y^2 dz, Y = dy; singular on the plane y = 0."""
    x, y, z = Poly.variables(3)
    return SRStructure([_vf(3, [1, 0, y**2]), _vf(3, [0, 1, 0])], name="martinet")


def engel() -> SRStructure:
    """X1 = dx, X2 = dy + x dz + x^2/2 dw; growth vector (2, 3, 4)."""
    x, y, z, w = Poly.variables(4)
    return SRStructure([_vf(4, [1, 0, 0, 0]), _vf(4, [0, 1, x, x**2 / 2])], name="engel")


def so3_orthonormal_basis():
    """Three skew 3x3 matrices, orthonormal for Tr(A^T B), entries in Q(sqrt 2)."""
    r = Surd.sqrt(2) / 2
    mats = []
    for a, b in [(0, 1), (0, 2), (1, 2)]:
        L = [[Fraction(0)] * 3 for _ in range(3)]
        L[a][b] = r
        L[b][a] = -r
        mats.append(L)
    return mats


def step2_carnot(L, name="carnot") -> SRStructure:
    """Step-2 Carnot group in exponential coordinates ``(x, y)``.

    ``L[h]`` is a skew k x k matrix; the fields are
    ``X_i = d/dx_i - 1/2 sum_j L[h][i][j] x_j d/dy_h`` so that
    ``[X_i, X_j] = sum_h L[h][i][j] d/dy_h``.
    """
    k = len(L[0])
    n = k + len(L)
    xs = Poly.variables(n)
    fields = []
    for i in range(k):
        comps = [Poly.zero(n)] * n
        comps[i] = Poly.constant(n, 1)
        for h, Lh in enumerate(L):
            c = Poly.zero(n)
            for j in range(k):
                if Lh[i][j] != 0:
                    c = c - Fraction(1, 2) * Lh[i][j] * xs[j]
            comps[k + h] = c
        fields.append(VectorField(comps))
    return SRStructure(fields, name=name)


def carnot_k3() -> SRStructure:
    """Free step-2 Carnot group on 3 generators, n = 6, orthonormal L matrices."""
    return step2_carnot(so3_orthonormal_basis(), name="carnot-k3")


BUILTINS = {
    "heisenberg": heisenberg,
    "martinet": martinet,
    "engel": engel,
    "carnot-k3": carnot_k3,
    # the free step-2 group on two generators is the Heisenberg group
    "carnot-free-2-3": heisenberg,
}

# Groups whose left translations are listed below.
CARNOT_GROUPS = ("heisenberg", "engel", "carnot-k3")


def builtin(name: str) -> SRStructure:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValidationError(
            f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}") from None


def vertical_completion(s: SRStructure, extra=None) -> list[VectorField]:
    """Coordinate fields d/dx_(k+1) .. d/dx_n, optionally shifted by ``extra``.

    For Heisenberg and Martinet this is the completion Z = dz.
    """
    n, k = s.nvars, s.rank
    out = [VectorField.coordinate(n, i) for i in range(k, n)]
    if extra is not None:
        out = [f + e for f, e in zip(out, extra)]
    return out


def heisenberg_translation(a, b, c):
    """Left translation by (a, b, c): (x, y, z) -> (x+a, y+b, z+c+(a*y-b*x)/2)."""
    from .maps import PolyMap

    a, b, c = (Fraction(v) for v in (a, b, c))
    x, y, z = Poly.variables(3)
    fwd = [x + a, y + b, z + c + (a * y - b * x) / 2]
    inv = [x - a, y - b, z - c - (a * y - b * x) / 2]
    return PolyMap(fwd, inv, name=f"L({a},{b},{c})")


def carnot_translation(L, a, beta):
    """Left translation on :func:`step2_carnot` by the point ``(a, beta)``."""
    from .maps import PolyMap

    k = len(L[0])
    n = k + len(L)
    xs = Poly.variables(n)
    a = [Fraction(v) for v in a]
    beta = [Fraction(v) for v in beta]

    def build(sign):
        out = [xs[i] + sign * a[i] for i in range(k)]
        for h, Lh in enumerate(L):
            s = Poly.zero(n)
            for i in range(k):
                for j in range(k):
                    if Lh[i][j] != 0:
                        s = s + Lh[i][j] * a[j] * xs[i]
            out.append(xs[k + h] + sign * beta[h] - sign * s / 2)
        return out

    return PolyMap(build(1), build(-1), name=f"L({a},{beta})")


def engel_translation(a, b, c, d):
    """Left translation on :func:`engel`, a shear in x followed by a shift."""
    from .maps import PolyMap

    a, b, c, d = (Fraction(v) for v in (a, b, c, d))
    x, y, z, w = Poly.variables(4)
    fwd = [x + a, y + b, z + a * y + c, w + a * z + a * a * y / 2 + d]
    # undo the shift, then the shear by -a
    y0, z0, w0 = y - b, z - c, w - d
    inv = [x - a, y0, z0 - a * y0, w0 - a * z0 + a * a * y0 / 2]
    return PolyMap(fwd, inv, name=f"L({a},{b},{c},{d})")


def translation_family(name: str, params):
    """Left translation of builtin group ``name`` with parameters ``params``."""
    if name in ("heisenberg", "carnot-free-2-3"):
        return heisenberg_translation(*params)
    if name == "engel":
        return engel_translation(*params)
    if name == "carnot-k3":
        return carnot_translation(so3_orthonormal_basis(), params[:3], params[3:])
    raise ValidationError(f"no translation family for {name!r}")


def heisenberg_dilation(factor=2):
    """(x, y, z) -> (r x, r y, r^2 z): preserves D, scales the metric by r^2."""
    from .maps import PolyMap

    r = Fraction(factor)
    x, y, z = Poly.variables(3)
    return PolyMap([r * x, r * y, r * r * z], [x / r, y / r, z / (r * r)],
                   name=f"dilation({r})")


def martinet_flip():
    """(x, y, z) -> (x, -y, z)."""
    from .maps import PolyMap

    x, y, z = Poly.variables(3)
    return PolyMap([x, -y, z], [x, -y, z], name="flip-y")
