"""Polynomial diffeomorphisms, pushforwards and isometry checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SingularPointError, TermCapExceeded, ValidationError
from .flag import DEFAULT_TOL, SRStructure
from .polyvec import Poly, VectorField
from .volume import coordinate_density

INVERSE_CHECK_POINTS = 50


class PolyMap:
    """Polynomial map with a polynomial inverse, both supplied by the caller.

    ``forward o inverse = identity`` is verified exactly; if the composition
    exceeds the term cap it is checked at random points instead.
    """

    def __init__(self, forward: Sequence[Poly], inverse: Sequence[Poly], name: str = "",
                 check: bool = True):
        self.forward = tuple(forward)
        self.inverse = tuple(inverse)
        self.name = name
        n = len(self.forward)
        if len(self.inverse) != n:
            raise ValidationError("forward and inverse have different lengths")
        for p in self.forward + self.inverse:
            if p.nvars != n:
                raise ValidationError(f"map components must be polynomials in {n} variables")
        self._jacobian = None
        if check:
            self._check_inverse()

    @property
    def nvars(self) -> int:
        return len(self.forward)

    def _check_inverse(self):
        n = self.nvars
        ident = Poly.variables(n)
        try:
            comp = [p.compose(self.inverse) for p in self.forward]
        except TermCapExceeded:
            pts = np.random.default_rng(0).uniform(-1, 1, (INVERSE_CHECK_POINTS, n))
            back = self(self.apply_inverse(pts))
            if not np.allclose(back, pts, rtol=0, atol=1e-10):
                raise ValidationError(f"map {self.name!r}: inverse check failed numerically")
            return
        if tuple(comp) != ident:
            raise ValidationError(f"map {self.name!r}: forward o inverse is not the identity")

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.stack([p.eval_many(pts) for p in self.forward], axis=-1)

    def apply_inverse(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.stack([p.eval_many(pts) for p in self.inverse], axis=-1)

    @property
    def jacobian(self) -> tuple[tuple[Poly, ...], ...]:
        """``J[i][j] = d forward_i / d x_j``."""
        if self._jacobian is None:
            self._jacobian = tuple(tuple(p.partial(j) for j in range(self.nvars))
                                   for p in self.forward)
        return self._jacobian

    def jacobian_at(self, q) -> np.ndarray:
        return np.array([[d(q) for d in row] for row in self.jacobian])

    def inverted(self) -> PolyMap:
        return PolyMap(self.inverse, self.forward, name=f"{self.name}^-1", check=False)

    def __repr__(self):
        return f"PolyMap({self.name!r}, n={self.nvars})"


def pushforward_field(m: PolyMap, X: VectorField) -> VectorField:
    """``(phi_* X)(p) = D phi(phi^-1(p)) X(phi^-1(p))``, exact."""
    if X.nvars != m.nvars:
        raise ValidationError("map and field live on different spaces")
    J = m.jacobian
    comps = []
    for i in range(m.nvars):
        c = Poly.zero(m.nvars)
        for j in range(m.nvars):
            if not J[i][j].is_zero() and not X.components[j].is_zero():
                c = c + J[i][j] * X.components[j]
        comps.append(c.compose(m.inverse))
    return VectorField(comps)


def pushforward_values(m: PolyMap, X: VectorField, q) -> np.ndarray:
    """``D phi(q) X(q)``, the pushed vector sitting at ``phi(q)``."""
    return m.jacobian_at(q) @ X.at(q)


@dataclass
class IsometryReport:
    points: list[tuple[float, ...]]
    distribution_residuals: list[float]
    gram_matrices: list[np.ndarray]
    tol: float
    errors: list[str] = field(default_factory=list)

    @property
    def preserves_distribution(self) -> bool:
        return not self.errors and max(self.distribution_residuals, default=0.0) < self.tol

    @property
    def gram_deviation(self) -> float:
        return max((float(np.max(np.abs(G - np.eye(len(G))))) for G in self.gram_matrices),
                   default=0.0)

    @property
    def preserves_metric(self) -> bool:
        return self.preserves_distribution and self.gram_deviation < self.tol

    @property
    def passed(self) -> bool:
        return self.preserves_distribution and self.preserves_metric


def is_isometry(m: PolyMap, s: SRStructure, sample, tol: float = 1e-8) -> IsometryReport:
    """Check ``phi_* D_q = D_phi(q)`` and orthonormality of the pushed frame.

    At each sample point the pushed horizontal vectors are expanded in the
    orthonormal frame at ``phi(q)`` by least squares; (i) the relative
    residual of that expansion and (ii) the Gram matrix of the coefficients
    are recorded.
    """
    if m.nvars != s.nvars:
        raise ValidationError("map and structure live on different spaces")
    pts, resids, grams, errors = [], [], [], []
    for q in sample:
        q = tuple(float(v) for v in q)
        pts.append(q)
        p = m([q])[0]
        H = s.horizontal_values(p)
        V = np.column_stack([pushforward_values(m, X, q) for X in s.fields])
        G, *_ = np.linalg.lstsq(H, V, rcond=None)
        r = np.linalg.norm(H @ G - V) / max(np.linalg.norm(V), 1e-300)
        resids.append(float(r))
        grams.append(G.T @ G)
    return IsometryReport(pts, resids, grams, tol, errors)


@dataclass
class VolumeReport:
    points: list[tuple[float, ...]]
    ratios: list[float]  # rho(phi(q)) |det D phi(q)| / rho(q)
    tol: float
    errors: list[str] = field(default_factory=list)

    @property
    def relative_errors(self) -> list[float]:
        return [abs(r - 1.0) for r in self.ratios]

    @property
    def max_error(self) -> float:
        return max(self.relative_errors, default=0.0)

    @property
    def passed(self) -> bool:
        return not self.errors and self.max_error < self.tol


def check_volume_preserving(m: PolyMap, s: SRStructure, sample, tol: float = 1e-8,
                            weight: Poly | None = None,
                            rank_tol: float = DEFAULT_TOL) -> VolumeReport:
    """Pullback test ``phi^* mu = mu`` for ``mu = weight * P`` (weight defaults to 1).

    Each ratio is computed with frames chosen independently at q and phi(q).
    """
    if m.nvars != s.nvars:
        raise ValidationError("map and structure live on different spaces")
    pts, ratios, errors = [], [], []
    for q in sample:
        q = tuple(float(v) for v in q)
        pts.append(q)
        p = tuple(m([q])[0])
        try:
            rho_q = coordinate_density(s, q, rank_tol)
            rho_p = coordinate_density(s, p, rank_tol)
        except SingularPointError as exc:
            errors.append(f"{q}: {exc}")
            ratios.append(float("nan"))
            continue
        if weight is not None:
            rho_q *= weight(q)
            rho_p *= weight(p)
        ratios.append(float(rho_p * abs(np.linalg.det(m.jacobian_at(q))) / rho_q))
    return VolumeReport(pts, ratios, tol, errors)
