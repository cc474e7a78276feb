"""Structure constants, Popp divergence and the canonical sub-Laplacian."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularPointError, ValidationError
from .flag import AdaptedFrame, SRStructure
from .polyvec import Poly, directional_derivative
from .volume import _solve_checked, adapted_constants_many, gram_from_flat, popp_density_many

DEFAULT_FD_STEP = 1e-4
FD_AGREEMENT = 1e-6


class AccuracyWarning(UserWarning):
    pass


def structure_constants_many(frame: AdaptedFrame, points) -> np.ndarray:
    """``c[N, i, j, l]`` with ``[X_i, X_j] = sum_l c^l_ij X_l`` (0-based)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = frame.n
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    c = np.zeros((len(pts), n, n, n))
    if not pairs:
        return c
    brackets = [frame.fields[i].bracket(frame.fields[j]) for i, j in pairs]
    V = np.stack([b.eval_many(pts) for b in brackets], axis=-1)
    A = _solve_checked(frame.matrix_many(pts), V, "structure constants")
    for p, (i, j) in enumerate(pairs):
        c[:, i, j, :] = A[:, :, p]
        c[:, j, i, :] = -A[:, :, p]
    return c


def structure_constants(frame: AdaptedFrame, q=None) -> np.ndarray:
    """``c[i, j, l]`` at ``q``; antisymmetric in ``(i, j)`` by construction."""
    q = frame.basepoint if q is None else q
    return structure_constants_many(frame, [q])[0]


def gradient(s: SRStructure, f: Poly, q) -> np.ndarray:
    """Horizontal gradient components ``(X_1 f, ..., X_k f)`` at ``q``."""
    return np.array([directional_derivative(X, f)(q) for X in s.fields])


def _logdet_terms(frame: AdaptedFrame, points) -> list[np.ndarray]:
    """B_j for j >= 2 at points, as a list of ``(N, d, d)`` arrays."""
    flat = adapted_constants_many(frame, points)
    return gram_from_flat(flat, frame.k)[1:]


def _directional_B(frame, pts, dirs, h):
    """Central difference of each B_j along ``dirs`` with step ``h`` (per point)."""
    plus = _logdet_terms(frame, pts + h[:, None] * dirs)
    minus = _logdet_terms(frame, pts - h[:, None] * dirs)
    return [(p - m) / (2 * h[:, None, None]) for p, m in zip(plus, minus)]


def _richardson_pair(frame, pts, dirs, h):
    """Richardson estimates from steps (h, h/2) and (h/2, h/4), sharing the middle one."""
    d1, d2, d4 = (_directional_B(frame, pts, dirs, h / r) for r in (1, 2, 4))
    coarse = [(4 * b - a) / 3 for a, b in zip(d1, d2)]
    fine = [(4 * b - a) / 3 for a, b in zip(d2, d4)]
    return coarse, fine


@dataclass
class DivergenceResult:
    values: np.ndarray            # (N, len(indices))
    trace_terms: np.ndarray       # (N, len(indices)): 1/2 sum_j Tr(B_j^-1 X_i(B_j))
    bracket_terms: np.ndarray     # (N, len(indices)): sum_l c^l_il
    warnings: list[str] = field(default_factory=list)


def frame_divergences_many(frame: AdaptedFrame, points, indices=None,
                           h: float = DEFAULT_FD_STEP) -> DivergenceResult:
    """Popp divergence of frame fields at many points.

    ``div X_i = -(1/2 sum_j Tr(B_j^-1 X_i(B_j)) + sum_l c^l_il)``.  The
    derivative ``X_i(B_j)`` is a central difference along the straight line
    ``q + t X_i(q)`` with one Richardson step; a second estimate at half the
    step must agree to ``FD_AGREEMENT`` or a warning is attached.
    """
    if h <= 0:
        raise ValidationError("finite-difference step must be positive")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    indices = list(range(frame.k)) if indices is None else list(indices)
    N = len(pts)
    hs = h * (np.linalg.norm(pts, axis=1) + 1.0)
    c = structure_constants_many(frame, pts)
    B = _logdet_terms(frame, pts)
    try:
        Binv = [np.linalg.inv(b) for b in B]
    except np.linalg.LinAlgError as exc:
        raise SingularPointError("B_j is singular at an evaluation point") from exc
    vals = np.empty((N, len(indices)))
    traces = np.empty_like(vals)
    brackets = np.empty_like(vals)
    notes = []
    for col, i in enumerate(indices):
        dirs = frame.fields[i].eval_many(pts)
        try:
            dB, dB_half = _richardson_pair(frame, pts, dirs, hs)
        except SingularPointError as exc:
            raise SingularPointError(
                f"finite-difference stencil for X_{i + 1} reaches a singular point: {exc}") from exc
        tr = sum(np.trace(bi @ db, axis1=-2, axis2=-1) for bi, db in zip(Binv, dB))
        tr_half = sum(np.trace(bi @ db, axis1=-2, axis2=-1) for bi, db in zip(Binv, dB_half))
        gap = np.abs(tr - tr_half)
        if np.any(gap > FD_AGREEMENT * np.maximum(1.0, np.abs(tr))):
            msg = (f"divergence of X_{i + 1}: step-halving changed the trace term "
                   f"by up to {np.max(gap):.3g}")
            notes.append(msg)
            warnings.warn(msg, AccuracyWarning, stacklevel=2)
        bt = np.einsum("nll->n", c[:, i, :, :])
        traces[:, col] = 0.5 * tr
        brackets[:, col] = bt
        vals[:, col] = -(0.5 * tr + bt) + 0.0  # no negative zeros in reports
    return DivergenceResult(vals, traces, brackets, notes)


def frame_divergence(frame: AdaptedFrame, q, i: int, h: float = DEFAULT_FD_STEP) -> float:
    """Popp divergence of frame field ``i`` (0-based) at ``q``."""
    if not 0 <= i < frame.n:
        raise ValidationError(f"frame index {i} out of range")
    return float(frame_divergences_many(frame, [q], [i], h).values[0, 0])


@dataclass
class SublaplacianData:
    """Coefficients of ``Delta = sum_i X_i^2 + a_i X_i`` at a point."""

    point: tuple[float, ...]
    c: np.ndarray
    divergences: np.ndarray
    coefficients: np.ndarray
    warnings: list[str] = field(default_factory=list)


def sublaplacian_coeffs(frame: AdaptedFrame, q=None, h: float = DEFAULT_FD_STEP) -> SublaplacianData:
    q = frame.basepoint if q is None else tuple(float(v) for v in q)
    res = frame_divergences_many(frame, [q], range(frame.k), h)
    d = res.values[0]
    return SublaplacianData(q, structure_constants(frame, q), d, d.copy(), res.warnings)


def _sublaplacian_values(frame: AdaptedFrame, f: Poly, pts, h) -> np.ndarray:
    s = frame.structure
    a = frame_divergences_many(frame, pts, range(frame.k), h).values
    out = np.zeros(len(pts))
    for i, X in enumerate(s.fields):
        Xf = directional_derivative(X, f)
        out += directional_derivative(X, Xf).eval_many(pts) + a[:, i] * Xf.eval_many(pts)
    return out


def apply_sublaplacian(frame: AdaptedFrame, f: Poly, q=None, h: float = DEFAULT_FD_STEP) -> float:
    """``(Delta f)(q)``; second-order part exact, first-order via the Popp divergence."""
    q = frame.basepoint if q is None else tuple(float(v) for v in q)
    s = frame.structure
    a = sublaplacian_coeffs(frame, q, h).coefficients
    total = 0.0
    for i, X in enumerate(s.fields):
        Xf = directional_derivative(X, f)
        total += directional_derivative(X, Xf)(q) + a[i] * Xf(q)
    return float(total)


def mu_divergence_shift(base_div: float, logf_derivative: float) -> float:
    """Divergence against ``f * mu`` from the divergence against ``mu``."""
    return base_div + logf_derivative


def _grid_nodes(region, grid):
    lo, hi = (np.asarray(v, dtype=float) for v in region)
    n = len(lo)
    counts = [int(grid)] * n if np.isscalar(grid) else [int(g) for g in grid]
    axes = [lo[i] + (np.arange(counts[i]) + 0.5) * (hi[i] - lo[i]) / counts[i] for i in range(n)]
    cell = float(np.prod((hi - lo) / np.asarray(counts)))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1), cell


def symmetry_check(frame: AdaptedFrame, f: Poly, g: Poly, region, grid,
                   h: float = DEFAULT_FD_STEP, chunk: int = 200_000) -> tuple[float, float]:
    """Midpoint-rule values of ``int f Delta g rho dx`` and ``-int <grad f, grad g> rho dx``.

    ``rho`` is the coordinate Popp density.  The two agree for compactly
    supported f, g up to quadrature error.
    """
    s = frame.structure
    nodes, cell = _grid_nodes(region, grid)
    Xf = [directional_derivative(X, f) for X in s.fields]
    Xg = [directional_derivative(X, g) for X in s.fields]
    lhs_parts, rhs_parts = [], []
    for start in range(0, len(nodes), chunk):
        pts = nodes[start:start + chunk]
        try:
            rho = popp_density_many(frame, pts)
        except SingularPointError as exc:
            raise SingularPointError(f"integration region touches a singular locus: {exc}") from exc
        lap = _sublaplacian_values(frame, g, pts, h)
        grad = sum(a.eval_many(pts) * b.eval_many(pts) for a, b in zip(Xf, Xg))
        lhs_parts.append(f.eval_many(pts) * lap * rho)
        rhs_parts.append(-grad * rho)
    # np.sum is pairwise on contiguous arrays: deterministic for a fixed grid
    lhs = float(np.sum(np.concatenate(lhs_parts))) * cell
    rhs = float(np.sum(np.concatenate(rhs_parts))) * cell
    return lhs, rhs
