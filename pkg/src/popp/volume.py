"""Adapted structure constants, Gram matrices B_j and Popp's volume.

Everything pointwise is built on batched kernels (``*_many``) that act on
arrays of points with shape ``(N, n)``; the single-point functions wrap them
and keep the per-point contracts and error checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InternalInconsistency, SingularPointError, ValidationError
from .flag import MAX_CONDITION, AdaptedFrame, SRStructure, adapted_frame
from .polyvec import VectorField

RESIDUAL_TOL = 1e-9


def word_tuples(k: int, j: int):
    """All ordered index tuples of length ``j`` over ``range(k)``, lexicographic."""
    return list(itertools.product(range(k), repeat=j))


def condition_numbers(M: np.ndarray):
    """1-norm condition numbers and inverses of a stack of square matrices."""
    try:
        Minv = np.linalg.inv(M)
    except np.linalg.LinAlgError:
        return np.full(M.shape[:-2], np.inf), None
    norm1 = lambda A: np.max(np.sum(np.abs(A), axis=-2), axis=-1)  # noqa: E731
    return norm1(M) * norm1(Minv), Minv


def _solve_checked(M: np.ndarray, V: np.ndarray, what: str) -> np.ndarray:
    """Solve ``M @ A = V`` for stacks ``(N, n, n)``, ``(N, n, r)`` with residual check."""
    cond, Minv = condition_numbers(M)
    bad = ~np.isfinite(cond) | (cond > MAX_CONDITION)
    if np.any(bad):
        raise SingularPointError(
            f"frame matrix ill-conditioned while computing {what} (cond={np.max(cond):.3g})")
    A = Minv @ V
    resid = np.linalg.norm(M @ A - V, axis=-2)
    scale = np.linalg.norm(V, axis=-2)
    # floor at backward-stable rounding level so exactly-zero columns pass
    floor = 1e-13 * np.linalg.norm(M, axis=(-2, -1))[..., None] * np.linalg.norm(A, axis=-2)
    if np.any(resid > RESIDUAL_TOL * scale + floor):
        raise InternalInconsistency(f"linear solve residual too large while computing {what}")
    return A


def _word_values(frame: AdaptedFrame, words, points) -> np.ndarray:
    s = frame.structure
    return np.stack([s.word(w).eval_many(points) for w in words], axis=-1)


@dataclass
class AdaptedConstants:
    """``b[j]`` has shape ``(k_j - k_(j-1),) + (k,) * j`` for levels j = 2..m.

    Index ``b[j][l, i1, ..., ij]`` is the coefficient on the l-th level-j frame
    field of the bracket word (i1, ..., ij), all 0-based.
    """

    point: tuple[float, ...]
    flag_dims: tuple[int, ...]
    b: dict[int, np.ndarray]

    def flat(self, j: int) -> np.ndarray:
        """Matrix of the map pi_j: rows l, columns ordered tuples."""
        arr = self.b[j]
        return arr.reshape(arr.shape[0], -1)


def adapted_constants_many(frame: AdaptedFrame, points, tol: float | None = None):
    """Batched adapted constants: dict j -> array ``(N, d_j, k**j)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tol = RESIDUAL_TOL if tol is None else tol
    k, dims = frame.k, frame.flag_dims
    M = frame.matrix_many(pts)
    out = {}
    for j in range(2, frame.step + 1):
        words = word_tuples(k, j)
        V = _word_values(frame, words, pts)
        A = _solve_checked(M, V, f"level-{j} adapted constants")
        lo, hi = dims[j - 2], dims[j - 1]
        above = A[:, hi:, :]
        scale = np.maximum(1.0, np.max(np.abs(A), axis=(1, 2)))
        if above.size and np.any(np.max(np.abs(above), axis=(1, 2)) > tol * scale):
            raise InternalInconsistency(
                f"level-{j} brackets have components above D^{j}; frame is not adapted")
        out[j] = A[:, lo:hi, :]
    return out


def adapted_constants(frame: AdaptedFrame, q=None) -> AdaptedConstants:
    """Constants b^l_{i1...ij} at ``q`` (defaults to the frame basepoint)."""
    q = frame.basepoint if q is None else tuple(float(v) for v in q)
    k = frame.k
    flat = adapted_constants_many(frame, [q])
    b = {j: arr[0].reshape((arr.shape[1],) + (k,) * j) for j, arr in flat.items()}
    return AdaptedConstants(q, frame.flag_dims, b)


def gram_from_flat(flat: dict[int, np.ndarray], k: int) -> list[np.ndarray]:
    """B_1..B_m from batched flat constants; each ``(N, d_j, d_j)``."""
    N = next(iter(flat.values())).shape[0] if flat else 1
    mats = [np.broadcast_to(np.eye(k), (N, k, k))]
    for j in sorted(flat):
        bj = flat[j]
        mats.append(bj @ np.swapaxes(bj, -1, -2))
    return mats


@dataclass
class GramData:
    point: tuple[float, ...]
    matrices: list[np.ndarray]  # B_1 .. B_m
    dets: list[float] = field(init=False)

    def __post_init__(self):
        self.dets = [float(np.linalg.det(B)) for B in self.matrices]

    @property
    def det_product(self) -> float:
        return float(np.prod(self.dets))


def _check_positive_definite(B: np.ndarray, j: int, tol: float = 1e-12):
    ev = np.linalg.eigvalsh(B)
    if ev[0] <= tol * max(ev[-1], 1e-300):
        raise InternalInconsistency(
            f"B_{j} is not positive definite (eigenvalues {ev}); pi_{j} not surjective")


def gram_matrices(c: AdaptedConstants, flag_dims=None) -> GramData:
    """``[B_j]^{hl} = sum over all ordered tuples of b^h b^l``; B_1 = identity."""
    flag_dims = c.flag_dims if flag_dims is None else tuple(flag_dims)
    if tuple(flag_dims) != tuple(c.flag_dims):
        raise ValidationError("flag dimensions do not match the adapted constants")
    k = flag_dims[0]
    mats = [np.eye(k)]
    for j in range(2, len(flag_dims) + 1):
        bj = c.flat(j)
        B = bj @ bj.T
        _check_positive_definite(B, j)
        mats.append(B)
    return GramData(c.point, mats)


def popp_density_adapted(g: GramData) -> float:
    """Popp density against the coframe dual to the adapted frame."""
    return 1.0 / np.sqrt(g.det_product)


def popp_density_coordinates(frame: AdaptedFrame, g: GramData, q=None) -> float:
    """Popp density against Lebesgue measure dx^1...dx^n (unsigned)."""
    q = g.point if q is None else tuple(float(v) for v in q)
    M = frame.matrix(q)
    if np.linalg.cond(M) > MAX_CONDITION:
        raise SingularPointError(f"frame matrix ill-conditioned at {q}")
    return popp_density_adapted(g) / abs(np.linalg.det(M))


def popp_density_many(frame: AdaptedFrame, points, coordinates: bool = True) -> np.ndarray:
    """Popp density at many points for a fixed frame, shape ``(N,)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    flat = adapted_constants_many(frame, pts)
    dets = [np.linalg.det(B) for B in gram_from_flat(flat, frame.k)]
    prod = np.prod(np.stack(dets), axis=0)
    if np.any(prod <= 0):
        raise InternalInconsistency("non-positive Gram determinant")
    dens = 1.0 / np.sqrt(prod)
    if coordinates:
        dens = dens / np.abs(np.linalg.det(frame.matrix_many(pts)))
    return dens


def coordinate_density(s: SRStructure, q, tol: float = 1e-9, completion=None) -> float:
    """Build the frame at ``q`` and return the Lebesgue-relative Popp density there."""
    frame = adapted_frame(s, q, tol, completion=completion)
    g = gram_matrices(adapted_constants(frame))
    return popp_density_coordinates(frame, g)


# -- independent min-norm oracle -------------------------------------------

def _pi_matrix(frame: AdaptedFrame, q, j: int) -> np.ndarray:
    """Matrix of pi_j, shape ``(d_j, k**j)``, via least squares on the frame."""
    M = frame.matrix(q)
    words = word_tuples(frame.k, j)
    V = np.column_stack([frame.structure.word(w).at(q) for w in words])
    A, *_ = np.linalg.lstsq(M, V, rcond=None)
    return A[frame.level_range(j), :]


def quotient_norm_oracle(frame: AdaptedFrame, q, j: int, target) -> float:
    """Norm of the class of ``target`` in D^j/D^(j-1), by minimum-norm preimage.

    Solves ``min |a| s.t. pi_j(a) = class(target)`` with an SVD-based least
    squares; never forms B_j.
    """
    q = tuple(float(v) for v in q)
    if not 2 <= j <= frame.step:
        raise ValidationError(f"level must be in 2..{frame.step}, got {j}")
    target = np.asarray(target, dtype=float)
    M = frame.matrix(q)
    coeffs, *_ = np.linalg.lstsq(M, target, rcond=None)
    hi = frame.flag_dims[j - 1]
    tscale = max(np.linalg.norm(coeffs), 1.0)
    if np.any(np.abs(coeffs[hi:]) > RESIDUAL_TOL * tscale):
        raise ValidationError(f"target {target} does not lie in D^{j} at {q}")
    cls = coeffs[frame.level_range(j)]
    P = _pi_matrix(frame, q, j)
    a, *_ = np.linalg.lstsq(P, cls, rcond=None)
    if np.linalg.norm(P @ a - cls) > RESIDUAL_TOL * max(np.linalg.norm(cls), 1.0):
        raise InternalInconsistency(f"pi_{j} is not surjective onto the target class")
    return float(np.linalg.norm(a))


def oracle_gram(frame: AdaptedFrame, q, j: int) -> np.ndarray:
    """Gram matrix of the level-j frame classes, via the oracle and polarization."""
    q = tuple(float(v) for v in q)
    M = frame.matrix(q)
    idx = list(frame.level_range(j))
    G = np.empty((len(idx), len(idx)))
    for a, ia in enumerate(idx):
        for b, ib in enumerate(idx):
            u, v = M[:, ia], M[:, ib]
            plus = quotient_norm_oracle(frame, q, j, u + v)
            minus = quotient_norm_oracle(frame, q, j, u - v)
            G[a, b] = (plus**2 - minus**2) / 4
    return G


def contact_invariant(s: SRStructure, transversal: VectorField, q, tol: float = 1e-9) -> float:
    """``sum_{i,j<=k} (c^0_ij)^2`` for the frame (X_1, ..., X_k, X_0).

    Equals 1 / (adapted Popp density)^2 on corank-one structures.
    """
    if s.nvars != s.rank + 1:
        raise ValidationError(f"contact invariant needs corank 1, got n={s.nvars}, k={s.rank}")
    q = tuple(float(v) for v in q)
    fields = list(s.fields) + [transversal]
    M = np.column_stack([f.at(q) for f in fields])
    if np.linalg.cond(M) > MAX_CONDITION:
        raise SingularPointError(f"transversal field is not transversal at {q}")
    k = s.rank
    total = 0.0
    scale = 0.0
    for i in range(k):
        for jj in range(k):
            v = s.word((i, jj)).at(q)
            a = np.linalg.solve(M, v)
            total += a[k] ** 2
            scale = max(scale, np.max(np.abs(a)))
    if total <= (tol * max(scale, 1.0)) ** 2:
        raise SingularPointError(
            f"horizontal brackets stay in D at {q}; not bracket generating at step 2")
    return float(total)
