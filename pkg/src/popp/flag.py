"""Flag of a distribution at a point, growth vector and adapted frames."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    NotBracketGenerating,
    RankDeficientHorizontal,
    SingularPointError,
    ValidationError,
)
from .polyvec import VectorField, lie_bracket

DEFAULT_TOL = 1e-9
MAX_CONDITION = 1e12
DEFAULT_MAX_STEP = 8


def numerical_rank(A: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


class SRStructure:
    """Sub-Riemannian structure on R^n given by declared-orthonormal fields.

    Bracket words are realized lazily and memoized per instance.
    """

    def __init__(self, fields: Sequence[VectorField], name: str = "",
                 variables: Sequence[str] | None = None):
        fields = tuple(fields)
        if not fields:
            raise ValidationError("need at least one horizontal field")
        n = fields[0].nvars
        if any(f.nvars != n for f in fields):
            raise ValidationError("horizontal fields live on different spaces")
        k = len(fields)
        if n < 3:
            raise ValidationError(f"dimension must be at least 3, got {n}")
        if not 1 <= k < n:
            raise ValidationError(f"rank must satisfy 1 <= k < n, got k={k}, n={n}")
        self.fields = fields
        self.name = name
        self.variables = tuple(variables) if variables is not None else None
        self._words: dict[tuple[int, ...], VectorField] = {
            (i,): f for i, f in enumerate(fields)}

    @property
    def nvars(self) -> int:
        return self.fields[0].nvars

    @property
    def rank(self) -> int:
        return len(self.fields)

    def word(self, indices: Sequence[int]) -> VectorField:
        """Right-nested bracket for a 0-based index word."""
        indices = tuple(indices)
        if not indices:
            raise ValidationError("empty bracket word")
        if indices not in self._words:
            if not 0 <= indices[0] < self.rank:
                raise ValidationError(f"word index {indices[0]} out of range")
            self._words[indices] = lie_bracket(self.fields[indices[0]], self.word(indices[1:]))
        return self._words[indices]

    def horizontal_values(self, q) -> np.ndarray:
        """The n x k matrix of horizontal field values at ``q``."""
        return np.column_stack([f.at(q) for f in self.fields])

    def __repr__(self):
        return f"SRStructure(name={self.name!r}, n={self.nvars}, k={self.rank})"


@dataclass(frozen=True)
class BracketWord:
    indices: tuple[int, ...]  # 1-based, as written in formulas
    realized: VectorField

    @property
    def length(self) -> int:
        return len(self.indices)


def bracket_word(s: SRStructure, indices: Sequence[int]) -> BracketWord:
    """Word from 1-based indices."""
    indices = tuple(indices)
    return BracketWord(indices, s.word(tuple(i - 1 for i in indices)))


def _check_point(s: SRStructure, q) -> tuple[float, ...]:
    q = tuple(float(v) for v in q)
    if len(q) != s.nvars:
        raise ValidationError(f"point has {len(q)} coordinates, structure lives on R^{s.nvars}")
    return q


def _level_words(s: SRStructure, length: int):
    """Nonzero right-nested words of a given length, in lexicographic order."""
    return [w for w in itertools.product(range(s.rank), repeat=length)
            if not s.word(w).is_zero()]


def growth_vector(s: SRStructure, q, tol: float = DEFAULT_TOL,
                  max_step: int = DEFAULT_MAX_STEP) -> tuple[int, ...]:
    """Dimensions ``(k_1, ..., k_m)`` of the flag at ``q``.

    Raises :class:`NotBracketGenerating` when all brackets of some length
    vanish identically, or when ``max_step`` is reached below full rank.
    """
    q = _check_point(s, q)
    n, k = s.nvars, s.rank
    H = s.horizontal_values(q)
    r = numerical_rank(H, tol)
    if r < k:
        raise RankDeficientHorizontal(q, r, k)
    dims = [k]
    columns = [H]
    length = 1
    while dims[-1] < n:
        length += 1
        if length > max_step:
            raise NotBracketGenerating(q, dims[-1], n)
        words = _level_words(s, length)
        if not words:
            # every longer bracket vanishes too
            raise NotBracketGenerating(q, dims[-1], n)
        columns.append(np.column_stack([s.word(w).at(q) for w in words]))
        dims.append(numerical_rank(np.hstack(columns), tol))
    return tuple(dims)


def hausdorff_dimension(flag_dims: Sequence[int]) -> int:
    """``Q = sum_i i * (k_i - k_(i-1))``."""
    Q, prev = 0, 0
    for i, ki in enumerate(flag_dims, start=1):
        if ki < prev:
            raise ValidationError(f"flag dimensions must be non-decreasing: {tuple(flag_dims)}")
        Q += i * (ki - prev)
        prev = ki
    return Q


@dataclass(frozen=True)
class AdaptedFrame:
    """n global polynomial fields, adapted to the flag at ``basepoint``.

    ``words[i]`` is the 1-based bracket word realizing ``fields[i]``, or
    ``None`` for a user-supplied completion field.  ``levels[i]`` is the
    flag level the field belongs to.
    """

    structure: SRStructure
    basepoint: tuple[float, ...]
    flag_dims: tuple[int, ...]
    fields: tuple[VectorField, ...]
    words: tuple[tuple[int, ...] | None, ...]
    tol: float = DEFAULT_TOL
    levels: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        levels = []
        prev = 0
        for j, kj in enumerate(self.flag_dims, start=1):
            levels.extend([j] * (kj - prev))
            prev = kj
        object.__setattr__(self, "levels", tuple(levels))

    @property
    def n(self) -> int:
        return len(self.fields)

    @property
    def k(self) -> int:
        return self.flag_dims[0]

    @property
    def step(self) -> int:
        return len(self.flag_dims)

    def level_range(self, j: int) -> range:
        """0-based indices of frame fields at level ``j`` (1-based level)."""
        lo = self.flag_dims[j - 2] if j >= 2 else 0
        return range(lo, self.flag_dims[j - 1])

    def matrix(self, q) -> np.ndarray:
        """n x n matrix whose columns are the frame fields at ``q``."""
        return np.column_stack([f.at(q) for f in self.fields])

    def matrix_many(self, points) -> np.ndarray:
        """Frame matrices at points ``(N, n)``; returns ``(N, n, n)``."""
        return np.stack([f.eval_many(points) for f in self.fields], axis=-1)

    def word_labels(self) -> list[str]:
        out = []
        for w in self.words:
            out.append("completion" if w is None else "".join(map(str, w)))
        return out


def _check_frame_conditioning(M: np.ndarray, q) -> None:
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularPointError(
            f"adapted frame matrix is ill-conditioned at {tuple(q)} (cond={cond:.3g})")


def adapted_frame(s: SRStructure, q, tol: float = DEFAULT_TOL,
                  completion: Sequence[VectorField] | None = None,
                  max_step: int = DEFAULT_MAX_STEP) -> AdaptedFrame:
    """Adapted frame at ``q``.

    Without ``completion``, bracket words are scanned by length then
    lexicographically and a word is kept iff it raises the numerical rank
    of the kept set.  With ``completion``, the given n - k fields are used
    in order (the first k_2 - k at level 2, and so on) after checking that
    they are adapted at ``q``.

    Only certified at ``q``: the returned global fields may stop being
    adapted elsewhere, which every pointwise consumer re-checks.
    """
    q = _check_point(s, q)
    dims = growth_vector(s, q, tol, max_step)
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise SingularPointError(
            f"growth vector {dims} at {q} is not strictly increasing; "
            "the point lies on a non-equiregular stratum")
    n, k = s.nvars, s.rank
    fields = list(s.fields)
    words: list = [(i + 1,) for i in range(k)]

    if completion is None:
        kept = s.horizontal_values(q)
        rank = k
        for length in range(2, len(dims) + 1):
            for w in _level_words(s, length):
                v = s.word(w).at(q)
                trial = np.column_stack([kept, v])
                r = numerical_rank(trial, tol)
                if r > rank:
                    kept, rank = trial, r
                    fields.append(s.word(w))
                    words.append(tuple(i + 1 for i in w))
                if rank == dims[length - 1]:
                    break
            if rank != dims[length - 1]:
                raise SingularPointError(
                    f"greedy selection reached rank {rank} at level {length}, "
                    f"expected {dims[length - 1]} at {q}")
    else:
        completion = list(completion)
        if len(completion) != n - k:
            raise ValidationError(f"completion needs {n - k} fields, got {len(completion)}")
        for c in completion:
            if not isinstance(c, VectorField) or c.nvars != n:
                raise ValidationError("completion fields must be vector fields on R^n")
        fields.extend(completion)
        words.extend([None] * len(completion))
        values = np.column_stack([f.at(q) for f in fields])
        span = s.horizontal_values(q)
        for length in range(2, len(dims) + 1):
            kj = dims[length - 1]
            span = np.column_stack([span] + [s.word(w).at(q) for w in _level_words(s, length)])
            own = numerical_rank(values[:, :kj], tol)
            joint = numerical_rank(np.column_stack([span, values[:, :kj]]), tol)
            if own != kj or joint != kj:
                raise ValidationError(
                    f"completion is not adapted at {q}: level {length} fields "
                    f"span rank {own} (joint {joint}), expected {kj}")

    frame = AdaptedFrame(s, q, dims, tuple(fields), tuple(words), tol)
    _check_frame_conditioning(frame.matrix(q), q)
    return frame


@dataclass
class EquiregularityReport:
    strata: dict[tuple[int, ...], list[tuple[float, ...]]]
    failures: list[tuple[tuple[float, ...], str]]

    @property
    def equiregular(self) -> bool:
        return len(self.strata) == 1 and not self.failures

    @property
    def growth_vectors(self) -> list[tuple[int, ...]]:
        return list(self.strata)


def check_equiregular(s: SRStructure, sample, tol: float = DEFAULT_TOL,
                      max_step: int = DEFAULT_MAX_STEP) -> EquiregularityReport:
    strata: dict = {}
    failures = []
    for q in sample:
        q = tuple(float(v) for v in q)
        try:
            g = growth_vector(s, q, tol, max_step)
        except SingularPointError as exc:
            failures.append((q, str(exc)))
            continue
        strata.setdefault(g, []).append(q)
    return EquiregularityReport(strata, failures)
