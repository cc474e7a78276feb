"""Polynomial vector fields on R^n and their Lie brackets."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import ValidationError
from .poly import Poly, default_names, poly_eval


class VectorField:
    """Vector field ``sum_i components[i] * d/dx_i`` with polynomial coefficients."""

    __slots__ = ("nvars", "components", "_hash")

    def __init__(self, components: Sequence[Poly]):
        components = tuple(components)
        if not components:
            raise ValidationError("a vector field needs at least one component")
        n = len(components)
        for c in components:
            if not isinstance(c, Poly):
                raise ValidationError(f"component {c!r} is not a Poly")
            if c.nvars != n:
                raise ValidationError(
                    f"component in {c.nvars} variables for a field on R^{n}")
        self.nvars = n
        self.components = components
        self._hash = None

    @classmethod
    def zero(cls, nvars: int) -> VectorField:
        return cls([Poly.zero(nvars)] * nvars)

    @classmethod
    def coordinate(cls, nvars: int, index: int) -> VectorField:
        """The constant field d/dx_index."""
        comps = [Poly.zero(nvars)] * nvars
        comps[index] = Poly.constant(nvars, 1)
        return cls(comps)

    @classmethod
    def constant(cls, values) -> VectorField:
        n = len(values)
        return cls([Poly.constant(n, v) for v in values])

    def _check(self, other: VectorField):
        if not isinstance(other, VectorField):
            raise ValidationError(f"expected a VectorField, got {type(other).__name__}")
        if other.nvars != self.nvars:
            raise ValidationError(f"dimension mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        self._check(other)
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        self._check(other)
        return VectorField([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return VectorField([-a for a in self.components])

    def __mul__(self, f):
        """Multiply by a scalar or a polynomial function."""
        return VectorField([f * a for a in self.components])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.components)
        return self._hash

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __call__(self, f: Poly) -> Poly:
        return directional_derivative(self, f)

    def bracket(self, other: VectorField) -> VectorField:
        return lie_bracket(self, other)

    def at(self, q) -> np.ndarray:
        """Value at ``q``, exact evaluation rounded to float."""
        if len(q) != self.nvars:
            raise ValidationError(f"point has {len(q)} coordinates, field lives on R^{self.nvars}")
        return np.array([poly_eval(c, q) for c in self.components])

    def eval_many(self, points) -> np.ndarray:
        """Values at points of shape ``(..., n)``; returns ``(..., n)``."""
        return np.stack([c.eval_many(points) for c in self.components], axis=-1)

    def euclidean_divergence(self) -> Poly:
        """Divergence against Lebesgue measure, ``sum_i d_i X^i``."""
        out = Poly.zero(self.nvars)
        for i, c in enumerate(self.components):
            out = out + c.partial(i)
        return out

    def to_strings(self, names=None) -> list[str]:
        return [c.to_string(names) for c in self.components]

    def __repr__(self):
        names = default_names(self.nvars)
        parts = [f"({c})*d{names[i]}" for i, c in enumerate(self.components) if not c.is_zero()]
        return "VectorField(" + (" + ".join(parts) or "0") + ")"


def directional_derivative(X: VectorField, f: Poly) -> Poly:
    """``X(f) = sum_j X^j * df/dx_j``, exact."""
    if f.nvars != X.nvars:
        raise ValidationError(f"dimension mismatch: field on R^{X.nvars}, function of {f.nvars} vars")
    out = Poly.zero(X.nvars)
    for j, c in enumerate(X.components):
        if not c.is_zero():
            d = f.partial(j)
            if not d.is_zero():
                out = out + c * d
    return out


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y]^i = X(Y^i) - Y(X^i)``."""
    X._check(Y)
    return VectorField([directional_derivative(X, yi) - directional_derivative(Y, xi)
                        for xi, yi in zip(X.components, Y.components)])


def nested_bracket(fields: Sequence[VectorField], word: Sequence[int]) -> VectorField:
    """Right-nested bracket ``[X_i1, [X_i2, ..., [X_i(j-1), X_ij]]]`` (0-based indices)."""
    if not word:
        raise ValidationError("empty bracket word")
    out = fields[word[-1]]
    for i in reversed(word[:-1]):
        out = lie_bracket(fields[i], out)
    return out
