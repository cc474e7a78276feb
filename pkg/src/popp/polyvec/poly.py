"""Sparse multivariate polynomials with exact coefficients."""

from __future__ import annotations

import contextlib
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import TermCapExceeded, ValidationError
from .scalars import Surd, as_exact, coeff_str

DEFAULT_TERM_CAP = 10**6
_term_cap = DEFAULT_TERM_CAP


def get_term_cap() -> int:
    return _term_cap


def set_term_cap(cap: int) -> None:
    global _term_cap
    if cap < 1:
        raise ValueError("term cap must be positive")
    _term_cap = int(cap)


@contextlib.contextmanager
def term_cap(cap: int):
    """Temporarily change the maximum number of terms a result may have."""
    old = _term_cap
    set_term_cap(cap)
    try:
        yield
    finally:
        set_term_cap(old)


def _check_cap(n_terms: int) -> None:
    if n_terms > _term_cap:
        raise TermCapExceeded(f"result would have {n_terms} terms (cap {_term_cap})")


def grlex_key(exponent: tuple[int, ...]):
    """Sort key: total degree descending, then lexicographic descending."""
    return (-sum(exponent), tuple(-e for e in exponent))


class Poly:
    """Polynomial in ``nvars`` variables stored as ``{exponent: coefficient}``.

    Instances are immutable and canonical: zero coefficients are never
    stored, so two equal polynomials have equal term maps.

    >>> x, y = Poly.variables(2)
    >>> p = x * y**2
    >>> p.partial(1)
    Poly(2, '2*x1*x2')
    """

    __slots__ = ("nvars", "_terms", "_hash", "_compiled")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        if nvars < 1:
            raise ValidationError("nvars must be positive")
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ValidationError(
                    f"exponent {exp} has length {len(exp)}, expected {nvars}")
            if any(e < 0 for e in exp):
                raise ValidationError(f"negative exponent in {exp}")
            c = as_exact(c)
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c
                if clean[exp] == 0:
                    del clean[exp]
        self.nvars = nvars
        self._terms = clean
        self._hash = None
        self._compiled = None

    @classmethod
    def _raw(cls, nvars, terms):
        # Trusted constructor: terms already canonical.
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        obj._compiled = None
        return obj

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value) -> Poly:
        c = as_exact(value)
        if c == 0:
            return cls.zero(nvars)
        return cls._raw(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, index: int) -> Poly:
        if not 0 <= index < nvars:
            raise ValidationError(f"variable index {index} out of range for nvars={nvars}")
        exp = [0] * nvars
        exp[index] = 1
        return cls._raw(nvars, {tuple(exp): Fraction(1)})

    @classmethod
    def variables(cls, nvars: int) -> tuple[Poly, ...]:
        return tuple(cls.var(nvars, i) for i in range(nvars))

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    @property
    def is_rational(self) -> bool:
        return not any(isinstance(c, Surd) for c in self._terms.values())

    def constant_term(self):
        return self._terms.get((0,) * self.nvars, Fraction(0))

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValidationError(
                    f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        try:
            return Poly.constant(self.nvars, other)
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for exp, c in other._terms.items():
            s = out.get(exp, 0) + c
            if s == 0:
                out.pop(exp, None)
            else:
                out[exp] = s
        _check_cap(len(out))
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return Poly.zero(self.nvars)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
            # fail early instead of finishing a huge product
            _check_cap(len(out))
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise ValidationError("can only divide by a nonzero constant")
            other = other.constant_term()
        c = as_exact(other)
        if c == 0:
            raise ZeroDivisionError("polynomial division by zero")
        inv = 1 / c
        return Poly._raw(self.nvars, {e: v * inv for e, v in self._terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValidationError("exponent must be a non-negative integer")
        result = Poly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        try:
            c = as_exact(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.is_constant() and self.constant_term() == c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus ---------------------------------------------------------

    def partial(self, var: int) -> Poly:
        if not 0 <= var < self.nvars:
            raise ValidationError(f"variable index {var} out of range for nvars={self.nvars}")
        out = {}
        for exp, c in self._terms.items():
            e = exp[var]
            if e:
                new = exp[:var] + (e - 1,) + exp[var + 1:]
                out[new] = c * e
        return Poly._raw(self.nvars, out)

    def gradient(self) -> tuple[Poly, ...]:
        return tuple(self.partial(i) for i in range(self.nvars))

    def compose(self, subs: Sequence[Poly]) -> Poly:
        """Substitute ``subs[i]`` for variable ``i``.

        The substituted polynomials may live in a different number of
        variables; the result lives in theirs.
        """
        if len(subs) != self.nvars:
            raise ValidationError(f"need {self.nvars} substitutions, got {len(subs)}")
        m = subs[0].nvars
        if any(s.nvars != m for s in subs):
            raise ValidationError("substitutions have inconsistent nvars")
        powers: list[dict[int, Poly]] = [{0: Poly.constant(m, 1)} for _ in subs]

        def power(i, e):
            table = powers[i]
            if e not in table:
                table[e] = power(i, e - 1) * subs[i]
            return table[e]

        result = Poly.zero(m)
        for exp, c in self._terms.items():
            term = Poly.constant(m, c)
            for i, e in enumerate(exp):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    # -- evaluation -------------------------------------------------------

    def __call__(self, point) -> float:
        return poly_eval(self, point)

    def eval_exact(self, point):
        """Exact value at a point with rational coordinates."""
        if len(point) != self.nvars:
            raise ValidationError(
                f"point has {len(point)} coordinates, polynomial has {self.nvars} variables")
        q = [as_exact(v) for v in point]
        total = Fraction(0)
        for exp, c in self._terms.items():
            t = c
            for v, e in zip(q, exp):
                if e:
                    t = t * v**e
            total = total + t
        return total

    def _compile(self):
        if self._compiled is None:
            if self._terms:
                exps = np.array(list(self._terms.keys()), dtype=np.int64)
                coeffs = np.array([float(c) for c in self._terms.values()])
            else:
                exps = np.zeros((0, self.nvars), dtype=np.int64)
                coeffs = np.zeros(0)
            self._compiled = (exps, coeffs)
        return self._compiled

    def eval_many(self, points) -> np.ndarray:
        """Floating-point values at an array of points with shape ``(..., nvars)``."""
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.nvars:
            raise ValidationError(
                f"points have {pts.shape[-1]} coordinates, polynomial has {self.nvars} variables")
        exps, coeffs = self._compile()
        out = np.zeros(pts.shape[:-1])
        if not len(coeffs):
            return out
        maxdeg = exps.max(axis=0)
        tables = []
        for i in range(self.nvars):
            tab = [np.ones(pts.shape[:-1])]
            for _ in range(int(maxdeg[i])):
                tab.append(tab[-1] * pts[..., i])
            tables.append(tab)
        for exp, c in zip(exps, coeffs):
            term = None
            for i, e in enumerate(exp):
                if e:
                    term = tables[i][e] if term is None else term * tables[i][e]
            out += c if term is None else c * term
        return out

    # -- text -------------------------------------------------------------

    def to_string(self, names: Sequence[str] | None = None) -> str:
        """Render in the structure-file grammar; parses back to ``self``."""
        if not self._terms:
            return "0"
        names = list(names) if names is not None else default_names(self.nvars)
        parts = []
        for exp, c in self.items():
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}"
                for i, e in enumerate(exp) if e)
            neg = not isinstance(c, Surd) and c < 0
            mag = -c if neg else c
            cs = coeff_str(mag)
            if not mono:
                body = cs
            elif mag == 1:
                body = mono
            else:
                body = f"{cs}*{mono}"
            parts.append(("-" if neg else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"Poly({self.nvars}, {self.to_string()!r})"


def default_names(nvars: int) -> list[str]:
    if nvars <= 4:
        return ["x", "y", "z", "w"][:nvars]
    return [f"x{i + 1}" for i in range(nvars)]


def poly_eval(p: Poly, q) -> float:
    """Exact evaluation at ``q`` converted to float at the end."""
    return float(p.eval_exact(q))


def partial(p: Poly, var: int) -> Poly:
    return p.partial(var)


def poly_sum(polys: Iterable[Poly], nvars: int) -> Poly:
    out = Poly.zero(nvars)
    for p in polys:
        out = out + p
    return out
