"""Text grammar for polynomials.

::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' INT)*
    atom   := NUMBER | NAME | 'sqrt' '(' INT ')' | '(' expr ')' | ('+'|'-') factor

Variables are ``x1..xn``; for n <= 4 the aliases ``x, y, z, w`` also work.
Custom names may be supplied instead.  ``**`` is accepted as a synonym for
``^``.  Division is allowed only by nonzero constants.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from ..errors import PolyParseError
from .poly import Poly
from .scalars import Surd

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")

_ALIASES = ("x", "y", "z", "w")


def variable_table(nvars: int, names: Sequence[str] | None = None) -> dict[str, int]:
    table = {f"x{i + 1}": i for i in range(nvars)}
    if nvars <= 4:
        table.update({a: i for i, a in enumerate(_ALIASES[:nvars])})
    if names is not None:
        if len(names) != nvars:
            raise PolyParseError(f"{len(names)} variable names given for {nvars} variables")
        table.update({nm: i for i, nm in enumerate(names)})
    return table


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise PolyParseError("unexpected character", text, bad)
        num, name, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            tokens.append(("num", num, start))
        elif name is not None:
            tokens.append(("name", name, start))
        else:
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, nvars, table):
        self.text = text
        self.nvars = nvars
        self.table = table
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise PolyParseError(f"expected {value!r}", self.text, pos)

    def fail(self, msg):
        raise PolyParseError(msg, self.text, self.peek()[2])

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            p = p + rhs if op == "+" else p - rhs
        return p

    def term(self):
        p = self.factor()
        while self.peek()[1] in ("*", "/"):
            op, pos = self.take()[1:]
            rhs = self.factor()
            if op == "*":
                p = p * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise PolyParseError("division by a non-constant or zero", self.text, pos)
                p = p / rhs
        return p

    def factor(self):
        p = self.atom()
        while self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or not val.isdigit():
                raise PolyParseError("exponent must be a non-negative integer", self.text, pos)
            p = p ** int(val)
        return p

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Poly.constant(self.nvars, Fraction(val))
        if kind == "name":
            if val == "sqrt" and self.peek()[1] == "(":
                self.take()
                k2, v2, p2 = self.take()
                if k2 != "num" or not v2.isdigit():
                    raise PolyParseError("sqrt takes a non-negative integer literal", self.text, p2)
                self.expect(")")
                return Poly.constant(self.nvars, Surd.sqrt(int(v2)))
            if val not in self.table:
                raise PolyParseError(f"unknown variable {val!r}", self.text, pos)
            return Poly.var(self.nvars, self.table[val])
        if val == "(":
            p = self.expr()
            self.expect(")")
            return p
        if val in ("+", "-"):
            p = self.factor()
            return -p if val == "-" else p
        raise PolyParseError(f"unexpected token {val!r}", self.text, pos)


def parse_poly(text: str, nvars: int, names: Sequence[str] | None = None) -> Poly:
    """Parse ``text`` into a :class:`Poly` in ``nvars`` variables.

    >>> parse_poly("1/2*x - y^2", 3)
    Poly(3, '-y^2 + 1/2*x')
    """
    if not isinstance(text, str):
        if isinstance(text, (int, Fraction)):
            return Poly.constant(nvars, text)
        raise PolyParseError(f"expected a string, got {type(text).__name__}")
    try:
        return _Parser(text, nvars, variable_table(nvars, names)).parse()
    except ValueError as exc:
        if isinstance(exc, PolyParseError):
            raise
        raise PolyParseError(str(exc), text) from exc
