"""Exact polynomial arithmetic and polynomial vector-field calculus."""

from .fields import VectorField, directional_derivative, lie_bracket, nested_bracket
from .grammar import parse_poly
from .poly import (
    DEFAULT_TERM_CAP,
    Poly,
    default_names,
    get_term_cap,
    partial,
    poly_eval,
    set_term_cap,
    term_cap,
)
from .scalars import Surd

__all__ = [
    "DEFAULT_TERM_CAP",
    "Poly",
    "Surd",
    "VectorField",
    "default_names",
    "directional_derivative",
    "get_term_cap",
    "lie_bracket",
    "nested_bracket",
    "parse_poly",
    "partial",
    "poly_eval",
    "set_term_cap",
    "term_cap",
]
