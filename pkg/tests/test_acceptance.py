"""Acceptance criteria, one test each.

Every criterion records a PASS/FAIL line; the lines are printed in the
pytest terminal summary and also when this file is run as a script.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from popp.builtins import (
    BUILTINS,
    CARNOT_GROUPS,
    builtin,
    heisenberg,
    heisenberg_dilation,
    heisenberg_translation,
    martinet,
)
from popp.flag import adapted_frame
from popp.polyvec import Poly, VectorField, lie_bracket
from popp.report import oracle_deviation
from popp.sublap import frame_divergence, frame_divergences_many, structure_constants, symmetry_check
from popp.volume import (
    adapted_constants,
    contact_invariant,
    coordinate_density,
    gram_matrices,
    popp_density_adapted,
)
from popp.maps import check_volume_preserving, is_isometry

RESULTS: list[str] = []
DZ = VectorField.coordinate(3, 2)


def record(number, title, ok, detail):
    RESULTS.append(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
    assert ok, detail


def sample(name, count=20, seed=2024):
    s = builtin(name)
    r = np.random.default_rng(seed)
    pts = r.uniform(-1, 1, (count, s.nvars))
    if name == "martinet":
        pts[:, 1] = r.choice([-1, 1], count) * r.uniform(0.1, 2, count)
    return pts


def test_criterion_01_carnot_density_is_one():
    s = builtin("carnot-k3")
    err = max(abs(coordinate_density(s, q) - 1) for q in sample("carnot-k3"))
    record(1, "carnot-k3 coordinate density = 1", err < 1e-10, f"max rel err {err:.2e}")


def test_criterion_02_martinet_density():
    s = martinet()
    C = 1 / (2 * math.sqrt(2))
    pts = sample("martinet")
    dens = np.array([coordinate_density(s, q) for q in pts])
    err = np.max(np.abs(dens * np.abs(pts[:, 1]) / C - 1))
    scaled = dens * np.abs(pts[:, 1])
    spread = (scaled.max() - scaled.min()) / scaled.mean()
    record(2, "Martinet density = C/|y|, C = 1/(2 sqrt 2)", err < 1e-9 and spread < 1e-9,
           f"max rel err {err:.2e}, spread of density*|y| {spread:.2e}")


def test_criterion_03_oracle_gram_duality():
    worst = 0.0
    for name in BUILTINS:
        s = builtin(name)
        for q in sample(name, seed=3):
            worst = max(worst, oracle_deviation(adapted_frame(s, q), q))
    record(3, "oracle Gram = B_j^-1 on all builtins", worst < 1e-9, f"max rel dev {worst:.2e}")


def test_criterion_04_frame_independence():
    worst = 0.0
    h = heisenberg()
    for q in sample("heisenberg", seed=4):
        a = coordinate_density(h, q, completion=[DZ])
        b = coordinate_density(h, q, completion=[DZ + h.fields[0]])
        worst = max(worst, abs(a / b - 1))
    m = martinet()
    for q in sample("martinet", seed=4):
        a = coordinate_density(m, q)  # frame X, Y, [X, Y]
        b = coordinate_density(m, q, completion=[DZ])
        worst = max(worst, abs(a / b - 1))
    record(4, "density independent of adapted completion", worst < 1e-10, f"max rel gap {worst:.2e}")


def test_criterion_05_carnot_sum_of_squares():
    worst = 0.0
    for name in ("heisenberg", "engel", "carnot-k3"):
        pts = sample(name, seed=5)
        frame = adapted_frame(builtin(name), pts[0])
        worst = max(worst, float(np.max(np.abs(frame_divergences_many(frame, pts).values))))
    record(5, "first-order coefficients vanish on Carnot groups", worst < 1e-8, f"max |a_i| {worst:.2e}")


def test_criterion_06_martinet_divergence():
    worst = 0.0
    for y in (0.25, 0.5, 1.0, 2.0):
        q = (0.0, y, 0.0)
        frame = adapted_frame(martinet(), q, completion=[DZ])
        worst = max(worst, abs(frame_divergence(frame, q, 1) / (-1 / y) - 1))
    record(6, "Martinet div Y = -1/y", worst < 1e-6, f"max rel err {worst:.2e}")


def test_criterion_07_contact_identity():
    worst = 0.0
    for name in ("heisenberg", "martinet"):
        s = builtin(name)
        for q in sample(name, seed=7):
            J2 = contact_invariant(s, DZ, q)
            dens = popp_density_adapted(gram_matrices(adapted_constants(adapted_frame(s, q, completion=[DZ]))))
            worst = max(worst, abs(J2 * dens**2 - 1))
    record(7, "sum (c^0_ij)^2 = 1/density^2", worst < 1e-10, f"max rel err {worst:.2e}")


def test_criterion_08_isometry_invariance():
    h = heisenberg()
    pts = sample("heisenberg", seed=8)
    r = np.random.default_rng(8)
    ok = True
    for _ in range(3):
        m = heisenberg_translation(*(Fraction(int(v), 4) for v in r.integers(-12, 12, 3)))
        ok &= is_isometry(m, h, pts, 1e-8).passed and check_volume_preserving(m, h, pts, 1e-8).passed
    dil = heisenberg_dilation(2)
    iso = is_isometry(dil, h, pts, 1e-8)
    vol = check_volume_preserving(dil, h, pts, 1e-8)
    gram_ok = all(np.allclose(G, 4 * np.eye(2), atol=1e-10) for G in iso.gram_matrices)
    ratio_ok = np.allclose(vol.ratios, 16, rtol=1e-10)
    ok &= (not iso.passed) and (not vol.passed) and gram_ok and ratio_ok
    record(8, "translations preserve metric and volume; dilation gives 4 and 16", bool(ok),
           f"dilation Gram factor {np.mean([G[0, 0] for G in iso.gram_matrices]):.6g}, "
           f"volume factor {np.mean(vol.ratios):.6g}")


@pytest.mark.slow
def test_criterion_09_integration_by_parts():
    x, y, z = Poly.variables(3)
    f = ((1 - x**2) * (1 - y**2) * (1 - z**2)) ** 2 * (1 + x + y * z)
    frame = adapted_frame(heisenberg(), (0, 0, 0))
    box = ((-1, -1, -1), (1, 1, 1))
    errs = []
    for n in (41, 81):
        lhs, rhs = symmetry_check(frame, f, f, box, n)
        errs.append(abs(lhs - rhs) / abs(rhs))
    ok = errs[0] < 0.01 and errs[1] < 0.0025 and errs[1] < errs[0]
    record(9, "integral of f Lap f = -integral of |grad f|^2", ok,
           f"rel gap {errs[0]:.2e} on 41^3, {errs[1]:.2e} on 81^3")


_CASES = []


def _polys(n):
    mono = st.tuples(*[st.integers(0, 2)] * n).filter(lambda e: sum(e) <= 4)
    coef = st.fractions(min_value=-4, max_value=4, max_denominator=5)
    return st.dictionaries(mono, coef, max_size=3).map(lambda t: Poly(n, t))


@st.composite
def _fields(draw):
    n = draw(st.integers(1, 5))
    field = st.lists(_polys(n), min_size=n, max_size=n).map(VectorField)
    return draw(field), draw(field), draw(field), draw(_polys(n))


@settings(max_examples=200, deadline=None, derandomize=True)
@given(_fields())
def _bracket_properties(data):
    X, Y, Z, f = data
    ok = (lie_bracket(X, Y) + lie_bracket(Y, X)).is_zero()
    ok &= (lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X))
           + lie_bracket(Z, lie_bracket(X, Y))).is_zero()
    ok &= lie_bracket(X, Y * f) == Y * X(f) + lie_bracket(X, Y) * f
    _CASES.append(ok)
    assert ok


def test_criterion_10_exact_properties():
    _CASES.clear()
    _bracket_properties()
    gap = 0.0
    for name in BUILTINS:
        s = builtin(name)
        for q in sample(name, 5, seed=10):
            frame = adapted_frame(s, q)
            b2 = adapted_constants(frame, q).b[2]
            c = structure_constants(frame, q)
            lvl = list(frame.level_range(2))
            gap = max(gap, float(np.max(np.abs(b2 - np.moveaxis(c[:s.rank, :s.rank, lvl], -1, 0)))))
    ok = len(_CASES) >= 200 and all(_CASES) and gap <= 1e-10
    record(10, "bracket identities and b-c consistency", ok,
           f"{sum(_CASES)}/{len(_CASES)} random cases, max |b - c| {gap:.1e}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
