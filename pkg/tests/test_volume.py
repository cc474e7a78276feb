import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_points
from popp.builtins import (
    BUILTINS,
    builtin,
    engel,
    heisenberg,
    martinet,
    so3_orthonormal_basis,
    step2_carnot,
    vertical_completion,
)
from popp.errors import SingularPointError, ValidationError
from popp.flag import SRStructure, adapted_frame
from popp.polyvec import Poly, VectorField
from popp.volume import (
    adapted_constants,
    contact_invariant,
    coordinate_density,
    gram_matrices,
    oracle_gram,
    popp_density_adapted,
    popp_density_coordinates,
    popp_density_many,
    quotient_norm_oracle,
)

DZ = VectorField.coordinate(3, 2)
SQRT2 = math.sqrt(2)


def frame_z(s, q):
    return adapted_frame(s, q, completion=[DZ])


def test_adapted_constants_examples():
    q = (0.3, 0.5, -1.0)
    b = adapted_constants(adapted_frame(martinet(), q)).b[2]
    assert b.shape == (1, 2, 2)
    assert b[0, 0, 1] == pytest.approx(1) and b[0, 1, 0] == pytest.approx(-1)
    b = adapted_constants(frame_z(martinet(), q)).b[2]
    assert b[0, 0, 1] == pytest.approx(-2 * 0.5) and b[0, 1, 0] == pytest.approx(2 * 0.5)
    assert b[0, 0, 0] == 0 and b[0, 1, 1] == 0
    b = adapted_constants(frame_z(heisenberg(), (1, 2, 3))).b[2]
    assert b[0, 0, 1] == pytest.approx(1) and b[0, 1, 0] == pytest.approx(-1)


def test_gram_examples():
    g = gram_matrices(adapted_constants(frame_z(heisenberg(), (0, 0, 0))))
    assert np.allclose(g.matrices[1], [[2]])
    y = 0.7
    g = gram_matrices(adapted_constants(frame_z(martinet(), (0, y, 0))))
    assert g.matrices[1][0, 0] == pytest.approx(8 * y * y)


def test_carnot_gram_is_hilbert_schmidt():
    L = [[[0, 1, 0], [-1, 0, 2], [0, -2, 0]], [[0, 0, 1], [0, 0, 0], [-1, 0, 0]]]
    s = step2_carnot(L)
    B = gram_matrices(adapted_constants(adapted_frame(s, (0.1,) * 5,
                                                     completion=vertical_completion(s)))).matrices[1]
    Ln = np.array(L, dtype=float)
    expected = np.einsum("hij,lij->hl", Ln, Ln)
    assert np.allclose(B, expected)


def test_density_examples():
    assert coordinate_density(builtin("carnot-k3"), (0.2, -0.1, 0.5, 1, 2, 3)) == pytest.approx(1, rel=1e-12)
    for q in [(0, 0, 0), (1, 2, 3)]:
        f = frame_z(heisenberg(), q)
        g = gram_matrices(adapted_constants(f))
        assert popp_density_adapted(g) == pytest.approx(1 / SQRT2, rel=1e-13)
        assert popp_density_coordinates(f, g) == pytest.approx(1 / SQRT2, rel=1e-13)
    for y in (0.25, -1.0, 2.0):
        expected = 1 / (2 * SQRT2 * abs(y))
        assert coordinate_density(martinet(), (0.4, y, 1.0)) == pytest.approx(expected, rel=1e-12)
        f = adapted_frame(martinet(), (0.4, y, 1.0))  # frame X, Y, [X, Y]
        g = gram_matrices(adapted_constants(f))
        assert popp_density_adapted(g) == pytest.approx(1 / SQRT2, rel=1e-12)
        assert popp_density_coordinates(f, g) == pytest.approx(expected, rel=1e-12)


def test_engel_density():
    g = gram_matrices(adapted_constants(adapted_frame(engel(), (0, 0, 0, 0))))
    assert np.allclose(g.dets, [1, 2, 2])
    for q in random_points("engel", 5):
        assert coordinate_density(engel(), q) == pytest.approx(0.5, rel=1e-12)


def test_positivity_and_batched_density():
    for name in BUILTINS:
        s = builtin(name)
        pts = random_points(name, 10, seed=7)
        f = adapted_frame(s, pts[0])
        dens = popp_density_many(f, pts)
        for q, d in zip(pts, dens):
            g = gram_matrices(adapted_constants(f, q))
            assert all(v > 0 for v in g.dets)
            assert d == pytest.approx(coordinate_density(s, q), rel=1e-10)


def test_oracle_examples():
    f = frame_z(heisenberg(), (0.5, 0.5, 0))
    assert quotient_norm_oracle(f, (0.5, 0.5, 0), 2, [0, 0, 1]) == pytest.approx(1 / SQRT2)
    for y in (0.3, -1.5):
        q = (0, y, 0)
        f = frame_z(martinet(), q)
        assert quotient_norm_oracle(f, q, 2, [0, 0, 1]) == pytest.approx(1 / (2 * SQRT2 * abs(y)))
    q = (0.1, 0.2, 0.3, 0.4)
    f = adapted_frame(engel(), q)
    B = gram_matrices(adapted_constants(f)).matrices
    M = f.matrix(q)
    for j in (2, 3):
        for pos, col in enumerate(f.level_range(j)):
            norm = quotient_norm_oracle(f, q, j, M[:, col])
            assert norm == pytest.approx(math.sqrt(np.linalg.inv(B[j - 1])[pos, pos]), rel=1e-10)


def test_oracle_rejects_target_outside_level():
    f = adapted_frame(engel(), (0, 0, 0, 0))
    with pytest.raises(ValidationError):
        quotient_norm_oracle(f, (0, 0, 0, 0), 2, [0, 0, 0, 1])


def test_oracle_gram_is_inverse():
    q = (0.2, 0.9, -0.4)
    f = adapted_frame(martinet(), q)
    B = gram_matrices(adapted_constants(f)).matrices[1]
    assert np.allclose(oracle_gram(f, q, 2), np.linalg.inv(B), rtol=1e-10)


def test_contact_invariant():
    assert contact_invariant(heisenberg(), DZ, (1, 2, 3)) == pytest.approx(2)
    for y in (0.5, -2.0):
        q = (0.1, y, 0.2)
        val = contact_invariant(martinet(), DZ, q)
        assert val == pytest.approx(8 * y * y)
        f = frame_z(martinet(), q)
        dens = popp_density_adapted(gram_matrices(adapted_constants(f)))
        assert val == pytest.approx(1 / dens**2, rel=1e-10)
    flat = SRStructure([VectorField.coordinate(3, 0), VectorField.coordinate(3, 1)])
    with pytest.raises(SingularPointError):
        contact_invariant(flat, DZ, (0, 0, 0))
    with pytest.raises(ValidationError):
        contact_invariant(engel(), VectorField.coordinate(4, 3), (0, 0, 0, 0))


def test_frame_independence():
    x, y, z = Poly.variables(3)
    h = heisenberg()
    alt = DZ + h.fields[0]
    for q in [(0.3, -0.2, 1.0), (1, 1, 1)]:
        a = coordinate_density(h, q, completion=[DZ])
        b = coordinate_density(h, q, completion=[alt])
        assert a == pytest.approx(b, rel=1e-10)
    m = martinet()
    for q in random_points("martinet", 10):
        a = coordinate_density(m, q)
        b = coordinate_density(m, q, completion=[DZ])
        assert a == pytest.approx(b, rel=1e-10)


def test_rotation_invariance():
    c, s_ = Fraction(3, 5), Fraction(4, 5)
    for name in ("heisenberg", "martinet", "engel"):
        s = builtin(name)
        X1, X2 = s.fields
        rotated = SRStructure([X1 * c + X2 * s_, X1 * (-s_) + X2 * c])
        for q in random_points(name, 5, seed=11):
            assert coordinate_density(rotated, q) == pytest.approx(coordinate_density(s, q), rel=1e-10)


def test_so3_basis_is_orthonormal():
    L = np.array([[[float(v) for v in row] for row in m] for m in so3_orthonormal_basis()])
    assert np.allclose(np.einsum("hij,lij->hl", L, L), np.eye(3))
