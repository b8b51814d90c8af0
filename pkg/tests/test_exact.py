from fractions import Fraction

import pytest

from tordeg.errors import NotInvertibleOverZ
from tordeg.exact import (
    AffineMap,
    affine_compose,
    affine_from_points,
    affine_invert,
    conjugator,
    det,
    dot,
    fmt_matrix,
    frac,
    inverse,
    inverse_transpose,
    mat_mul,
    nullspace,
    primitive_vector,
    rank,
    shear_normal_form,
    unimodular_completion,
)


def test_frac_rejects_floats():
    with pytest.raises(TypeError):
        frac(0.5)
    assert frac("3/6") == Fraction(1, 2)


def test_dot_mixed_types_stays_exact():
    assert dot((1, Fraction(1, 3)), (3, 3)) == 4
    assert dot((1, 2), (3, 4)) == 11
    assert isinstance(dot((Fraction(1, 2),), (2,)), int)


def test_det_and_inverse():
    m = ((2, 1), (1, 1))
    assert det(m) == 1
    assert inverse(m) == ((1, -1), (-1, 2))
    assert inverse_transpose(m) == ((1, -1), (-1, 2))


def test_rank_and_nullspace():
    rows = ((1, 2, 3), (2, 4, 6))
    assert rank(rows) == 1
    ns = nullspace(rows, 3)
    assert len(ns) == 2
    assert all(dot(r, v) == 0 for r in rows for v in ns)


def test_primitive_vector():
    assert primitive_vector((4, -6, 0)) == (2, -3, 0)


@pytest.mark.parametrize("u", [(1, 0), (3, 5), (0, 0, 1), (2, 3, 5)])
def test_unimodular_completion(u):
    m = unimodular_completion(u)
    assert det(m) in (1, -1)
    assert tuple(row[0] for row in m) == u


def test_affine_maps_compose_and_invert():
    a = AffineMap(((1, 1), (0, 1)), (2, -1))
    b = AffineMap(((0, -1), (1, 0)), (1, 0))
    ab = affine_compose(a, b)
    assert ab((1, 2)) == a(b((1, 2)))
    assert affine_compose(affine_invert(a), a).is_identity()


def test_non_unimodular_inverse_rejected():
    with pytest.raises(NotInvertibleOverZ):
        affine_invert(AffineMap(((2, 0), (0, 1)), (0, 0)))


def test_affine_from_points_recovers_map():
    a = AffineMap(((1, 2), (0, 1)), (3, 4))
    src = [(0, 0), (1, 0), (0, 1)]
    assert affine_from_points(src, [a(p) for p in src]) == a


def test_conjugator_witness():
    a = ((1, 0), (4, 1))
    b = ((1, 4), (0, 1))
    x = conjugator(a, b)
    assert x is not None
    assert mat_mul(mat_mul(x, a), inverse(x)) == b
    assert conjugator(((1, 0), (4, 1)), ((1, 0), (2, 1))) is None


@pytest.mark.parametrize("m,k", [(((1, 0), (4, 1)), 4), (((1, -4), (0, 1)), 4), (((-1, 1), (-4, 3)), 1), (((3, -2), (2, -1)), 2)])
def test_shear_normal_form(m, k):
    nf, x = shear_normal_form(m)
    assert nf == ((1, 0), (k, 1))
    assert mat_mul(mat_mul(x, m), inverse(x)) == nf


def test_shear_normal_form_rejects_rotation():
    assert shear_normal_form(((0, -1), (1, 0))) is None


def test_json_scalars():
    assert fmt_matrix(((1, Fraction(1, 2)),)) == [[1, "1/2"]]
