import random
from itertools import combinations
from fractions import Fraction

import pytest

import checks
import oracles
from tordeg.errors import TordegError
from tordeg.fans import newton_polytope, support_function
from tordeg.polytopes import (
    barycenter,
    barycentric_subdivision,
    convex_hull,
    face_lattice,
    maximal_chains,
    normal_fan,
    tangent_wedge,
)


@pytest.mark.parametrize("kind", ["face_lattice", "normal_fan", "newton"])
def test_kernel_matches_oracle(oracle_report, kind):
    rows, _ = oracle_report
    bad = [(r["points"], r[kind]) for r in rows if r[kind]]
    assert not bad


def test_random_sets_cover_both_dimensions(point_sets):
    assert len(point_sets) >= 100
    assert {len(p[0]) for p in point_sets} == {2, 3}
    assert all(len(p) <= 8 for p in point_sets)


def test_oracle_agrees_on_a_triangle():
    pts = [(0, 0), (2, 0), (0, 2)]
    assert checks.all_problems(pts) == []
    faces, verts = oracles.brute_faces(pts)
    assert verts == {(0, 0), (2, 0), (0, 2)}
    assert frozenset({(0, 0), (2, 0)}) in faces
    assert len(faces) == 7


def test_interior_points_are_dropped():
    p = convex_hull([(1, 2), (3, 1), (0, 0), (2, 5)])
    assert set(p.vertices) == {(3, 1), (0, 0), (2, 5)}


def test_square_lattice():
    p = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert face_lattice(p).f_vector() == [4, 4, 1]
    fan = normal_fan(p)
    assert sorted(fan.rays) == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_cube_f_vector():
    cube = convex_hull([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])
    assert face_lattice(cube).f_vector() == [8, 12, 6, 1]


def test_support_function_is_minus_min():
    p = convex_hull([(0, 0), (2, 0), (0, 1)])
    f = support_function(p)
    assert f((1, 1)) == 0
    assert f((-1, 0)) == 2
    assert f((0, -1)) == 1
    assert newton_polytope(f).vertices == p.vertices


def test_lower_dimensional_polytope_uses_intrinsic_chart():
    seg = convex_hull([(0, 0, 0), (2, 2, 0)])
    assert seg.dim_intrinsic == 1 and seg.dim_ambient == 3
    assert face_lattice(seg).f_vector() == [2, 1]


def test_barycenter_of_triangle():
    p = convex_hull([(0, 0), (3, 0), (0, 3)])
    assert barycenter(p) == (Fraction(1), Fraction(1))


def test_empty_input_rejected():
    with pytest.raises(TordegError):
        convex_hull([])


def test_standard_simplex_in_its_plane():
    p = convex_hull([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert p.dim_intrinsic == 2
    assert face_lattice(p).f_vector() == [3, 3, 1]
    assert barycenter(p) == (Fraction(1, 3),) * 3
    # fan of P^2 in the intrinsic chart: three rays summing to zero, any two a lattice basis
    rays = normal_fan(p).rays
    assert len(rays) == 3 and tuple(map(sum, zip(*rays))) == (0, 0)
    assert all(abs(a[0] * b[1] - a[1] * b[0]) == 1 for a, b in combinations(rays, 2))


def test_half_point_is_not_a_vertex():
    p = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1), (Fraction(1, 2), Fraction(1, 2))])
    assert sorted(p.vertices) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert barycenter(p) == (Fraction(1, 2), Fraction(1, 2))


@pytest.mark.parametrize("pts,count", [
    ([(0,), (1,)], 2),
    ([(0, 0), (1, 0), (0, 1)], 6),
    ([(0, 0), (1, 0), (0, 1), (1, 1)], 8),
    ([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], 24),
])
def test_barycentric_subdivision_counts(pts, count):
    p = convex_hull(pts)
    simplices = barycentric_subdivision(p)
    assert len(simplices) == count == len(maximal_chains(p))


def test_segment_subdivision_meets_at_midpoint():
    halves = barycentric_subdivision(convex_hull([(0,), (1,)]))
    assert {s.vertices[-1] for s in halves} == {(Fraction(1, 2),)}


def test_tangent_wedges():
    assert sorted(tangent_wedge(convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)]), (0, 0)).rays) == [(0, 1), (1, 0)]
    assert tangent_wedge(convex_hull([(1, 0), (1, 5)]), (1, 0)).rays == ((0, 1),)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_segment_normal_fan_independent_of_length(n):
    assert sorted(normal_fan(convex_hull([(0,), (n,)])).rays) == [(-1,), (1,)]


def test_barycenter_is_affine_equivariant():
    rng = random.Random(5)
    for _ in range(30):
        pts = [(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(5)]
        p = convex_hull(pts)
        if p.dim_intrinsic < 2:
            continue
        a = rng.randint(-3, 3)
        m = ((1, a), (0, 1)) if rng.random() < 0.5 else ((0, 1), (1, a))
        t = (rng.randint(-3, 3), rng.randint(-3, 3))
        image = convex_hull([tuple(sum(m[i][j] * v[j] for j in range(2)) + t[i] for i in range(2)) for v in p.vertices])
        b = barycenter(p)
        assert barycenter(image) == tuple(sum(m[i][j] * b[j] for j in range(2)) + t[i] for i in range(2))


def test_faces_closed_under_intersection(point_sets):
    for pts in point_sets[:30]:
        faces = set(face_lattice(convex_hull(pts)).faces)
        assert all((f & g) in faces for f in faces for g in faces)
