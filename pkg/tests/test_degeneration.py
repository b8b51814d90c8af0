from itertools import permutations

import pytest

import oracles
from tordeg import corpus
from tordeg.affine_complex import find_isomorphism
from tordeg.degeneration import (
    Component,
    DegenerationSpec,
    ZeroStratum,
    central_fiber,
    dual_intersection_complex,
    intersection_complex,
    local_model,
    polarization_to_mpl,
    roundtrip_matches,
    spec_strata_poset,
    strata_poset,
)
from tordeg.errors import (
    DimensionDefect,
    NotConvex,
    NotReducedAlongDivisor,
    SpecError,
    UnsupportedDimension,
)
from tordeg.exact import affine_from_points
from tordeg.mpl import discrete_legendre

SPECS = {
    "k3": corpus.k3_spec,
    "im_123": lambda: corpus.im_cycle(1, 2, 3),
    "im_22": lambda: corpus.im_cycle(2, 2),
    "abelian_22": lambda: corpus.abelian_spec((2, 2)),
    "abelian_23": lambda: corpus.abelian_spec((2, 3)),
}


def standard_simplex_map(cell):
    """An integral affine isomorphism from the cell onto conv(0, e_1, ..., e_n), if any."""
    n = cell.dim_ambient
    target = [(0,) * n] + [tuple(int(i == j) for i in range(n)) for j in range(n)]
    for perm in permutations(cell.vertices):
        a = affine_from_points(list(perm), target)
        if a is not None and a.in_aff_m():
            return a
    return None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_normal_crossing_point_gives_standard_simplex(n):
    b = dual_intersection_complex(corpus.nc_point(n), allow_boundary=True)
    (cell,) = b.cells
    assert len(cell.vertices) == n + 1
    assert standard_simplex_map(cell) is not None


@pytest.mark.parametrize("name", sorted(SPECS))
def test_central_fiber_roundtrip(name):
    d = SPECS[name]()
    b = dual_intersection_complex(d)
    assert roundtrip_matches(d, central_fiber(b)) == {"fans": True, "strata": True}
    assert strata_poset(b) == spec_strata_poset(d)


def test_k3_strata():
    poset = strata_poset(dual_intersection_complex(corpus.k3_spec()))
    assert sorted(k for k, v in poset.items() if v["dim"] == 0) == ["s0", "s1", "s2", "s3"]
    assert poset["v0+v1"] == {"dim": 1, "contains": ["s2", "s3"]}


def test_im_cycle_cells_have_node_lengths():
    b = dual_intersection_complex(corpus.im_cycle(1, 2, 3))
    assert sorted(abs(c.vertices[1][0] - c.vertices[0][0]) for c in b.cells) == [1, 2, 3]


@pytest.mark.parametrize("make,pol", [
    (lambda: corpus.im_cycle(1, 2, 3), lambda d: corpus.im_polarization(d, (2, 1, 1))),
    (corpus.k3_spec, lambda d: corpus.k3_polarization(d, 2)),
    (lambda: corpus.abelian_spec((2, 2)), lambda d: corpus.abelian_polarization(d, (1, 2))),
])
def test_intersection_complex_is_legendre_dual(make, pol):
    d = make()
    p = pol(d)
    b = dual_intersection_complex(d)
    dual = discrete_legendre((b, polarization_to_mpl(b, p))).triple.b
    assert find_isomorphism(intersection_complex(d, p), dual) is not None


def test_polarization_must_be_strictly_convex():
    d = corpus.im_cycle(1, 1)
    b = dual_intersection_complex(d)
    with pytest.raises(NotConvex):
        polarization_to_mpl(b, corpus.im_polarization(d, (0, 1)))


def test_ray_off_the_divisor_slice():
    z = ZeroStratum("x", [(1, 0), (1, 2)], (1, 1), ["a", "b"])
    d = DegenerationSpec([z], [Component("a", [(1,)], ["x"], []), Component("b", [(1,)], ["x"], [])])
    with pytest.raises(NotReducedAlongDivisor):
        dual_intersection_complex(d, allow_boundary=True)


def test_slice_of_wrong_dimension():
    z = ZeroStratum("x", [(1, 0, 0), (1, 1, 0)], (1, 0, 0), ["a", "b"])
    d = DegenerationSpec([z], [Component("a", [(1, 0)], ["x"], []), Component("b", [(1, 0)], ["x"], [])])
    with pytest.raises(DimensionDefect):
        dual_intersection_complex(d, allow_boundary=True)


def test_duplicate_components_rejected():
    z = ZeroStratum("x", [(1, 0), (1, 1)], (1, 0), ["a", "a"])
    d = DegenerationSpec([z], [Component("a", [(1,)], ["x"], [])])
    with pytest.raises(SpecError):
        dual_intersection_complex(d, allow_boundary=True)


def dual_hilbert_basis_is_minimal(lm):
    ineqs = oracles.cone_inequalities(lm.cone.rays)
    # dual cone: generated by the facet normals of the cone
    dual_ineqs = oracles.cone_inequalities(ineqs)
    gens = lm.generators
    if any(not all(sum(a * b for a, b in zip(r, g)) >= 0 for r in dual_ineqs) for g in gens):
        return False
    return all(not oracles.generated_by([h for h in gens if h != g], dual_ineqs, g) for g in gens)


@pytest.mark.parametrize("n", range(2, 7))
def test_segment_local_model(n):
    lm = local_model([(0,), (n,)])
    assert lm.generators == [(-1, n), (1, 0), (0, 1)]
    assert lm.relation_strings() == [f"u + v = {n}w"]
    assert lm.certified
    assert dual_hilbert_basis_is_minimal(lm)


def test_unit_segment_has_no_relation():
    lm = local_model([(0,), (1,)])
    assert lm.generators == [(-1, 1), (1, 0)]
    assert lm.relations == []
    assert lm.monomial_in_generators() == (1, 1)


def test_unit_square_is_conifold():
    lm = local_model([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert len(lm.generators) == 4
    assert lm.relation_strings() == ["u + s = v + w"]
    assert lm.certified
    assert dual_hilbert_basis_is_minimal(lm)


def test_dilated_triangle():
    lm = local_model([(0, 0), (2, 0), (0, 2)])
    assert lm.relation_strings() == ["u + v + w = 2s"]
    assert dual_hilbert_basis_is_minimal(lm)


def test_local_model_dimension_limit():
    with pytest.raises(UnsupportedDimension):
        local_model([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
