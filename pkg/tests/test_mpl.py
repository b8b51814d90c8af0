import pytest

from tordeg import corpus
from tordeg.errors import NotConvex, SpecError
from tordeg.mpl import discrete_legendre, legendre_involution_check, mpl_from_kinks, triples_isomorphic


def cycle_data(t):
    """(length per cell id, kink per vertex id) of a one dimensional triple."""
    b = t.b
    lengths = {b.cell_ids[k]: abs(c.vertices[1][0] - c.vertices[0][0]) for k, c in enumerate(b.cells)}
    kinks = {b.class_name(k): v for k, v in t.phi.kinks().items()}
    return lengths, kinks


def test_cycle_swaps_lengths_and_degrees():
    r = discrete_legendre(corpus.cycle_triple((1, 2, 3), (2, 1, 1)))
    lengths, kinks = cycle_data(r.triple)
    assert lengths == {"v0": 2, "v1": 1, "v2": 1}
    assert kinks == {"x0": 1, "x1": 2, "x2": 3}


def test_single_segment_cycle():
    r = discrete_legendre(corpus.cycle_triple((4,), (3,)))
    assert cycle_data(r.triple) == ({"v0": 3}, {"x0": 4})


def test_torus_scales_inversely():
    r = discrete_legendre(corpus.torus_triple(2, kinks=2))
    assert [c.vertices for c in r.triple.b.cells] == [((0, 0), (0, 2), (2, 0), (2, 2))]
    assert set(r.triple.phi.kinks().values()) == {1}


def test_torus_box_lengths_become_kinks():
    t = corpus.torus_triple(2, [[1, 2], [3]], kinks=1)
    r = discrete_legendre(t)
    assert r.triple.b.f_vector == [2, 4, 2]
    assert sorted(r.triple.phi.kinks().values()) == [1, 2, 3, 3]


def test_k3_degree_two():
    t = corpus.k3_triple(2)
    r = discrete_legendre(t)
    assert r.triple.b.f_vector == [4, 6, 4]
    assert all(sorted(c.vertices) == [(0, 0), (0, 2), (2, 0)] for c in r.triple.b.cells)
    assert set(r.triple.phi.kinks().values()) == {1}
    assert triples_isomorphic(t, r.triple) is None


def test_k3_degree_one_is_self_dual():
    t = corpus.k3_triple(1)
    assert triples_isomorphic(t, discrete_legendre(t).triple) is not None


@pytest.mark.parametrize("make", [
    lambda: corpus.k3_triple(2),
    lambda: corpus.torus_triple(3, kinks=2),
    lambda: corpus.cycle_triple((2, 5), (3, 1)),
])
def test_involution(make):
    ok, iso = legendre_involution_check(make())
    assert ok and iso is not None


def test_faces_dualise_dimension():
    t = corpus.k3_triple(2)
    r = discrete_legendre(t)
    dual = r.triple.b
    for k, d in r.dual_class.items():
        assert t.b.classes[k].dim + dual.classes[d].dim == 2


def test_zero_kink_is_rejected():
    with pytest.raises(NotConvex):
        discrete_legendre(corpus.torus_triple(2, kinks=0))


def test_validate_reports_negative_kinks():
    phi = mpl_from_kinks(corpus.torus_complex(2), {"s0[0,1]": 1, "s0[0,2]": -1})
    report = phi.validate()
    assert report["compatible"] and report["integral"]
    assert not report["strictly_convex"]
    assert any("s0[0,2]" in f for f in report["failures"])


def test_kinks_must_cover_every_wall():
    with pytest.raises(SpecError):
        mpl_from_kinks(corpus.torus_complex(2), {"s0[0,1]": 1})
    with pytest.raises(SpecError):
        mpl_from_kinks(corpus.torus_complex(2), {"nowhere": 1, "s0[0,1]": 1, "s0[0,2]": 1})
