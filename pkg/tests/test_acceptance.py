"""One test per acceptance criterion; each records a PASS / FAIL / PARTIAL line."""
import random
import time
from itertools import permutations, product

import oracles
from fixtures import random_loop, random_triples
from tordeg import corpus
from tordeg.affine_complex import Step, find_isomorphism
from tordeg.degeneration import (
    central_fiber,
    dual_intersection_complex,
    intersection_complex,
    local_model,
    polarization_to_mpl,
    roundtrip_matches,
)
from tordeg.exact import affine_from_points, conjugator, shear_normal_form
from tordeg.fibration import holonomy_duality_check
from tordeg.mpl import discrete_legendre, legendre_involution_check, triples_isomorphic


def verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def swapped(lengths, degrees):
    """Whether the transform of the cycle triple has lengths ``degrees`` and kinks ``lengths``."""
    t = corpus.cycle_triple(lengths, degrees)
    r = discrete_legendre(t)
    db = r.triple.b
    p = len(lengths)
    got_len = {db.cell_ids[k]: abs(c.vertices[1][0] - c.vertices[0][0]) for k, c in enumerate(db.cells)}
    got_kink = {db.class_name(k): v for k, v in r.triple.phi.kinks().items()}
    ok = got_len == {f"v{i}": degrees[i] for i in range(p)} and got_kink == {f"x{i}": lengths[i] for i in range(p)}
    return ok, t, r


def test_criterion_1_elliptic_mirror_swap(acceptance):
    start = time.perf_counter()
    failures = []
    exhaustive = 0
    for p in (1, 2):
        for lengths in product(range(1, 6), repeat=p):
            for degrees in product(range(1, 6), repeat=p):
                ok, _, _ = swapped(lengths, degrees)
                exhaustive += 1
                if not ok:
                    failures.append((lengths, degrees))
    exhaustive_time = time.perf_counter() - start
    rng = random.Random(1)
    sampled = 0
    doubles = 0
    for p in (3, 4):
        for _ in range(60):
            lengths = tuple(rng.randint(1, 5) for _ in range(p))
            degrees = tuple(rng.randint(1, 5) for _ in range(p))
            ok, t, r = swapped(lengths, degrees)
            sampled += 1
            if not ok:
                failures.append((lengths, degrees))
            if sampled % 4 == 0:
                doubles += 1
                if triples_isomorphic(t, discrete_legendre(r.triple).triple) is None:
                    failures.append(("double", lengths, degrees))
    for lengths, degrees in [((1,), (1,)), ((5,), (2,)), ((1, 2), (3, 4))]:
        t = corpus.cycle_triple(lengths, degrees)
        doubles += 1
        if not legendre_involution_check(t)[0]:
            failures.append(("double", lengths, degrees))
    elapsed = time.perf_counter() - start
    total_space = sum(25 ** p for p in range(1, 5))
    detail = (
        f"{exhaustive} cases exhaustive for p<=2 in {exhaustive_time:.2f}s, {sampled} seeded cases for p=3,4, "
        f"{doubles} double transforms; {len(failures)} failures; {elapsed:.2f}s total; "
        f"the full p<=4 space has {total_space} cases and is not covered within 1 s"
    )
    acceptance(1, "elliptic mirror swap", "PARTIAL" if not failures else "FAIL", detail)
    assert not failures


def test_criterion_2_k3_holonomy(acceptance):
    start = time.perf_counter()
    b = corpus.k3_tetrahedron()
    h = b.holonomy("v2,s1,v1,s2,v2")
    nf, x = shear_normal_form(h.linear)
    target = ((1, 0), (4, 1))
    witness = conjugator(h.linear, target)
    kept = len(b.minimal_discriminant())
    elapsed = time.perf_counter() - start
    ok = nf == target and witness is not None and kept == 6 and len(b.delta_prime) == 6 and elapsed < 1
    acceptance(2, "K3 holonomy", verdict(ok),
               f"linear part {h.linear}, normal form {nf}, conjugator {witness}, {kept} of 6 edge points kept, {elapsed:.2f}s")
    assert ok


def test_criterion_3_holonomy_duality(acceptance):
    start = time.perf_counter()
    rows = []
    for degree in (1, 2):
        t = corpus.k3_triple(degree)
        rng = random.Random(degree)
        loops = ["v2,s1,v1,s2,v2"] + [random_loop(t.b, rng, rng.randint(2, 6), start="v2")[1] for _ in range(10)]
        rows += holonomy_duality_check(t.b, discrete_legendre(t), loops)
    bad = [r for r in rows if not (r["natural_ok"] and r["conjugate_ok"])]
    elapsed = time.perf_counter() - start
    acceptance(3, "holonomy duality", verdict(not bad),
               f"{len(rows) - len(bad)}/{len(rows)} loops on K3 (degrees 1, 2) satisfy D = (L^-1 M L)^-T, {elapsed:.2f}s")
    assert not bad


def _minimal(lm):
    dual_ineqs = oracles.cone_inequalities(oracles.cone_inequalities(lm.cone.rays))
    gens = lm.generators
    inside = all(all(sum(a * b for a, b in zip(r, g)) >= 0 for r in dual_ineqs) for g in gens)
    irreducible = all(not oracles.generated_by([h for h in gens if h != g], dual_ineqs, g) for g in gens)
    return inside and irreducible


def test_criterion_4_local_models(acceptance):
    # one-time numba runtime load is reported apart from the timed run
    t0 = time.perf_counter()
    local_model([(0,), (7,)])
    warmup = time.perf_counter() - t0
    start = time.perf_counter()
    problems = []
    for n in range(1, 7):
        lm = local_model([(0,), (n,)])
        expected = [] if n == 1 else [f"u + v = {n}w"]
        if lm.relation_strings() != expected or not lm.certified or not _minimal(lm):
            problems.append(f"segment {n}")
        if n == 1 and lm.monomial_in_generators() != (1, 1):
            problems.append("segment 1 monomial")
    sq = local_model([(0, 0), (1, 0), (0, 1), (1, 1)])
    rel = sq.relations
    if len(rel) != 1 or sorted(rel[0][0]) != [0, 0, 1, 1] or sorted(rel[0][1]) != [0, 0, 1, 1] or not _minimal(sq):
        problems.append("unit square")
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 1
    acceptance(4, "local models", verdict(ok),
               f"segments n=2..6 give u + v = n w, n=1 gives rho = u + v with no relation, square gives "
               f"{sq.relation_strings()[0]}; Hilbert bases minimal; {elapsed:.2f}s (warmup {warmup:.2f}s) {problems or ''}".rstrip())
    assert ok


def test_criterion_5_central_fiber_roundtrip(acceptance):
    specs = {
        "k3": (corpus.k3_spec(), False),
        "im(1,1)": (corpus.im_cycle(1, 1), False),
        "im(1,2,3)": (corpus.im_cycle(1, 2, 3), False),
        "im(5,1,4,2)": (corpus.im_cycle(5, 1, 4, 2), False),
        "abelian 2x2": (corpus.abelian_spec((2, 2)), False),
        "abelian 3x2": (corpus.abelian_spec((3, 2)), False),
        "segment 3": (corpus.segment_spec(3), True),
    }
    specs.update({f"nc_point {n}": (corpus.nc_point(n), True) for n in (1, 2, 3)})
    bad = []
    for name, (d, boundary) in specs.items():
        b = dual_intersection_complex(d, allow_boundary=boundary)
        if roundtrip_matches(d, central_fiber(b)) != {"fans": True, "strata": True}:
            bad.append(name)
    simplices = []
    for n in (1, 2, 3):
        (cell,) = dual_intersection_complex(corpus.nc_point(n), allow_boundary=True).cells
        target = [(0,) * n] + [tuple(int(i == j) for i in range(n)) for j in range(n)]
        found = any(
            (a := affine_from_points(list(perm), target)) is not None and a.in_aff_m()
            for perm in permutations(cell.vertices)
        )
        if len(cell.vertices) != n + 1 or not found:
            bad.append(f"simplex {n}")
        simplices.append(str(list(cell.vertices)))
    acceptance(5, "central fiber roundtrip", verdict(not bad),
               f"{len(specs)} specs reproduce fans and strata; normal crossing points give standard simplices "
               f"{'; '.join(simplices)} {bad or ''}".rstrip())
    assert not bad


def test_criterion_6_coincidence(acceptance):
    cases = [
        ("im(1,2,3)/(2,1,1)", corpus.im_cycle(1, 2, 3), lambda d: corpus.im_polarization(d, (2, 1, 1))),
        ("im(3,1)/(1,4)", corpus.im_cycle(3, 1), lambda d: corpus.im_polarization(d, (1, 4))),
        ("im(2,2,2,2)/(1,3,1,3)", corpus.im_cycle(2, 2, 2, 2), lambda d: corpus.im_polarization(d, (1, 3, 1, 3))),
        ("k3 degree 1", corpus.k3_spec(), lambda d: corpus.k3_polarization(d, 1)),
        ("k3 degree 3", corpus.k3_spec(), lambda d: corpus.k3_polarization(d, 3)),
    ]
    bad = []
    witnesses = 0
    for name, d, pol in cases:
        p = pol(d)
        b = dual_intersection_complex(d)
        dual = discrete_legendre((b, polarization_to_mpl(b, p))).triple.b
        ic = intersection_complex(d, p)
        iso = find_isomorphism(ic, dual)
        if iso is None:
            bad.append(name)
            continue
        w = iso.as_dict(ic, dual)
        if set(w["cells"]) == set(ic.cell_ids):
            witnesses += 1
    acceptance(6, "coincidence identity", verdict(not bad and witnesses == len(cases)),
               f"{witnesses}/{len(cases)} fixtures integrally isomorphic with witness maps {bad or ''}".rstrip())
    assert not bad and witnesses == len(cases)


def test_criterion_7_geometry_oracles(acceptance, oracle_report):
    rows, elapsed = oracle_report
    kinds = ("face_lattice", "normal_fan", "newton")
    bad = {k: sum(1 for r in rows if r[k]) for k in kinds}
    dims = sorted({len(r["points"][0]) for r in rows})
    ok = len(rows) >= 100 and not any(bad.values()) and elapsed < 30
    acceptance(7, "geometry kernel oracles", verdict(ok),
               f"{len(rows)} random polytopes in dims {dims}, mismatches {bad}, {elapsed:.1f}s")
    assert ok


def test_criterion_8_property_suites(acceptance):
    start = time.perf_counter()
    problems = []
    triples = random_triples(50, seed=8)
    for k, t in enumerate(triples):
        if not legendre_involution_check(t)[0]:
            problems.append(f"involution {k}")
        r = discrete_legendre(t)
        n = t.b.dim
        for c, d in r.dual_class.items():
            if r.triple.b.classes[d].dim != n - t.b.classes[c].dim:
                problems.append(f"dimension {k}")
                break
    rng = random.Random(8)
    words = 0
    complexes = [corpus.k3_tetrahedron(), corpus.skew_torus3(), corpus.torus_complex(2, [[1, 2], [1]])]
    for b in complexes:
        for _ in range(40):
            v, g1 = random_loop(b, rng, rng.randint(1, 4))
            _, g2 = random_loop(b, rng, rng.randint(1, 4), start=v)
            if b.holonomy(g1 + g2) != b.holonomy(g1) @ b.holonomy(g2):
                problems.append("homomorphism")
            c, i = g1[0].cell, g1[0].enter
            j = rng.randrange(b.cells[c].n_vertices)
            if b.holonomy([Step(c, i, j), Step(c, j, i)] + g1) != b.holonomy(g1):
                problems.append("backtrack")
            back = [Step(s.cell, s.leave, s.enter) for s in reversed(g1)]
            if not b.path_map(g1 + back).is_identity():
                problems.append("reverse")
            words += 1
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 60
    tori = sum(1 for t in triples if len(t.b.cells[0].vertices) > 2)
    acceptance(8, "property suites", verdict(ok),
               f"involution and face duality on 50 random triples ({tori} tori, {50 - tori} cycles), "
               f"{words} random words for homomorphism and backtracking, {elapsed:.1f}s {problems[:3] or ''}".rstrip())
    assert ok
