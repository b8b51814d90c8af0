"""From degeneration data to affine complexes and back.

A degeneration spec lists, for every zero-dimensional stratum ``x`` of the
central fiber, the cone of its local toric model together with the monomial
``rho`` cutting out the central fiber, and for every irreducible component its
fan.  Rays of a zero-stratum cone are labelled by the components through ``x``;
rays of a component fan by the codimension one strata of that component, and its
maximal cones by the zero strata.

Faces of the slice ``sigma_x = {m in cone : <rho, m> = 1}`` are labelled by the
stratum they represent: the whole slice by ``x`` itself, other faces by the
``+``-joined sorted ids of the components containing them unless the spec says
otherwise.  Faces carrying the same label are glued.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .affine_complex import (
    AffineComplex,
    ComplexSpec,
    FanStructure,
    Identification,
    build_complex,
)
from .errors import (
    DimensionDefect,
    NotConvex,
    NotReducedAlongDivisor,
    NotToricDecomposition,
    SpecError,
    UnsupportedDimension,
)
from .exact import (
    det,
    dot,
    inverse,
    lattice_gcd,
    mat_mul,
    neg,
    nullspace,
    rank,
    saturated_basis,
    unimodular_completion,
    vec,
)
from .fans import Cone, Fan, dual_cone, hilbert_basis
from .mpl import MPLFunction
from .polytopes import LatticePolytope, convex_hull, normal_fan


@dataclass
class ZeroStratum:
    id: str
    rays: list  # primitive generators of the cone, in Z^(n+1)
    rho: tuple
    ray_components: list  # component id of each ray
    face_labels: dict = field(default_factory=dict)  # frozenset of ray indices -> label


@dataclass
class Component:
    id: str
    rays: list  # in Z^n
    ray_labels: list  # label of the codimension one stratum of each ray
    cones: list  # (ray indices, zero stratum id)


@dataclass
class DegenerationSpec:
    zero_strata: list
    components: list
    name: str = ""

    @property
    def dim(self) -> int:
        return len(self.zero_strata[0].rho) - 1

    def stratum(self, x: str) -> ZeroStratum:
        for z in self.zero_strata:
            if z.id == x:
                return z
        raise SpecError(f"unknown zero stratum {x!r}")

    def component(self, i: str) -> Component:
        for c in self.components:
            if c.id == i:
                return c
        raise SpecError(f"unknown component {i!r}")


# ----------------------------------------------------------------------
# zero strata -> cells
# ----------------------------------------------------------------------

def zero_stratum_polytope(z: ZeroStratum) -> LatticePolytope:
    """The slice of the cone at height one, in the ambient coordinates of the cone."""
    n1 = len(z.rho)
    if n1 > 4:
        raise UnsupportedDimension("zero-stratum cones are supported up to dimension 4")
    if len(z.ray_components) != len(z.rays):
        raise SpecError(f"stratum {z.id}: one component per ray is required")
    cone = Cone(z.rays, n1)
    if not cone.is_strongly_convex:
        raise SpecError(f"stratum {z.id}: cone is not strongly convex")
    given = [tuple(r) for r in z.rays]
    if set(cone.rays) != set(given) or len(given) != len(set(given)):
        raise SpecError(f"stratum {z.id}: rays must be the primitive extreme rays of the cone")
    for r in given:
        if dot(z.rho, r) != 1:
            raise NotReducedAlongDivisor(f"stratum {z.id}: <rho, {r}> = {dot(z.rho, r)} != 1")
    poly = convex_hull(given)
    if poly.dim_intrinsic != n1 - 1:
        raise DimensionDefect(f"stratum {z.id}: slice has dimension {poly.dim_intrinsic}, expected {n1 - 1}")
    return poly


def zero_stratum_cell(z: ZeroStratum) -> LatticePolytope:
    """The slice in intrinsic lattice coordinates; vertex i is ray i."""
    poly = zero_stratum_polytope(z)
    idx = [poly.vertices.index(vec(r)) for r in z.rays]
    return convex_hull([poly.intrinsic_vertices[i] for i in idx])


def face_label(z: ZeroStratum, face: frozenset) -> str:
    if face in z.face_labels:
        return z.face_labels[face]
    if len(face) == len(z.rays):
        return z.id
    return "+".join(sorted({z.ray_components[i] for i in face}))


def _labelled_faces(z: ZeroStratum, cell: LatticePolytope) -> dict[frozenset, str]:
    if len(set(z.ray_components)) != len(z.ray_components):
        raise SpecError(f"stratum {z.id}: a component meets itself (components must be normal)")
    out = {}
    seen = {}
    for f in cell.faces:
        if not f:
            continue
        lab = face_label(z, f)
        if lab in seen:
            raise SpecError(f"stratum {z.id}: label {lab!r} names two faces")
        seen[lab] = f
        out[f] = lab
    return out


def dual_intersection_complex(d: DegenerationSpec, allow_boundary: bool = False) -> AffineComplex:
    """Glue the slices sigma_x along common strata; fan structures from the component fans."""
    n = d.dim
    cells, labels, vertex_labels = [], [], []
    for z in d.zero_strata:
        if len(z.rho) != n + 1:
            raise SpecError("all zero strata must live in the same dimension")
        cell = zero_stratum_cell(z)
        cells.append(cell)
        labels.append(_labelled_faces(z, cell))
        vertex_labels.append(list(z.ray_components))
    first: dict[str, tuple[int, frozenset]] = {}
    idents = []
    for k, z in enumerate(d.zero_strata):
        for f, lab in sorted(labels[k].items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
            if lab not in first:
                first[lab] = (k, f)
                continue
            k0, f0 = first[lab]
            if k0 == k:
                raise SpecError(f"label {lab!r} appears twice in stratum {z.id}")
            comp0 = {d.zero_strata[k0].ray_components[i]: i for i in f0}
            fa = sorted(f0)
            try:
                fb = [next(i for i in f if z.ray_components[i] == d.zero_strata[k0].ray_components[a]) for a in fa]
            except StopIteration:
                raise SpecError(f"faces labelled {lab!r} contain different components") from None
            del comp0
            idents.append(Identification(k0, tuple(fa), k, tuple(fb)))
    spec = ComplexSpec(cells, idents, cell_ids=[z.id for z in d.zero_strata], vertex_labels=vertex_labels)
    fan_structures = []
    for comp in d.components:
        if len(comp.ray_labels) != len(comp.rays):
            raise SpecError(f"component {comp.id}: one label per ray is required")
        fan = Fan(comp.rays, [c for c, _ in comp.cones], dim=n)
        ray_by_label = {}
        for r, lab in enumerate(comp.ray_labels):
            if lab in ray_by_label:
                raise SpecError(f"component {comp.id}: label {lab!r} on two rays")
            ray_by_label[lab] = r
        cone_of = {x: frozenset(c) for c, x in comp.cones}
        edge_rays = {}
        for k, z in enumerate(d.zero_strata):
            for i, owner in enumerate(z.ray_components):
                if owner != comp.id:
                    continue
                if z.id not in cone_of:
                    raise SpecError(f"component {comp.id} has no cone for stratum {z.id}")
                for j in cells[k].edges_at(i):
                    lab = labels[k][frozenset((i, j))]
                    if lab not in ray_by_label:
                        raise SpecError(f"component {comp.id} has no ray for stratum {lab!r}")
                    edge_rays[(k, i, j)] = ray_by_label[lab]
                used = frozenset(edge_rays[(k, i, j)] for j in cells[k].edges_at(i))
                if used != cone_of[z.id]:
                    raise SpecError(f"component {comp.id}: cone of {z.id} does not match its rays")
        fan_structures.append(FanStructure(comp.id, fan, edge_rays))
    b = build_complex(spec, fan_structures, allow_boundary=allow_boundary)
    for fc in b.classes:
        c, f = fc.rep
        b.face_labels[fc.id] = labels[c][f]
    return b


# ----------------------------------------------------------------------
# polarizations and the intersection complex
# ----------------------------------------------------------------------

Polarization = Mapping[str, Mapping[str, Sequence]]  # component -> zero stratum -> vertex


def polarization_to_mpl(b: AffineComplex, pol: Polarization, strict: bool = True) -> MPLFunction:
    """Slope -w on the cone of x at component i, w the vertex of sigma_i labelled x."""
    slopes = {}
    for (c, i), _ in b.wedge.items():
        comp = b.corner_vertex[(c, i)]
        x = b.cell_ids[c]
        try:
            w = pol[comp][x]
        except KeyError:
            raise SpecError(f"polarization gives no vertex for {x} on {comp}") from None
        slopes[(c, i)] = neg(vec(w))
    phi = MPLFunction(b, slopes)
    if strict:
        report = phi.validate()
        if not report["strictly_convex"]:
            raise NotConvex("polarization is not ample: " + "; ".join(report["failures"]))
    for comp in b.vertex_ids:
        verts = [vec(v) for v in pol[comp].values()]
        if len(convex_hull(verts).vertices) != len(set(verts)) and strict:
            raise NotConvex(f"Newton polytope of {comp} has redundant vertices")
    return phi


def _stratum_label_of_cone(d: DegenerationSpec, cells, labels, comp: Component, x_set: Sequence[str]) -> str:
    """Label of the stratum of ``comp`` whose cone is the common face of the cones of ``x_set``."""
    cone_of = {x: set(c) for c, x in comp.cones}
    common = set.intersection(*(cone_of[x] for x in x_set))
    ray_labels = {comp.ray_labels[r] for r in common}
    x = x_set[0]
    k = next(t for t, z in enumerate(d.zero_strata) if z.id == x)
    z = d.zero_strata[k]
    i = z.ray_components.index(comp.id)
    face = {i}
    for j in cells[k].edges_at(i):
        if labels[k][frozenset((i, j))] in ray_labels:
            face.add(j)
    # smallest face containing these vertices
    best = min((f for f in cells[k].faces if face <= f), key=len)
    return labels[k][best]


def intersection_complex(d: DegenerationSpec, pol: Polarization) -> AffineComplex:
    """Glue the Newton polytopes of the polarization; fan at x is the normal fan of sigma_x."""
    n = d.dim
    zcells = [zero_stratum_cell(z) for z in d.zero_strata]
    zlabels = [_labelled_faces(z, c) for z, c in zip(d.zero_strata, zcells)]
    cells, cell_faces, vertex_labels = [], [], []
    for comp in d.components:
        xs = [x for _, x in comp.cones]
        if set(pol.get(comp.id, {})) != set(xs):
            raise SpecError(f"polarization of {comp.id} must give one vertex per zero stratum on it")
        pts = [vec(pol[comp.id][x]) for x in xs]
        poly = convex_hull(pts)
        if list(poly.vertices) != pts:
            raise NotConvex(f"Newton polytope of {comp.id} is degenerate")
        if poly.dim_intrinsic != n:
            raise NotConvex(f"Newton polytope of {comp.id} is not {n}-dimensional")
        faces = {}
        for f in poly.faces:
            if f:
                faces[f] = _stratum_label_of_cone(d, zcells, zlabels, comp, [xs[i] for i in sorted(f)])
        cells.append(poly)
        cell_faces.append(faces)
        vertex_labels.append(xs)
    first = {}
    idents = []
    for k, comp in enumerate(d.components):
        for f, lab in sorted(cell_faces[k].items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
            if lab not in first:
                first[lab] = (k, f)
                continue
            k0, f0 = first[lab]
            if k0 == k:
                raise SpecError(f"stratum {lab!r} appears twice on {comp.id}")
            fa = sorted(f0)
            fb = [vertex_labels[k].index(vertex_labels[k0][a]) for a in fa]
            idents.append(Identification(k0, tuple(fa), k, tuple(fb)))
    spec = ComplexSpec(cells, idents, cell_ids=[c.id for c in d.components], vertex_labels=vertex_labels)
    fan_structures = []
    for t, z in enumerate(d.zero_strata):
        sig = zcells[t]
        fan = normal_fan(sig)
        facet_by_label = {zlabels[t][fs]: r for r, fs in enumerate(sig.facet_vertex_sets)}
        edge_rays = {}
        for k, comp in enumerate(d.components):
            if z.id not in vertex_labels[k]:
                continue
            i = vertex_labels[k].index(z.id)
            for j in cells[k].edges_at(i):
                lab = cell_faces[k][frozenset((i, j))]
                if lab not in facet_by_label:
                    raise SpecError(f"edge {lab!r} of {comp.id} matches no facet of {z.id}")
                edge_rays[(k, i, j)] = facet_by_label[lab]
        fan_structures.append(FanStructure(z.id, fan, edge_rays))
    b = build_complex(spec, fan_structures)
    for fc in b.classes:
        c, f = fc.rep
        b.face_labels[fc.id] = cell_faces[c][f]
    return b


# ----------------------------------------------------------------------
# central fiber
# ----------------------------------------------------------------------

@dataclass
class CentralFiberDescription:
    components: dict  # vertex -> {"fan": Fan, "ray_labels": [...], "cone_labels": [...]}
    gluings: list  # dicts per edge
    strata: dict  # label -> {"dim": int, "contains": sorted labels of strata directly below}

    def component_fan_data(self, v: str):
        data = self.components[v]
        fan = data["fan"]
        rays = {lab: fan.rays[r] for r, lab in enumerate(data["ray_labels"])}
        cones = {lab: frozenset(data["ray_labels"][r] for r in c) for c, lab in zip(fan.maximal_cones, data["cone_labels"])}
        return rays, cones


def central_fiber(b: AffineComplex, twist: Mapping[str, str] | None = None) -> CentralFiberDescription:
    """Toric components, divisor gluings and the strata poset of X_0."""
    report = b.check_toric() if not b.allow_boundary else {}
    bad = [name for name, r in report.items() if not r["ok"]]
    if bad:
        raise NotToricDecomposition(f"toric condition fails along {bad}")
    n = b.dim
    components = {}
    for v in b.vertex_ids:
        fs = b.fan_structures[v]
        ray_labels = [None] * len(fs.fan.rays)
        for (c, i, j), r in fs.edge_rays.items():
            k = b.class_of[(c, frozenset((i, j)))]
            lab = b.class_name(k)
            if ray_labels[r] not in (None, lab):
                raise NotToricDecomposition(f"ray {r} at {v} carries two strata")
            ray_labels[r] = lab
        cone_labels = [None] * len(fs.fan.maximal_cones)
        for (c, i), cone in b.corner_cone.items():
            if b.corner_vertex[(c, i)] == v:
                cone_labels[cone] = b.class_name(b.class_of[(c, frozenset(range(b.cells[c].n_vertices)))])
        components[v] = {"fan": fs.fan, "ray_labels": ray_labels, "cone_labels": cone_labels}
    gluings = []
    for fc in b.classes_of_dim(1):
        c0, e0 = fc.rep
        p, q = sorted(e0)
        v, w = b.corner_vertex[(c0, p)], b.corner_vertex[(c0, q)]
        ray_v = b.fan_structures[v].edge_rays[(c0, p, q)]
        ray_w = b.fan_structures[w].edge_rays[(c0, q, p)]
        rv, rw = b.fan_structures[v].fan.rays[ray_v], b.fan_structures[w].fan.rays[ray_w]
        uv, uw = unimodular_completion(rv), unimodular_completion(rw)
        quotient = None
        for c, f, beta in fc.members:
            inv = {r: i for i, r in beta.items()}
            a, bb = inv[p], inv[q]
            lin = mat_mul(b.wedge[(c, bb)], inverse(b.wedge[(c, a)]))
            block = mat_mul(mat_mul(inverse(uw), lin), uv)
            qmat = tuple(tuple(block[r][s] for s in range(1, n)) for r in range(1, n))
            if quotient is None:
                quotient = qmat
            elif qmat != quotient:
                raise NotToricDecomposition(f"divisor fans along {b.class_name(fc.id)} are not identified consistently")
        name = b.class_name(fc.id)
        gluings.append({
            "edge": name,
            "components": [v, w],
            "rays": [ray_v, ray_w],
            "quotient_map": quotient,
            "twist": (twist or {}).get(name, "trivial"),
        })
    strata = strata_poset(b)
    return CentralFiberDescription(components, gluings, strata)


def strata_poset(b: AffineComplex) -> dict:
    """Strata of X_0 as labels with dimension and the strata directly contained in them."""
    n = b.dim
    out = {b.class_name(fc.id): {"dim": n - fc.dim, "contains": set()} for fc in b.classes}
    for c, cell in enumerate(b.cells):
        for f in cell.faces:
            for g in cell.faces:
                if f and f < g and cell.face_dim(g) == cell.face_dim(f) + 1:
                    big, small = b.class_name(b.class_of[(c, f)]), b.class_name(b.class_of[(c, g)])
                    out[big]["contains"].add(small)
    return {k: {"dim": v["dim"], "contains": sorted(v["contains"])} for k, v in sorted(out.items())}


def spec_strata_poset(d: DegenerationSpec) -> dict:
    """The strata poset read directly off the labelled faces of the slices."""
    n = d.dim
    out: dict[str, dict] = {}
    for z in d.zero_strata:
        cell = zero_stratum_cell(z)
        labels = _labelled_faces(z, cell)
        for f, lab in labels.items():
            entry = out.setdefault(lab, {"dim": n - cell.face_dim(f), "contains": set()})
            for g, lab2 in labels.items():
                if f < g and cell.face_dim(g) == cell.face_dim(f) + 1:
                    entry["contains"].add(lab2)
    return {k: {"dim": v["dim"], "contains": sorted(v["contains"])} for k, v in sorted(out.items())}


def spec_component_fan_data(d: DegenerationSpec, comp_id: str):
    comp = d.component(comp_id)
    rays = {lab: tuple(r) for r, lab in zip(comp.rays, comp.ray_labels)}
    cones = {x: frozenset(comp.ray_labels[r] for r in c) for c, x in comp.cones}
    return rays, cones


def roundtrip_matches(d: DegenerationSpec, cf: CentralFiberDescription) -> dict:
    fans_ok = set(cf.components) == {c.id for c in d.components} and all(
        cf.component_fan_data(c.id) == spec_component_fan_data(d, c.id) for c in d.components
    )
    strata_ok = cf.strata == spec_strata_poset(d)
    return {"fans": fans_ok, "strata": strata_ok}


# ----------------------------------------------------------------------
# local models
# ----------------------------------------------------------------------

@dataclass
class LocalModel:
    cell: LatticePolytope
    cone: Cone  # cone over the cell at height one
    monomial: tuple  # rho = (0, ..., 0, 1)
    generators: list  # Hilbert basis of the dual cone
    relations: list  # (lhs exponents, rhs exponents)
    certified: bool
    degree_bound: int

    def relation_strings(self, names: Sequence[str] | None = None) -> list[str]:
        names = list(names or _default_names(len(self.generators)))
        return [f"{_monomial(lhs, names)} = {_monomial(rhs, names)}" for lhs, rhs in self.relations]

    def monomial_in_generators(self) -> tuple | None:
        """Exponents expressing z^rho through the generators (lexicographically smallest)."""
        return _express(self.generators, self.monomial, self.grading)

    @property
    def grading(self) -> tuple:
        k = len(self.monomial)
        return tuple(sum(r[t] for r in self.cone.rays) for t in range(k))


def _default_names(k: int) -> list[str]:
    base = ["u", "v", "w", "s", "t", "p", "q", "r"]
    return base[:k] if k <= len(base) else [f"g{i}" for i in range(k)]


def _monomial(exps, names) -> str:
    terms = []
    for e, nme in zip(exps, names):
        if e == 1:
            terms.append(nme)
        elif e > 1:
            terms.append(f"{e}{nme}")
    return " + ".join(terms) if terms else "0"


def _express(gens, target, grading):
    deg_t = dot(grading, target)
    degs = [dot(grading, g) for g in gens]
    best = None
    for exps in _exponents_of_degree(degs, deg_t):
        s = tuple(sum(e * g[t] for e, g in zip(exps, gens)) for t in range(len(target)))
        if s == tuple(target):
            if best is None or exps < best:
                best = exps
    return best


def _exponents_of_degree(degs, total):
    """Exponent vectors e >= 0 with sum e_i * degs[i] == total."""
    k = len(degs)
    out = []

    def rec(i, remaining, acc):
        if i == k:
            if remaining == 0:
                out.append(tuple(acc))
            return
        for e in range(remaining // degs[i] + 1):
            acc.append(e)
            rec(i + 1, remaining - e * degs[i], acc)
            acc.pop()

    rec(0, total, [])
    return out


def local_model(sigma: LatticePolytope | Sequence, degree_bound: int | None = None) -> LocalModel:
    """Cone over sigma, Hilbert basis of its dual and a minimal binomial presentation."""
    if not isinstance(sigma, LatticePolytope):
        sigma = convex_hull(sigma)
    k = sigma.dim_intrinsic
    if k > 2:
        raise UnsupportedDimension("local models are computed for cells of dimension <= 2")
    verts = [tuple(v) + (1,) for v in sigma.intrinsic_vertices]
    cone = Cone(verts, k + 1)
    dual = dual_cone(cone)
    rho = (0,) * k + (1,)
    gens = sorted(hilbert_basis(dual), key=lambda g: (g == rho, g))
    grading = tuple(sum(v[t] for v in verts) for t in range(k + 1))
    degs = [dot(grading, g) for g in gens]
    if any(d <= 0 for d in degs):
        raise SpecError("grading is not positive on the Hilbert basis")
    if degree_bound is None:
        degree_bound = 3 * max(degs)
    relations = _markov_basis(gens, degs, degree_bound)
    certified = _lattice_span_ok(gens, relations)
    return LocalModel(sigma, cone, rho, gens, relations, certified, degree_bound)


def _markov_basis(gens, degs, bound):
    """Minimal binomial relations, degree by degree, by connecting monomial fibers."""
    relations: list[tuple[tuple, tuple]] = []
    dim = len(gens[0])
    for total in range(1, bound + 1):
        fibers: dict[tuple, list] = {}
        for exps in _exponents_of_degree(degs, total):
            img = tuple(sum(e * g[t] for e, g in zip(exps, gens)) for t in range(dim))
            fibers.setdefault(img, []).append(exps)
        for img, mons in sorted(fibers.items()):
            if len(mons) < 2:
                continue
            comps = _fiber_components(mons, relations)
            if len(comps) > 1:
                reps = [min(c) for c in comps]
                reps.sort()
                for other in reps[1:]:
                    lhs, rhs = max(reps[0], other), min(reps[0], other)
                    common = tuple(min(a, b) for a, b in zip(lhs, rhs))
                    if any(common):
                        continue  # not minimal; cannot happen after lower degrees
                    relations.append((lhs, rhs))
    return relations


def _fiber_components(mons, relations):
    idx = {m: i for i, m in enumerate(mons)}
    parent = list(range(len(mons)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in mons:
        for lhs, rhs in relations:
            for a, b in ((lhs, rhs), (rhs, lhs)):
                if all(x >= y for x, y in zip(m, a)):
                    moved = tuple(x - y + z for x, y, z in zip(m, a, b))
                    if moved in idx:
                        ra, rb = find(idx[m]), find(idx[moved])
                        if ra != rb:
                            parent[ra] = rb
    groups: dict[int, list] = {}
    for m in mons:
        groups.setdefault(find(idx[m]), []).append(m)
    return sorted(groups.values())


def _minors_gcd(rows, r, m) -> int:
    g = 0
    for cols in combinations(range(m), r):
        g = lattice_gcd([g, int(det([[row[c] for c in cols] for row in rows]))])
    return g


def _lattice_span_ok(gens, relations) -> bool:
    """The relation vectors span the full lattice of integer relations among the generators."""
    m = len(gens)
    kernel = nullspace([[g[t] for g in gens] for t in range(len(gens[0]))], m)
    vecs = [tuple(a - b for a, b in zip(lhs, rhs)) for lhs, rhs in relations]
    if not kernel:
        return not vecs
    r = len(kernel)
    if len(vecs) < r or rank(vecs) != r:
        return False
    _, u, _ = saturated_basis(kernel, m)
    sat = [tuple(u[i][j] for i in range(m)) for j in range(r)]
    target = _minors_gcd(sat, r, m)
    g = 0
    for rows in combinations(vecs, r):
        g = lattice_gcd([g, _minors_gcd(rows, r, m)])
        if g == target:
            return True
    return g == target
