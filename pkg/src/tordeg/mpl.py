"""Multi-valued piecewise linear functions and the discrete Legendre transform.

An MPL function stores one integral slope per corner ``(cell, vertex)``: the
linear part of the local representative at that vertex on the maximal cone of
the cell.  Representatives are only defined up to adding a linear function, so
the invariant data are the *kinks*: across the wall dual to a codimension one
face the slopes jump by ``kink * n`` with ``n`` the primitive normal pointing
into the second cone.  Compatibility asks that every corner of the same face
sees the same kink, strict convexity that all kinks are positive.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .affine_complex import (
    AffineComplex,
    ComplexIsomorphism,
    ComplexSpec,
    FanStructure,
    Identification,
    Step,
    build_complex,
    find_isomorphism,
)
from .errors import NotConvex, SpecError
from .exact import add, dot, frac, mat_vec, neg, normalize, nullspace, primitive_vector, scale, sub, vec
from .fans import PLFunction
from .polytopes import barycenter, convex_hull, normal_fan


@dataclass
class MPLFunction:
    complex: AffineComplex
    slopes: dict  # (cell, corner) -> slope in the fan coordinates of the corner's vertex

    def __post_init__(self):
        b = self.complex
        self.slopes = {k: vec(v) for k, v in self.slopes.items()}
        for key in b.wedge:
            if key not in self.slopes:
                raise SpecError(f"no slope for corner {b.cell_ids[key[0]]}:{key[1]}")
            if len(self.slopes[key]) != b.dim:
                raise SpecError("slope of the wrong dimension")

    def local_representative(self, v: str) -> PLFunction:
        """The representative at v as a PL function on the fan Σ_v."""
        b = self.complex
        fan = b.fan_structures[v].fan
        by_cone = {b.corner_cone[k]: self.slopes[k] for k in b.corners_at(v)}
        return PLFunction(fan, [by_cone[i] for i in range(len(fan.maximal_cones))])

    def wall_kinks(self) -> dict[tuple[int, int], object]:
        """Kink on every wall, keyed by local face (codimension one class, representative vertex)."""
        b = self.complex
        out = {}
        for fc in b.classes_of_dim(b.dim - 1):
            (c1, f1, beta1), (c2, f2, beta2) = fc.members
            inv1 = {r: i for i, r in beta1.items()}
            inv2 = {r: i for i, r in beta2.items()}
            rep_vertices = sorted(fc.rep[1])
            for r in rep_vertices:
                k1, k2 = (c1, inv1[r]), (c2, inv2[r])
                out[(fc.id, r)] = _kink(b, k1, k2, f1, self.slopes[k1], self.slopes[k2])
        return out

    def kinks(self) -> dict[int, object]:
        """Kink per codimension one face class; raises if corners disagree."""
        out = {}
        for (k, _), val in self.wall_kinks().items():
            if out.setdefault(k, val) != val:
                raise NotConvex(f"kinks disagree along {self.complex.class_name(k)}")
        return out

    def validate(self) -> dict:
        b = self.complex
        failures = []
        per_class: dict[int, set] = {}
        convex = True
        for (k, r), val in self.wall_kinks().items():
            per_class.setdefault(k, set()).add(val)
            if val <= 0:
                convex = False
                failures.append(f"kink {val} at {b.class_name(k)} seen from {b.corner_vertex[(b.classes[k].rep[0], r)]}")
        compatible = True
        for k, vals in per_class.items():
            if len(vals) > 1:
                compatible = False
                failures.append(f"incompatible kinks {sorted(vals)} along {b.class_name(k)}")
        integral = all(frac(x).denominator == 1 for s in self.slopes.values() for x in s)
        if not integral:
            failures.append("non-integral slopes")
        return {
            "compatible": compatible,
            "strictly_convex": compatible and convex,
            "integral": integral,
            "failures": failures,
        }

    def is_strictly_convex(self) -> bool:
        r = self.validate()
        return r["compatible"] and r["strictly_convex"]


def _wall_normal(b: AffineComplex, k1, k2, face1) -> tuple:
    """Primitive normal of the wall between the cones of corners k1, k2, pointing into k2's cone."""
    c1, i1 = k1
    lin1 = b.wedge[k1]
    cell1 = b.cells[c1]
    wall = [mat_vec(lin1, sub(cell1.vertices[x], cell1.vertices[i1])) for x in face1 if x != i1]
    nrm = primitive_vector(nullspace(wall, b.dim)[0]) if wall else (1,)
    c2, i2 = k2
    cell2 = b.cells[c2]
    inside = mat_vec(b.wedge[k2], sub(barycenter(cell2), cell2.vertices[i2]))
    return nrm if dot(nrm, inside) > 0 else neg(nrm)


def _kink(b: AffineComplex, k1, k2, face1, m1, m2):
    """(m2 - m1) = kink * n with n the wall normal pointing into cone 2."""
    nrm = _wall_normal(b, k1, k2, face1)
    diff = sub(m2, m1)
    idx = next(i for i, x in enumerate(nrm) if x != 0)
    kval = normalize(frac(diff[idx]) / nrm[idx])
    if vec(kval * x for x in nrm) != diff:
        raise NotConvex("slopes jump by a non-normal vector across a wall")
    return kval


def mpl_from_vertex_slopes(b: AffineComplex, per_vertex: Mapping[str, list]) -> MPLFunction:
    """Build from slopes listed by maximal cone index of each vertex fan."""
    slopes = {}
    for v, lst in per_vertex.items():
        for key in b.corners_at(v):
            slopes[key] = lst[b.corner_cone[key]]
    return MPLFunction(b, slopes)


def mpl_from_kinks(b: AffineComplex, kinks: Mapping) -> MPLFunction:
    """Representative with given kink per codimension one class (by class id or name).

    At each vertex a base cone gets slope 0 and slopes propagate across walls.
    """
    by_id = {}
    for k, val in kinks.items():
        if isinstance(k, str):
            match = [fc.id for fc in b.classes if b.class_name(fc.id) == k]
            if not match:
                raise SpecError(f"unknown face {k!r}")
            k = match[0]
        by_id[k] = val
    for fc in b.classes_of_dim(b.dim - 1):
        if fc.id not in by_id:
            raise SpecError(f"no kink for {b.class_name(fc.id)}")
    # neighbours of each corner across walls
    adjacency: dict[tuple, list] = {k: [] for k in b.wedge}
    for fc in b.classes_of_dim(b.dim - 1):
        (c1, f1, beta1), (c2, f2, beta2) = fc.members
        inv1 = {r: i for i, r in beta1.items()}
        inv2 = {r: i for i, r in beta2.items()}
        for r in fc.rep[1]:
            k1, k2 = (c1, inv1[r]), (c2, inv2[r])
            adjacency[k1].append((k2, f1, fc.id))
            adjacency[k2].append((k1, f2, fc.id))
    slopes: dict[tuple, tuple] = {}
    for v in b.vertex_ids:
        corners = b.corners_at(v)
        start = corners[0]
        slopes[start] = (0,) * b.dim
        queue = deque([start])
        while queue:
            k1 = queue.popleft()
            for k2, face1, cid in adjacency[k1]:
                nrm = _wall_normal(b, k1, k2, face1)
                cand = add(slopes[k1], scale(by_id[cid], nrm))
                if k2 in slopes:
                    if slopes[k2] != cand:
                        raise SpecError(f"kinks around {v} do not close up")
                    continue
                slopes[k2] = cand
                queue.append(k2)
    return MPLFunction(b, slopes)


@dataclass
class DegenerationTriple:
    b: AffineComplex
    phi: MPLFunction


def mpl_validate(phi: MPLFunction) -> dict:
    return phi.validate()


# ----------------------------------------------------------------------
# discrete Legendre transform
# ----------------------------------------------------------------------

@dataclass
class LegendreResult:
    """The transformed triple plus the combinatorial correspondence with the input."""

    triple: DegenerationTriple
    cell_of_vertex: dict  # vertex label of B -> cell index of B̌
    vertex_of_cell: dict  # cell index of B -> vertex label of B̌
    corner_map: dict  # (cell, corner) of B -> (cell, corner) of B̌
    dual_class: dict = field(default_factory=dict)  # face class of B -> face class of B̌

    def dual_loop(self, src: AffineComplex, loop) -> list[Step]:
        """Steps of the loop through the dual cells matching a loop of B."""
        _, steps = src.parse_path(loop) if isinstance(loop, str) else (None, list(loop))
        out = []
        k = len(steps)
        for t in range(k):
            cur, nxt = steps[t], steps[(t + 1) % k]
            dc, j = self.corner_map[(cur.cell, cur.leave)]
            dc2, j2 = self.corner_map[(nxt.cell, nxt.enter)]
            if dc != dc2:
                raise SpecError("consecutive steps do not meet at a vertex")
            out.append(Step(dc, j, j2))
        return out


def discrete_legendre(t: DegenerationTriple | tuple) -> LegendreResult:
    b, phi = (t.b, t.phi) if isinstance(t, DegenerationTriple) else t
    report = phi.validate()
    if not report["strictly_convex"]:
        raise NotConvex("discrete Legendre transform needs a strictly convex MPL function: " + "; ".join(report["failures"]))
    # dual cells: Newton polytopes, vertices ordered like corners_at(v)
    dual_cells = []
    corner_map = {}
    cell_of_vertex = {}
    for v in b.vertex_ids:
        corners = b.corners_at(v)
        pts = [neg(phi.slopes[k]) for k in corners]
        poly = convex_hull(pts)
        if len(poly.vertices) != len(pts) or list(poly.vertices) != [vec(p) for p in pts]:
            raise NotConvex(f"Newton polytope at {v} lost vertices")
        cell_of_vertex[v] = len(dual_cells)
        for j, k in enumerate(corners):
            corner_map[k] = (len(dual_cells), j)
        dual_cells.append(poly)
    # identifications: Newton faces of each face class seen from its corners
    idents = []
    for fc in b.classes:
        if fc.dim == 0:
            continue
        rep_vertices = sorted(fc.rep[1])
        faces = []
        for r in rep_vertices:
            corner_list = []
            for c, f, beta in fc.members:
                inv = {x: i for i, x in beta.items()}
                corner_list.append(corner_map[(c, inv[r])])
            cells = {dc for dc, _ in corner_list}
            assert len(cells) == 1
            faces.append((corner_list[0][0], tuple(j for _, j in corner_list)))
        base_cell, base_face = faces[0]
        for other_cell, other_face in faces[1:]:
            idents.append(Identification(base_cell, base_face, other_cell, other_face))
    vertex_labels = []
    for v in b.vertex_ids:
        vertex_labels.append([b.cell_ids[c] for c, _ in b.corners_at(v)])
    spec = ComplexSpec(dual_cells, idents, cell_ids=list(b.vertex_ids), vertex_labels=vertex_labels)
    # fan structures at the dual vertices: normal fans of the cells of B
    fan_structures = []
    vertex_of_cell = {}
    for c, cell in enumerate(b.cells):
        fan, corr = normal_fan(cell, with_correspondence=True)
        facet_index = {fset: k for k, fset in enumerate(cell.facet_vertex_sets)}
        edge_rays = {}
        for i in range(cell.n_vertices):
            v = b.corner_vertex[(c, i)]
            dc, j = corner_map[(c, i)]
            newton = dual_cells[dc]
            neighbour_by_facet = {}
            for fset, fidx in facet_index.items():
                if i not in fset:
                    continue
                k = b.class_of[(c, fset)]
                fc = b.classes[k]
                beta = fc.member_map(c, fset)
                others = [m for m in fc.members if (m[0], m[1]) != (c, fset)]
                (c2, f2, beta2), = others
                inv2 = {x: y for y, x in beta2.items()}
                i2 = inv2[beta[i]]
                neighbour_by_facet[corner_map[(c2, i2)][1]] = fidx
            for j2 in newton.edges_at(j):
                if j2 not in neighbour_by_facet:
                    raise NotConvex(f"Newton polytope at {v} has an edge without a wall")
                edge_rays[(dc, j, j2)] = neighbour_by_facet[j2]
        label = b.cell_ids[c]
        vertex_of_cell[c] = label
        fan_structures.append(FanStructure(label, fan, edge_rays))
    dual = build_complex(spec, fan_structures)
    # dual MPL: support functions of the cells of B
    slopes = {}
    for c, cell in enumerate(b.cells):
        for i in range(cell.n_vertices):
            slopes[corner_map[(c, i)]] = neg(cell.vertices[i])
    dual_phi = MPLFunction(dual, slopes)
    result = LegendreResult(DegenerationTriple(dual, dual_phi), cell_of_vertex, vertex_of_cell, corner_map)
    result.dual_class = _dual_classes(b, dual, result)
    return result


def _dual_classes(b: AffineComplex, dual: AffineComplex, res: LegendreResult) -> dict[int, int]:
    out = {}
    for fc in b.classes:
        if fc.dim == 0:
            dc = res.cell_of_vertex[b._class_label[fc.id]]
            out[fc.id] = dual.class_of[(dc, frozenset(range(dual.cells[dc].n_vertices)))]
            continue
        r = min(fc.rep[1])
        corners = []
        for c, f, beta in fc.members:
            inv = {x: i for i, x in beta.items()}
            corners.append(res.corner_map[(c, inv[r])])
        dc = corners[0][0]
        out[fc.id] = dual.class_of[(dc, frozenset(j for _, j in corners))]
    return out


def legendre_involution_check(t: DegenerationTriple) -> tuple[bool, ComplexIsomorphism | None]:
    """Transform twice and search an isomorphism back to the input matching the kinks."""
    once = discrete_legendre(t)
    twice = discrete_legendre(once.triple)
    back = twice.triple
    iso = find_isomorphism(t.b, back.b, t.phi.kinks(), back.phi.kinks())
    return iso is not None, iso


def triples_isomorphic(s: DegenerationTriple, t: DegenerationTriple) -> ComplexIsomorphism | None:
    return find_isomorphism(s.b, t.b, s.phi.kinks(), t.phi.kinks())
