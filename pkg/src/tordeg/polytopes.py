"""Exact convex polytopes with rational vertices in ambient dimension <= 4.

A polytope keeps an intrinsic lattice chart: an origin (its first vertex, or 0
when full dimensional) and a unimodular ``W`` whose first ``k`` rows give
coordinates on the saturated lattice of the affine hull.  Facets, normal fans
and support functions all live in these intrinsic coordinates; for a full
dimensional polytope they coincide with the ambient ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DegenerateInput, InvalidVertex, UnsupportedDimension
from .exact import (
    clear_denominators,
    dot,
    frac,
    identity,
    is_integral,
    mat_vec,
    nullspace,
    primitive_vector,
    rank,
    saturated_basis,
    sub,
    vec,
    zero,
)

MAX_AMBIENT_DIM = 4


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull (-1 for no points)."""
    if not points:
        return -1
    p0 = points[0]
    diffs = [sub(p, p0) for p in points[1:]]
    return rank(diffs) if diffs else 0


def _hyperplane_through(points: Sequence[Sequence], k: int):
    """Primitive integral normal of the hyperplane through points (affine rank k-1)."""
    p0 = points[0]
    diffs = [sub(p, p0) for p in points[1:]]
    basis = nullspace(diffs, k) if diffs else [tuple(int(i == j) for i in range(k)) for j in range(k)]
    if len(basis) != 1:
        raise DegenerateInput("points do not span a hyperplane")
    a = clear_denominators(basis[0])
    return a, dot(a, p0)


def _hull_1d(pts):
    lo = min(range(len(pts)), key=lambda i: (pts[i][0], i))
    hi = max(range(len(pts)), key=lambda i: (pts[i][0], -i))
    facets = [((1,), pts[lo][0]), ((-1,), -pts[hi][0])]
    return sorted({lo, hi}), facets


def _hull_incremental(pts: list[tuple], k: int):
    """Beneath-beyond hull of full-dimensional points in Q^k, k >= 2.

    Returns (vertex indices, facets as (normal, offset) with <normal, x> >= offset).
    """
    # initial simplex
    simplex = [0]
    for i in range(1, len(pts)):
        if affine_rank([pts[j] for j in simplex + [i]]) == len(simplex):
            simplex.append(i)
            if len(simplex) == k + 1:
                break
    current = set(simplex)
    facets: dict[tuple, object] = {}
    for omit in simplex:
        others = [pts[j] for j in simplex if j != omit]
        a, b = _hyperplane_through(others, k)
        if dot(a, pts[omit]) < b:
            a, b = tuple(-x for x in a), -b
        facets[a] = b

    def incidence(a, b):
        return frozenset(i for i in current if dot(a, pts[i]) == b)

    for p in range(len(pts)):
        if p in current:
            continue
        x = pts[p]
        visible = [a for a, b in facets.items() if dot(a, x) < b]
        if not visible:
            continue
        hidden = [a for a in facets if a not in visible]
        inc = {a: incidence(a, facets[a]) for a in facets}
        new = {a: facets[a] for a in hidden}
        for f in visible:
            for g in hidden:
                ridge = inc[f] & inc[g]
                if len(ridge) < k - 1 or affine_rank([pts[i] for i in ridge]) != k - 2:
                    continue
                a, b = _hyperplane_through([pts[i] for i in ridge] + [x], k)
                ref = next(i for i in current if dot(a, pts[i]) != b)
                if dot(a, pts[ref]) < b:
                    a, b = tuple(-t for t in a), -b
                new[a] = b
        facets = new
        current.add(p)
        # drop points that stopped being vertices
        keep = set()
        for i in current:
            normals = [a for a, b in facets.items() if dot(a, pts[i]) == b]
            if normals and rank(normals) == k:
                keep.add(i)
        current = keep
    return sorted(current), sorted(facets.items())


@dataclass(frozen=True, eq=False)
class LatticePolytope:
    """Convex polytope with exact rational vertices.

    ``vertices`` are the extreme points, in the order they first appeared in the
    input.  ``facets`` are pairs ``(normal, offset)`` in intrinsic coordinates with
    ``<normal, y> >= offset`` on the polytope.
    """

    vertices: tuple
    dim_ambient: int
    dim_intrinsic: int
    facets: tuple
    origin: tuple
    chart: tuple  # W, unimodular, rows 0..k-1 give intrinsic coordinates

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def intrinsic_vertices(self) -> tuple:
        return tuple(self.to_intrinsic(v) for v in self.vertices)

    def to_intrinsic(self, x: Sequence) -> tuple:
        rows = self.chart[: self.dim_intrinsic]
        return mat_vec(rows, sub(x, self.origin)) if rows else ()

    def from_intrinsic(self, y: Sequence) -> tuple:
        from .exact import inverse

        u = inverse(self.chart)
        k = self.dim_intrinsic
        return vec(self.origin[r] + sum(frac(u[r][j]) * y[j] for j in range(k)) for r in range(self.dim_ambient))

    @cached_property
    def equations(self) -> tuple:
        """Rows e with <e, x> = <e, origin> on the affine hull (ambient coordinates)."""
        return tuple((row, dot(row, self.origin)) for row in self.chart[self.dim_intrinsic:])

    @cached_property
    def halfspaces(self) -> tuple:
        """Facet inequalities lifted to ambient coordinates: <n, x> >= c."""
        k = self.dim_intrinsic
        out = []
        for a, b in self.facets:
            amb = tuple(sum(a[i] * self.chart[i][j] for i in range(k)) for j in range(self.dim_ambient))
            out.append((primitive_vector(amb), _norm(frac(b) + dot(amb, self.origin))))
        return tuple(out)

    @cached_property
    def facet_vertex_sets(self) -> tuple[frozenset, ...]:
        iv = self.intrinsic_vertices
        return tuple(frozenset(i for i, v in enumerate(iv) if dot(a, v) == b) for a, b in self.facets)

    def contains(self, x: Sequence) -> bool:
        if any(dot(e, x) != c for e, c in self.equations):
            return False
        y = self.to_intrinsic(x)
        return all(dot(a, y) >= b for a, b in self.facets)

    def is_lattice(self) -> bool:
        return is_integral(self.vertices)

    def vertex_index(self, v) -> int:
        if isinstance(v, int):
            if not 0 <= v < len(self.vertices):
                raise InvalidVertex(f"no vertex with index {v}")
            return v
        v = vec(v)
        try:
            return self.vertices.index(v)
        except ValueError:
            raise InvalidVertex(f"{v} is not a vertex") from None

    def face_dim(self, face: Iterable[int]) -> int:
        return affine_rank([self.vertices[i] for i in face])

    @cached_property
    def faces(self) -> tuple[frozenset, ...]:
        """All faces as vertex-index sets (empty face and the polytope included)."""
        return face_lattice(self).faces

    def edges_at(self, i: int) -> list[int]:
        return sorted(j for f in self.faces if len(f) == 2 and i in f and self.face_dim(f) == 1 for j in f if j != i)

    def __eq__(self, other):
        if not isinstance(other, LatticePolytope):
            return NotImplemented
        return set(self.vertices) == set(other.vertices)

    def __hash__(self):
        return hash(frozenset(self.vertices))

    def __repr__(self):
        return f"LatticePolytope({[list(v) for v in self.vertices]})"


def convex_hull(points: Iterable[Sequence]) -> LatticePolytope:
    """Exact convex hull of finitely many rational points (ambient dim <= 4)."""
    pts_in = [vec(p) for p in points]
    if not pts_in:
        raise DegenerateInput("convex hull of no points")
    n = len(pts_in[0])
    if any(len(p) != n for p in pts_in):
        raise DegenerateInput("points of different dimensions")
    if n > MAX_AMBIENT_DIM:
        raise UnsupportedDimension(f"ambient dimension {n} > {MAX_AMBIENT_DIM}")
    # dedupe, keep order
    seen: dict[tuple, None] = {}
    for p in pts_in:
        seen.setdefault(p, None)
    pts = list(seen)
    p0 = pts[0]
    diffs = [clear_denominators(sub(p, p0)) for p in pts[1:]]
    diffs = [d for d in diffs if any(d)]
    if diffs:
        w, _, k = saturated_basis(diffs, n)
    else:
        w, k = identity(n), 0
    if k == n:
        w, origin = identity(n), zero(n)
    else:
        origin = p0
    rows = w[:k]
    ipts = [mat_vec(rows, sub(p, origin)) if k else () for p in pts]
    if k == 0:
        verts, facets = [0], []
    elif k == 1:
        verts, facets = _hull_1d(ipts)
    else:
        verts, facets = _hull_incremental(ipts, k)
    vertices = tuple(pts[i] for i in sorted(verts))
    if k < n and origin != vertices[0]:
        # re-anchor the chart at the first vertex
        shift = mat_vec(rows, sub(vertices[0], origin))
        facets = [(a, frac(b) - dot(a, shift)) for a, b in facets]
        origin = vertices[0]
    return LatticePolytope(
        vertices=vertices,
        dim_ambient=n,
        dim_intrinsic=k,
        facets=tuple((tuple(a), _norm(b)) for a, b in facets),
        origin=tuple(origin),
        chart=tuple(tuple(r) for r in w),
    )


def _norm(x):
    x = frac(x)
    return x.numerator if x.denominator == 1 else x


@dataclass(frozen=True)
class FaceLattice:
    faces: tuple  # frozensets of vertex indices, sorted by (dim, indices)
    dims: dict
    incidence: tuple  # covering pairs (smaller, larger) as indices into faces

    def by_dim(self, d: int) -> list[frozenset]:
        return [f for f in self.faces if self.dims[f] == d]

    def f_vector(self) -> list[int]:
        top = max(self.dims.values())
        return [len(self.by_dim(d)) for d in range(top + 1)]


def face_lattice(p: LatticePolytope) -> FaceLattice:
    """Faces as closure of facet vertex sets under intersection."""
    allv = frozenset(range(p.n_vertices))
    facets = set(p.facet_vertex_sets)
    faces = {allv, frozenset()} | facets
    frontier = set(facets)
    while frontier:
        new = set()
        for a in frontier:
            for b in facets:
                c = a & b
                if c not in faces:
                    new.add(c)
        faces |= new
        frontier = new
    dims = {f: p.face_dim(f) for f in faces}
    order = sorted(faces, key=lambda f: (dims[f], sorted(f)))
    pos = {f: i for i, f in enumerate(order)}
    cover = []
    for f in order:
        for g in order:
            if f < g and dims[g] == dims[f] + 1:
                cover.append((pos[f], pos[g]))
    return FaceLattice(tuple(order), dims, tuple(cover))


def barycenter(p: LatticePolytope | Sequence[Sequence]) -> tuple:
    verts = p.vertices if isinstance(p, LatticePolytope) else [vec(v) for v in p]
    n = len(verts[0])
    m = len(verts)
    return vec(sum((frac(v[i]) for v in verts), Fraction(0)) / m for i in range(n))


@dataclass(frozen=True)
class Simplex:
    vertices: tuple
    chain: tuple = ()  # the faces (vertex-index sets) whose barycenters span it


def maximal_chains(p: LatticePolytope) -> list[tuple[frozenset, ...]]:
    """Maximal chains vertex ⊂ edge ⊂ ... ⊂ p (empty face excluded)."""
    fl = face_lattice(p)
    top = max(fl.dims.values())
    ups: dict[frozenset, list[frozenset]] = {f: [] for f in fl.faces}
    for a, b in fl.incidence:
        ups[fl.faces[a]].append(fl.faces[b])
    chains = []

    def extend(chain):
        last = chain[-1]
        if fl.dims[last] == top:
            chains.append(tuple(chain))
            return
        for nxt in ups[last]:
            extend(chain + [nxt])

    for v in fl.by_dim(0):
        extend([v])
    return chains


def barycentric_subdivision(p: LatticePolytope) -> list[Simplex]:
    out = []
    for chain in maximal_chains(p):
        out.append(Simplex(tuple(barycenter([p.vertices[i] for i in f]) for f in chain), chain))
    return out


def tangent_wedge(p: LatticePolytope, v):
    """Cone spanned by w - v over the vertices w, generators primitive."""
    from .fans import Cone

    i = p.vertex_index(v)
    base = p.vertices[i]
    gens = [clear_denominators(sub(w, base)) for j, w in enumerate(p.vertices) if j != i]
    return Cone(gens, p.dim_ambient)


def edge_directions(p: LatticePolytope, i: int) -> dict[int, tuple]:
    """Primitive direction of each edge at vertex i in intrinsic coordinates, keyed by the other endpoint."""
    iv = p.intrinsic_vertices
    return {j: clear_denominators(sub(iv[j], iv[i])) for j in p.edges_at(i)}


def normal_fan(p: LatticePolytope, with_correspondence: bool = False):
    """Inner normal fan in intrinsic dual coordinates.

    The cone of a face τ is spanned by the inner normals of the facets containing
    τ; with ``with_correspondence`` the map face -> cone (ray-index set) is
    returned as well.
    """
    from .fans import Fan

    if p.dim_intrinsic == 0:
        raise DegenerateInput("normal fan of a point")
    rays = [tuple(a) for a, _ in p.facets]
    fsets = p.facet_vertex_sets
    corr = {}
    for f in p.faces:
        if not f:
            continue
        corr[f] = frozenset(k for k, s in enumerate(fsets) if f <= s)
    maximal = [tuple(sorted(corr[frozenset([i])])) for i in range(p.n_vertices)]
    fan = Fan(rays, maximal, dim=p.dim_intrinsic)
    return (fan, corr) if with_correspondence else fan
