"""Integral affine manifolds with singularities presented as glued lattice polytopes.

A :class:`ComplexSpec` lists full dimensional lattice polytopes in ``R^n`` and
integral affine identifications of faces, each given by an ordered vertex
correspondence.  The identifications are closed under passing to subfaces and
turned into *face classes*: every class has a representative ``(cell, face)``
and, for each member, the vertex bijection onto the representative.

Fan structures live at the vertices of the quotient.  A fan structure assigns a
ray of a complete fan to every edge at every corner ``(cell, vertex)`` lying
over the vertex; the wedge isomorphism ``L`` of a corner is the unique linear
map sending primitive edge directions to their rays.  The chart of corner ``a``
of cell ``c`` is ``x -> L_{c,a} (x - a)``, and the transition through ``c`` from
corner ``a`` to corner ``b`` is ``y -> L_b (L_a^{-1} y + a - b)``.

The path map of ``v0, c0, v1, ..., vk`` is ``T_{k-1} o ... o T_0``.  The
holonomy of a loop is the inverse of its path map: the affine map of the chart
of ``v0`` carrying a point to its continuation around the loop.  Following
``g1`` then ``g2`` gives ``hol(g1) o hol(g2)``.
"""
from __future__ import annotations

import warnings
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations
from typing import Iterable, Sequence

from .errors import (
    AmbiguousTransition,
    DimensionMismatch,
    FanStructureMismatch,
    IncompleteFan,
    MalformedPath,
    NotALoop,
    NotAManifold,
    SpecError,
)
from .exact import (
    AffineMap,
    affine_compose,
    affine_from_points,
    affine_invert,
    clear_denominators,
    inverse,
    is_unimodular,
    mat,
    mat_mul,
    mat_vec,
    neg,
    rank,
    solve_linear_map,
    sub,
    vec,
)
from .fans import Fan
from .polytopes import LatticePolytope, barycenter, convex_hull


@dataclass(frozen=True)
class Identification:
    """Glue face ``face_a`` of ``cell_a`` to ``face_b`` of ``cell_b``, vertex by vertex."""

    cell_a: int
    face_a: tuple
    cell_b: int
    face_b: tuple
    matrix: tuple | None = None
    translation: tuple | None = None


@dataclass
class ComplexSpec:
    cells: list
    identifications: list
    cell_ids: list | None = None
    vertex_labels: list | None = None  # per cell, one label per vertex

    def __post_init__(self):
        self.cells = [c if isinstance(c, LatticePolytope) else convex_hull(c) for c in self.cells]
        self.identifications = [i if isinstance(i, Identification) else Identification(*i) for i in self.identifications]
        if self.cell_ids is None:
            self.cell_ids = [f"s{k}" for k in range(len(self.cells))]
        if len(set(self.cell_ids)) != len(self.cell_ids):
            raise SpecError("cell ids must be distinct")

    @property
    def dim(self) -> int:
        return self.cells[0].dim_ambient


@dataclass
class FanStructure:
    """Fan at a quotient vertex plus the ray of every edge at every corner over it.

    ``edge_rays`` maps ``(cell, corner, neighbour)`` (vertex indices of the
    cell) to an index into ``fan.rays``.
    """

    vertex: str
    fan: Fan
    edge_rays: dict


@dataclass(frozen=True)
class FaceClass:
    id: int
    dim: int
    rep: tuple  # (cell, frozenset of vertex indices)
    members: tuple  # (cell, frozenset, {cell vertex -> rep vertex})

    def member_map(self, cell: int, face: frozenset) -> dict:
        for c, f, beta in self.members:
            if c == cell and f == face:
                return beta
        raise KeyError((cell, face))


@dataclass(frozen=True)
class BarSimplex:
    """Simplex of the barycentric subdivision spanned by the barycenters of a chain of faces.

    The chain is stored inside the representative cell of its largest face.
    """

    cell: int
    chain: tuple  # frozensets of vertex indices of ``cell``, increasing
    classes: tuple  # face-class id of each chain member

    @property
    def dim(self) -> int:
        return len(self.chain) - 1


@dataclass(frozen=True)
class Step:
    """One move of a path: through ``cell`` from corner ``enter`` to corner ``leave``."""

    cell: int
    enter: int
    leave: int


def _face_chart(cell: LatticePolytope, face: Sequence[int]):
    pts = [cell.vertices[i] for i in face]
    return convex_hull(pts)


def _check_face_map(ca: LatticePolytope, fa: Sequence[int], cb: LatticePolytope, fb: Sequence[int]):
    """Raise unless fa -> fb (ordered) extends to an integral affine isomorphism of the faces."""
    ha, hb = _face_chart(ca, fa), _face_chart(cb, fb)
    if ha.dim_intrinsic != hb.dim_intrinsic:
        raise SpecError("identified faces have different dimensions")
    k = ha.dim_intrinsic
    if k == 0:
        return
    src = [ha.to_intrinsic(ca.vertices[i]) for i in fa]
    dst = [hb.to_intrinsic(cb.vertices[i]) for i in fb]
    amap = affine_from_points(src, dst)
    if amap is None or not amap.in_aff_m():
        raise SpecError("face identification is not an integral affine isomorphism")


class AffineComplex:
    """Quotient complex with fan structures, charts and discriminant data."""

    def __init__(
        self,
        spec: ComplexSpec,
        fan_structures: Iterable[FanStructure],
        check_manifold: bool = True,
        allow_boundary: bool = False,
    ):
        self.spec = spec
        self.allow_boundary = allow_boundary
        self.face_labels: dict[int, str] = {}
        self.cells: list[LatticePolytope] = spec.cells
        self.cell_ids: list[str] = list(spec.cell_ids)
        self.dim = spec.dim
        if any(c.dim_ambient != self.dim for c in self.cells):
            raise DimensionMismatch("cells live in different ambient dimensions")
        for k, c in enumerate(self.cells):
            if c.dim_intrinsic != self.dim:
                raise SpecError(f"cell {self.cell_ids[k]} is not {self.dim}-dimensional")
            if not c.is_lattice():
                raise SpecError(f"cell {self.cell_ids[k]} is not a lattice polytope")
        self._build_classes()
        self._label_vertices()
        self.fan_structures: dict[str, FanStructure] = {}
        for fs in fan_structures:
            if fs.vertex in self.fan_structures:
                raise SpecError(f"two fan structures for vertex {fs.vertex}")
            self.fan_structures[fs.vertex] = fs
        missing = set(self.vertex_ids) - set(self.fan_structures)
        if missing:
            raise SpecError(f"no fan structure at vertices {sorted(missing)}")
        extra = set(self.fan_structures) - set(self.vertex_ids)
        if extra:
            raise SpecError(f"fan structures for unknown vertices {sorted(extra)}")
        self._build_wedge_maps()
        self.manifold_checked = False
        if check_manifold and not allow_boundary:
            if self.dim <= 3:
                self.check_manifold()
                self.manifold_checked = True
            else:
                warnings.warn("manifold check skipped for dimension > 3", stacklevel=2)

    # ------------------------------------------------------------------
    # quotient
    # ------------------------------------------------------------------

    def _build_classes(self):
        nodes = []
        for c, cell in enumerate(self.cells):
            for f in cell.faces:
                if f:
                    nodes.append((c, f))
        node_set = set(nodes)
        adj: dict[tuple, list] = defaultdict(list)
        for ident in self.spec.identifications:
            a, b = ident.cell_a, ident.cell_b
            if not (0 <= a < len(self.cells) and 0 <= b < len(self.cells)):
                raise SpecError(f"identification refers to unknown cell {a} or {b}")
            fa, fb = tuple(ident.face_a), tuple(ident.face_b)
            if len(fa) != len(fb) or len(set(fa)) != len(fa) or len(set(fb)) != len(fb):
                raise SpecError("identified faces need matching vertex lists")
            if (a, frozenset(fa)) not in node_set or (b, frozenset(fb)) not in node_set:
                raise SpecError(f"identification {fa} ~ {fb} does not name faces")
            _check_face_map(self.cells[a], fa, self.cells[b], fb)
            if ident.matrix is not None:
                amap = AffineMap(ident.matrix, ident.translation or (0,) * self.dim)
                for i, j in zip(fa, fb):
                    if amap(self.cells[a].vertices[i]) != self.cells[b].vertices[j]:
                        raise SpecError("identification matrix disagrees with the vertex correspondence")
            f = dict(zip(fa, fb))
            fa_set = frozenset(fa)
            for g in self.cells[a].faces:
                if g and g <= fa_set:
                    img = frozenset(f[i] for i in g)
                    if (b, img) not in node_set:
                        raise SpecError("identification does not map faces to faces")
                    m = {i: f[i] for i in g}
                    adj[(a, g)].append(((b, img), m))
                    adj[(b, img)].append(((a, g), {v: k for k, v in m.items()}))
        seen: dict[tuple, dict] = {}
        classes = []
        order = sorted(nodes, key=lambda nd: (self.cells[nd[0]].face_dim(nd[1]), nd[0], sorted(nd[1])))
        for root in order:
            if root in seen:
                continue
            seen[root] = {i: i for i in root[1]}
            members = [root]
            queue = deque([root])
            while queue:
                node = queue.popleft()
                beta = seen[node]
                for other, m in adj[node]:
                    # other vertex -> node vertex -> root vertex
                    inv = {v: k for k, v in m.items()}
                    cand = {j: beta[inv[j]] for j in other[1]}
                    if other in seen:
                        if seen[other] != cand:
                            raise SpecError(
                                f"face {sorted(other[1])} of cell {self.cell_ids[other[0]]} is identified with itself by a non-identity map"
                            )
                        continue
                    seen[other] = cand
                    members.append(other)
                    queue.append(other)
            d = self.cells[root[0]].face_dim(root[1])
            classes.append((d, root, members))
        self.classes: list[FaceClass] = []
        self.class_of: dict[tuple, int] = {}
        for k, (d, root, members) in enumerate(classes):
            ms = tuple((c, f, seen[(c, f)]) for c, f in sorted(members, key=lambda nd: (nd[0], sorted(nd[1]))))
            self.classes.append(FaceClass(k, d, root, ms))
            for c, f, _ in ms:
                self.class_of[(c, f)] = k
        for fc in self.classes:
            if fc.dim == self.dim and len(fc.members) > 1:
                raise SpecError("maximal cells may not be identified with each other")

    def _label_vertices(self):
        labels = self.spec.vertex_labels
        self.vertex_ids: list[str] = []
        self.vertex_class: dict[str, int] = {}
        self._class_label: dict[int, str] = {}
        vclasses = [fc for fc in self.classes if fc.dim == 0]
        for k, fc in enumerate(vclasses):
            if labels is not None:
                names = {labels[c][next(iter(f))] for c, f, _ in fc.members}
                if len(names) != 1:
                    raise SpecError(f"inconsistent vertex labels {sorted(names)} on one quotient vertex")
                (name,) = names
            else:
                name = f"v{k}"
            if name in self.vertex_class:
                raise SpecError(f"vertex label {name} used for two quotient vertices")
            self.vertex_ids.append(name)
            self.vertex_class[name] = fc.id
            self._class_label[fc.id] = name
        self.corner_vertex: dict[tuple[int, int], str] = {}
        for c, cell in enumerate(self.cells):
            for i in range(cell.n_vertices):
                self.corner_vertex[(c, i)] = self._class_label[self.class_of[(c, frozenset([i]))]]

    def corners_at(self, v: str) -> list[tuple[int, int]]:
        return sorted(k for k, lab in self.corner_vertex.items() if lab == v)

    def corners_of(self, cell: int, v: str) -> list[int]:
        return [i for i in range(self.cells[cell].n_vertices) if self.corner_vertex[(cell, i)] == v]

    def cell_index(self, cell) -> int:
        if isinstance(cell, int):
            return cell
        try:
            return self.cell_ids.index(cell)
        except ValueError:
            raise MalformedPath(f"unknown cell {cell!r}") from None

    def local_face(self, cell: int, face: frozenset, corner: int) -> tuple[int, int]:
        """Key (face class, representative vertex) of ``face`` seen from ``corner``."""
        k = self.class_of[(cell, face)]
        beta = self.classes[k].member_map(cell, face)
        return k, beta[corner]

    def class_name(self, k: int) -> str:
        if k in self.face_labels:
            return self.face_labels[k]
        fc = self.classes[k]
        if fc.dim == 0:
            return self._class_label[k]
        c, f = fc.rep
        if fc.dim == self.dim:
            return self.cell_ids[c]
        return f"{self.cell_ids[c]}[{','.join(str(i) for i in sorted(f))}]"

    def classes_of_dim(self, d: int) -> list[FaceClass]:
        return [fc for fc in self.classes if fc.dim == d]

    @cached_property
    def f_vector(self) -> list[int]:
        return [len(self.classes_of_dim(d)) for d in range(self.dim + 1)]

    def cell_vertex_labels(self, c: int) -> list[str]:
        return [self.corner_vertex[(c, i)] for i in range(self.cells[c].n_vertices)]

    # ------------------------------------------------------------------
    # fan structures and wedge isomorphisms
    # ------------------------------------------------------------------

    def _build_wedge_maps(self):
        n = self.dim
        self.wedge: dict[tuple[int, int], tuple] = {}
        self.corner_cone: dict[tuple[int, int], int] = {}
        for v in self.vertex_ids:
            fs = self.fan_structures[v]
            fan = fs.fan
            if fan.dim != n:
                raise FanStructureMismatch(f"fan at {v} has dimension {fan.dim}, expected {n}")
            if not self.allow_boundary:
                try:
                    fan.require_complete()
                except IncompleteFan as exc:
                    raise IncompleteFan(f"fan at {v}: {exc}") from None
            edge_ray: dict[tuple, int] = {}
            used_cones = {}
            for c, i in self.corners_at(v):
                cell = self.cells[c]
                nbrs = cell.edges_at(i)
                src, dst = [], []
                for j in nbrs:
                    key = (c, i, j)
                    if key not in fs.edge_rays:
                        raise FanStructureMismatch(f"fan structure at {v} gives no ray for edge {key}")
                    r = fs.edge_rays[key]
                    if not 0 <= r < len(fan.rays):
                        raise FanStructureMismatch(f"ray index {r} out of range at {v}")
                    local = self.local_face(c, frozenset((i, j)), i)
                    if edge_ray.setdefault(local, r) != r:
                        raise FanStructureMismatch(f"one edge is sent to two rays at {v}")
                    src.append(clear_denominators(sub(cell.vertices[j], cell.vertices[i])))
                    dst.append(fan.rays[r])
                lin = solve_linear_map(src, dst)
                if lin is None or not is_unimodular(lin):
                    raise FanStructureMismatch(
                        f"tangent wedge of {self.cell_ids[c]} at corner {i} is not lattice isomorphic to its cone at {v}"
                    )
                rays = frozenset(fs.edge_rays[(c, i, j)] for j in nbrs)
                try:
                    cone_idx = [frozenset(m) for m in fan.maximal_cones].index(rays)
                except ValueError:
                    raise FanStructureMismatch(f"edges of {self.cell_ids[c]} at corner {i} do not span a maximal cone at {v}") from None
                if cone_idx in used_cones:
                    raise FanStructureMismatch(f"two cells share the maximal cone {cone_idx} at {v}")
                used_cones[cone_idx] = (c, i)
                self.wedge[(c, i)] = lin
                self.corner_cone[(c, i)] = cone_idx
            if len(used_cones) != len(fan.maximal_cones):
                raise FanStructureMismatch(f"fan at {v} has maximal cones without a cell")

    def wedge_map(self, cell: int, corner: int) -> AffineMap:
        """Chart x -> L (x - corner) of the cell near that corner."""
        lin = self.wedge[(cell, corner)]
        base = self.cells[cell].vertices[corner]
        return AffineMap(lin, neg(mat_vec(lin, base)))

    def step_map(self, step: Step) -> AffineMap:
        """Transition from the chart at ``step.enter`` to the chart at ``step.leave``."""
        a = self.wedge_map(step.cell, step.enter)
        b = self.wedge_map(step.cell, step.leave)
        ainv = AffineMap(inverse(a.linear), mat_vec(inverse(a.linear), neg(a.translation)))
        out = affine_compose(b, ainv)
        return AffineMap(mat(out.linear), vec(out.translation))

    def transition_map(self, v1: str, cell, v2: str) -> AffineMap:
        c = self.cell_index(cell)
        a = self.corners_of(c, v1)
        b = self.corners_of(c, v2)
        if not a or not b:
            raise MalformedPath(f"{v1} or {v2} is not a vertex of {self.cell_ids[c]}")
        if len(a) > 1 or len(b) > 1:
            raise AmbiguousTransition(f"{self.cell_ids[c]} meets {v1} or {v2} in several corners; name them")
        return self.step_map(Step(c, a[0], b[0]))

    # ------------------------------------------------------------------
    # paths
    # ------------------------------------------------------------------

    def parse_path(self, word: str | Sequence[str]) -> tuple[list[str], list[Step]]:
        """Parse ``v0,s0,v1,...`` (cells optionally written ``s0:i-j``) into vertices and steps."""
        tokens = [t.strip() for t in word.split(",")] if isinstance(word, str) else [str(t).strip() for t in word]
        tokens = [t for t in tokens if t]
        if not tokens:
            raise MalformedPath("empty path")
        if len(tokens) % 2 == 0:
            raise MalformedPath("a path alternates vertices and cells and ends at a vertex")
        verts = tokens[0::2]
        for v in verts:
            if v not in self.vertex_class:
                raise MalformedPath(f"unknown vertex {v!r}")
        steps = []
        for k, tok in enumerate(tokens[1::2]):
            v1, v2 = verts[k], verts[k + 1]
            name, _, corners = tok.partition(":")
            c = self.cell_index(name)
            if corners:
                try:
                    i, j = (int(x) for x in corners.split("-"))
                except ValueError:
                    raise MalformedPath(f"bad corner spec {tok!r}") from None
                n_v = self.cells[c].n_vertices
                if not (0 <= i < n_v and 0 <= j < n_v):
                    raise MalformedPath(f"corner out of range in {tok!r}")
                if self.corner_vertex[(c, i)] != v1 or self.corner_vertex[(c, j)] != v2:
                    raise MalformedPath(f"corners of {tok!r} do not lie over {v1} and {v2}")
            else:
                a, b = self.corners_of(c, v1), self.corners_of(c, v2)
                if not a or not b:
                    raise MalformedPath(f"{self.cell_ids[c]} does not contain both {v1} and {v2}")
                if len(a) > 1 or len(b) > 1:
                    raise AmbiguousTransition(f"{self.cell_ids[c]} meets {v1} or {v2} in several corners; write {name}:i-j")
                i, j = a[0], b[0]
            steps.append(Step(c, i, j))
        return verts, steps

    def format_path(self, start: str, steps: Sequence[Step]) -> str:
        out = [start]
        for s in steps:
            out.append(f"{self.cell_ids[s.cell]}:{s.enter}-{s.leave}")
            out.append(self.corner_vertex[(s.cell, s.leave)])
        return ",".join(out)

    def path_map(self, steps: Sequence[Step]) -> AffineMap:
        out = AffineMap.identity(self.dim)
        for s in steps:
            out = affine_compose(self.step_map(s), out)
        return out

    def holonomy(self, loop) -> AffineMap:
        verts, steps = self.parse_path(loop) if not _is_steps(loop) else (None, list(loop))
        if verts is not None and verts[0] != verts[-1]:
            raise NotALoop(f"path from {verts[0]} ends at {verts[-1]}")
        if verts is None and steps:
            if self.corner_vertex[(steps[0].cell, steps[0].enter)] != self.corner_vertex[(steps[-1].cell, steps[-1].leave)]:
                raise NotALoop("steps do not close up")
        return affine_invert(self.path_map(steps))

    # ------------------------------------------------------------------
    # manifold check
    # ------------------------------------------------------------------

    def local_faces_at(self, v: str) -> dict[tuple[int, int], int]:
        """Local faces (class, rep vertex) at v with their dimensions."""
        out = {}
        for c, i in self.corners_at(v):
            for f in self.cells[c].faces:
                if i in f:
                    key = self.local_face(c, f, i)
                    out[key] = self.classes[key[0]].dim
        return out

    def check_manifold(self):
        n = self.dim
        for fc in self.classes_of_dim(n - 1):
            if len(fc.members) != 2:
                raise NotAManifold(f"codimension one face {self.class_name(fc.id)} lies in {len(fc.members)} cells")
        for v in self.vertex_ids:
            local = self.local_faces_at(v)
            # link: local faces of dim >= 1, shifted down by one
            cells_by_dim = defaultdict(list)
            for key, d in local.items():
                if d >= 1:
                    cells_by_dim[d - 1].append(key)
            chi = sum((-1) ** d * len(cs) for d, cs in cells_by_dim.items())
            expected = 1 + (-1) ** (n - 1)
            if chi != expected:
                raise NotAManifold(f"link of {v} has Euler characteristic {chi}, expected {expected}")
            if n >= 2 and not self._link_connected(v, local):
                raise NotAManifold(f"link of {v} is disconnected")
            if n == 3:
                self._check_link_surface(v, local)

    def _local_incidence(self, v: str):
        """Pairs (smaller, larger) of local faces at v with dims differing by one."""
        pairs = set()
        for c, i in self.corners_at(v):
            faces = [f for f in self.cells[c].faces if i in f]
            for f in faces:
                for g in faces:
                    if f < g and self.cells[c].face_dim(g) == self.cells[c].face_dim(f) + 1:
                        pairs.add((self.local_face(c, f, i), self.local_face(c, g, i)))
        return pairs

    def _link_connected(self, v, local) -> bool:
        pairs = self._local_incidence(v)
        nodes = [k for k, d in local.items() if d >= 1]
        graph = defaultdict(set)
        for a, b in pairs:
            if local[a] >= 1:
                graph[a].add(b)
                graph[b].add(a)
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            x = stack.pop()
            for y in graph[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen >= set(nodes)

    def _check_link_surface(self, v, local):
        pairs = self._local_incidence(v)
        up = defaultdict(list)
        for a, b in pairs:
            up[a].append(b)
        for key, d in local.items():
            if d == 2 and len(up[key]) != 2:
                raise NotAManifold(f"link of {v} is not a surface")


    # ------------------------------------------------------------------
    # discriminant loci
    # ------------------------------------------------------------------

    @cached_property
    def delta_prime(self) -> tuple[BarSimplex, ...]:
        """Simplices of Bar(P) avoiding vertices and barycenters of maximal cells."""
        n = self.dim
        out = []
        for fc in self.classes:
            if not 1 <= fc.dim <= n - 1:
                continue
            c, top = fc.rep
            cell = self.cells[c]
            inner = [f for f in cell.faces if f and f < top and 1 <= cell.face_dim(f)]
            for r in range(len(inner) + 1):
                for sub_ in combinations(sorted(inner, key=lambda f: (len(f), sorted(f))), r):
                    chain = sorted(sub_, key=len)
                    if all(a < b for a, b in zip(chain, chain[1:])):
                        full = tuple(chain) + (top,)
                        out.append(BarSimplex(c, full, tuple(self.class_of[(c, f)] for f in full)))
        return tuple(sorted(out, key=lambda s: (s.dim, s.classes, s.cell, [sorted(f) for f in s.chain])))

    def default_discriminant(self) -> tuple[BarSimplex, ...]:
        return self.delta_prime

    def top_delta_simplices(self) -> list[BarSimplex]:
        return [s for s in self.delta_prime if s.dim == self.dim - 2]

    def small_loop(self, s: BarSimplex) -> tuple[str, list[Step]]:
        """Loop through the two maximal cells at the largest face of a top simplex of Δ′.

        Starting at one end of the edge ``chain[0]`` it runs through the first cell
        to the other end and back through the second.
        """
        edge = s.chain[0]
        k = s.classes[-1]
        fc = self.classes[k]
        if len(fc.members) != 2:
            raise NotAManifold("codimension one face not in exactly two cells")
        beta_rep = fc.member_map(s.cell, s.chain[-1])
        p, q = sorted(beta_rep[i] for i in edge)
        steps = []
        (ca, fa, ba), (cb, fb, bb) = fc.members
        inv_a = {r: i for i, r in ba.items()}
        inv_b = {r: i for i, r in bb.items()}
        steps.append(Step(ca, inv_a[p], inv_a[q]))
        steps.append(Step(cb, inv_b[q], inv_b[p]))
        start = self.corner_vertex[(ca, inv_a[p])]
        return start, steps

    def local_holonomy(self, s: BarSimplex) -> AffineMap:
        _, steps = self.small_loop(s)
        return affine_invert(self.path_map(steps))

    def minimal_discriminant(self) -> tuple[BarSimplex, ...]:
        """Closure of the top simplices of Δ′ with non-trivial local holonomy."""
        keep = [s for s in self.top_delta_simplices() if not self.local_holonomy(s).is_identity()]
        closure = set()
        for t in keep:
            for r in range(1, len(t.chain) + 1):
                for sub_ in combinations(t.chain, r):
                    closure.add(self.canonical_simplex(t.cell, sub_))
        return tuple(s for s in self.delta_prime if s in closure)

    def canonical_simplex(self, cell: int, chain: Sequence[frozenset]) -> BarSimplex:
        """The Bar simplex of a chain of faces of ``cell``, moved into its representative cell."""
        top = chain[-1]
        k = self.class_of[(cell, top)]
        beta = self.classes[k].member_map(cell, top)
        rc, _ = self.classes[k].rep
        moved = tuple(frozenset(beta[i] for i in f) for f in chain)
        return BarSimplex(rc, moved, tuple(self.class_of[(rc, f)] for f in moved))

    def check_toric(self) -> dict[str, dict]:
        """Per-face report: local holonomies near the face preserve its tangent space
        and act trivially on the quotient lattice."""
        n = self.dim
        report = {}
        loops_by_class = defaultdict(list)
        for s in self.top_delta_simplices():
            for k in s.classes:
                loops_by_class[k].append(s)
        for fc in self.classes:
            name = self.class_name(fc.id)
            if not 1 <= fc.dim <= n - 1:
                report[name] = {"dim": fc.dim, "ok": True, "loops": 0}
                continue
            failures = []
            for s in loops_by_class.get(fc.id, []):
                start, steps = self.small_loop(s)
                a = self.path_map(steps).linear
                c0, i0 = steps[0].cell, steps[0].enter
                # tangent of this face inside cell c0, seen from the corner
                pos = s.classes.index(fc.id)
                face_rep = s.chain[pos]
                k_top = s.classes[-1]
                beta_top = self.classes[k_top].member_map(s.cell, s.chain[-1])
                mem = next(m for m in self.classes[k_top].members if m[0] == c0 and i0 in m[1])
                inv = {r: i for i, r in mem[2].items()}
                face = [inv[beta_top[i]] for i in face_rep]
                cell = self.cells[c0]
                lin = self.wedge[(c0, i0)]
                tangent = [mat_vec(lin, sub(cell.vertices[j], cell.vertices[face[0]])) for j in face[1:]]
                t_rank = rank(tangent)
                moved = [mat_vec(a, t) for t in tangent]
                dev = [tuple(a[r][col] - (r == col) for r in range(n)) for col in range(n)]
                ok = rank(tangent + moved) == t_rank and rank(tangent + dev) == t_rank
                if not ok:
                    failures.append(self.format_path(start, steps))
            report[name] = {"dim": fc.dim, "ok": not failures, "loops": len(loops_by_class.get(fc.id, [])), "failing_loops": failures}
        return report

    def is_toric(self) -> bool:
        return all(r["ok"] for r in self.check_toric().values())

    def bar_simplex_points(self, s: BarSimplex) -> list[tuple]:
        cell = self.cells[s.cell]
        return [barycenter([cell.vertices[i] for i in f]) for f in s.chain]

    def describe_simplex(self, s: BarSimplex) -> str:
        return " < ".join(self.class_name(k) for k in s.classes)


def _is_steps(x) -> bool:
    return isinstance(x, (list, tuple)) and (not x or isinstance(x[0], Step))


def build_complex(
    spec: ComplexSpec,
    fan_structures: Iterable[FanStructure],
    check_manifold: bool = True,
    allow_boundary: bool = False,
) -> AffineComplex:
    return AffineComplex(spec, fan_structures, check_manifold=check_manifold, allow_boundary=allow_boundary)


def embedded_fan_structures(spec: ComplexSpec) -> list[FanStructure]:
    """Fan structures with every wedge map the identity (edges map to their own directions).

    Suitable when all gluings are translations, e.g. tori and cycles.
    """
    probe = _QuotientOnly(spec)
    out = []
    for v in probe.vertex_ids:
        rays: list[tuple] = []
        edge_rays = {}
        cones = []
        for c, i in probe.corners_at(v):
            cell = spec.cells[c]
            ids = []
            for j in cell.edges_at(i):
                d = clear_denominators(sub(cell.vertices[j], cell.vertices[i]))
                if d not in rays:
                    rays.append(d)
                edge_rays[(c, i, j)] = rays.index(d)
                ids.append(rays.index(d))
            cones.append(ids)
        order = sorted(range(len(rays)), key=lambda r: rays[r])
        remap = {old: new for new, old in enumerate(order)}
        fan = Fan([rays[o] for o in order], [[remap[r] for r in c] for c in cones], dim=spec.dim)
        out.append(FanStructure(v, fan, {k: remap[r] for k, r in edge_rays.items()}))
    return out


class _QuotientOnly(AffineComplex):
    """The quotient cell structure without fan data."""

    def __init__(self, spec: ComplexSpec):
        self.spec = spec
        self.cells = spec.cells
        self.cell_ids = list(spec.cell_ids)
        self.dim = spec.dim
        self.face_labels = {}
        self._build_classes()
        self._label_vertices()


# ----------------------------------------------------------------------
# isomorphisms of complexes
# ----------------------------------------------------------------------

@dataclass
class ComplexIsomorphism:
    """Cell-wise integral affine maps forming an isomorphism of complexes."""

    cell_map: dict  # cell index -> cell index
    affine: dict  # cell index -> AffineMap into the target cell's coordinates
    vertex_map: dict  # vertex label -> vertex label
    fan_maps: dict  # vertex label -> linear map between fan spaces

    def as_dict(self, src: AffineComplex, dst: AffineComplex) -> dict:
        from .exact import fmt_matrix, fmt_vector

        return {
            "cells": {src.cell_ids[c]: dst.cell_ids[d] for c, d in sorted(self.cell_map.items())},
            "vertices": dict(sorted(self.vertex_map.items())),
            "cell_maps": {
                src.cell_ids[c]: {"linear": fmt_matrix(a.linear), "translation": fmt_vector(a.translation)}
                for c, a in sorted(self.affine.items())
            },
            "fan_maps": {v: fmt_matrix(m) for v, m in sorted(self.fan_maps.items())},
        }


def _affine_isos(src: LatticePolytope, dst: LatticePolytope):
    """All integral affine isomorphisms src -> dst (as AffineMap plus vertex map)."""
    if src.n_vertices != dst.n_vertices or src.dim_ambient != dst.dim_ambient:
        return
    n = src.dim_ambient
    frame = [0]
    for i in range(1, src.n_vertices):
        if len(frame) == n + 1:
            break
        if rank([sub(src.vertices[j], src.vertices[0]) for j in frame[1:] + [i]]) == len(frame):
            frame.append(i)
    targets = set(dst.vertices)
    for img in permutations(range(dst.n_vertices), len(frame)):
        amap = affine_from_points([src.vertices[i] for i in frame], [dst.vertices[j] for j in img])
        if amap is None or not amap.in_aff_m():
            continue
        images = [amap(v) for v in src.vertices]
        if set(images) != targets:
            continue
        yield amap, {i: dst.vertices.index(images[i]) for i in range(src.n_vertices)}


def find_isomorphism(
    a: AffineComplex,
    b: AffineComplex,
    kinks_a: dict | None = None,
    kinks_b: dict | None = None,
) -> ComplexIsomorphism | None:
    """Search an isomorphism of integral affine complexes with fan structures.

    Optional ``kinks_*`` map codimension one face classes to the bend of an MPL
    function; when given they must correspond as well.
    """
    if a.dim != b.dim or a.f_vector != b.f_vector:
        return None
    if len(a.cells) == 0:
        return ComplexIsomorphism({}, {}, {}, {})
    for d0 in range(len(b.cells)):
        for amap, vmap in _affine_isos(a.cells[0], b.cells[d0]):
            result = _propagate(a, b, 0, d0, amap, vmap, kinks_a, kinks_b)
            if result is not None:
                return result
    return None


def _propagate(a, b, c0, d0, amap0, vmap0, kinks_a, kinks_b):
    cell_map = {c0: d0}
    affine = {c0: amap0}
    vmaps = {c0: vmap0}
    fan_maps: dict[str, tuple] = {}
    vertex_map: dict[str, str] = {}
    queue = deque([c0])

    def corner_fan_map(c, i):
        d, amap, vm = cell_map[c], affine[c], vmaps[c]
        return mat_mul(mat_mul(b.wedge[(d, vm[i])], amap.linear), inverse(a.wedge[(c, i)]))

    while queue:
        c = queue.popleft()
        d, vm = cell_map[c], vmaps[c]
        for i in range(a.cells[c].n_vertices):
            va, vb = a.corner_vertex[(c, i)], b.corner_vertex[(d, vm[i])]
            if vertex_map.setdefault(va, vb) != vb:
                return None
            g = corner_fan_map(c, i)
            if fan_maps.setdefault(va, g) != g:
                return None
        for f in a.cells[c].faces:
            if not f or a.cells[c].face_dim(f) != a.dim - 1:
                continue
            k = a.class_of[(c, f)]
            fimg = frozenset(vm[i] for i in f)
            kb = b.class_of.get((d, fimg))
            if kb is None:
                return None
            if kinks_a is not None and kinks_b is not None and kinks_a.get(k) != kinks_b.get(kb):
                return None
            (c1, f1, beta1), = [m for m in a.classes[k].members if (m[0], m[1]) != (c, f)] or [(None, None, None)]
            if c1 is None:
                return None
            beta_cf = a.classes[k].member_map(c, f)
            others_b = [m for m in b.classes[kb].members if (m[0], m[1]) != (d, fimg)]
            if len(others_b) != 1:
                return None
            d1, g1, gamma1 = others_b[0]
            gamma_dfimg = b.classes[kb].member_map(d, fimg)
            # vertex map on f1: f1 -> rep_a -> f -> fimg -> rep_b -> g1
            inv_beta_cf = {r: i for i, r in beta_cf.items()}
            inv_gamma1 = {r: j for j, r in gamma1.items()}
            fmap = {x: inv_gamma1[gamma_dfimg[vm[inv_beta_cf[beta1[x]]]]] for x in f1}
            x0 = next(iter(f1))
            i0 = x0
            lin_c1 = a.wedge[(c1, i0)]
            g = fan_maps[a.corner_vertex[(c1, i0)]]
            j0 = fmap[x0]
            lin_d1 = b.wedge[(d1, j0)]
            new_lin = mat_mul(mat_mul(inverse(lin_d1), g), lin_c1)
            if not is_unimodular(new_lin):
                return None
            base_a, base_b = a.cells[c1].vertices[i0], b.cells[d1].vertices[j0]
            new_map = AffineMap(new_lin, sub(base_b, mat_vec(new_lin, base_a)))
            images = [new_map(v) for v in a.cells[c1].vertices]
            if set(images) != set(b.cells[d1].vertices):
                return None
            new_vm = {x: b.cells[d1].vertices.index(images[x]) for x in range(a.cells[c1].n_vertices)}
            if any(new_vm[x] != fmap[x] for x in f1):
                return None
            if c1 in cell_map:
                if cell_map[c1] != d1 or affine[c1] != new_map:
                    return None
                continue
            if d1 in cell_map.values():
                return None
            cell_map[c1], affine[c1], vmaps[c1] = d1, new_map, new_vm
            queue.append(c1)
    if len(cell_map) != len(a.cells) or len(set(cell_map.values())) != len(b.cells):
        return None
    # every face class must go to a face class of the same size
    for fc in a.classes:
        imgs = {b.class_of.get((cell_map[c], frozenset(vmaps[c][i] for i in f))) for c, f, _ in fc.members}
        if len(imgs) != 1 or None in imgs:
            return None
        (kb,) = imgs
        if len(b.classes[kb].members) != len(fc.members):
            return None
    return ComplexIsomorphism(cell_map, affine, vertex_map, fan_maps)
