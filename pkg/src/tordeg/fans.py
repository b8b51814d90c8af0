"""Rational polyhedral cones, complete fans and piecewise linear functions on fans.

Sign conventions.  A polytope's normal fan is the *inner* normal fan: the cone
of a face τ collects the functionals minimised on τ.  The support function of a
polytope P is ``y -> -min_{x in P} <y, x>``, whose linear part on the cone of a
vertex w is ``-w``.  The Newton polytope of a convex PL function φ is
``{x : <x, y> >= -φ(y)}``, the convex hull of the negated linear parts.  With
these conventions ``newton_polytope(support_function(P)) == P`` exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import (
    DegenerateInput,
    IncompleteFan,
    NotConvex,
    NotStronglyConvex,
    UnsupportedDimension,
)
from .exact import (
    det,
    dot,
    frac,
    inverse,
    mat,
    mat_vec,
    neg,
    normalize,
    nullspace,
    primitive_vector,
    rank,
    saturated_basis,
    sub,
    to_int_vector,
    transpose,
    vec,
)


def _hcone_generators(rows: Sequence[Sequence[int]], n: int) -> tuple[list[tuple], list[tuple]]:
    """Generators of {x in R^n : rows @ x >= 0} as (lineality basis, extreme rays)."""
    rows = [tuple(r) for r in rows if any(r)]
    lineality = nullspace(rows, n) if rows else [tuple(int(i == j) for i in range(n)) for j in range(n)]
    if not rows:
        return lineality, []
    d = n - len(lineality)
    rays: set[tuple] = set()
    for subset in combinations(range(len(rows)), d - 1):
        eqs = [rows[i] for i in subset] + list(lineality)
        if rank(eqs) != n - 1:
            continue
        (r,) = nullspace(eqs, n)
        for cand in (r, neg(r)):
            if all(dot(a, cand) >= 0 for a in rows):
                rays.add(primitive_vector(cand))
                break
    return lineality, sorted(rays)


@dataclass(frozen=True, eq=False)
class Cone:
    """A rational polyhedral cone given by generators (not necessarily irredundant).

    After construction ``generators`` holds the irredundant description:
    extreme rays of the pointed part followed by ``±`` a lineality basis.
    """

    generators: tuple
    dim_ambient: int

    def __init__(self, generators: Iterable[Sequence[int]], dim_ambient: int | None = None):
        gens = [to_int_vector(g) for g in generators]
        gens = [primitive_vector(g) for g in gens if any(g)]
        if dim_ambient is None:
            if not gens:
                raise DegenerateInput("dimension of an empty cone must be given")
            dim_ambient = len(gens[0])
        if dim_ambient > 4:
            raise UnsupportedDimension(f"cones in dimension {dim_ambient} > 4 are not supported")
        object.__setattr__(self, "dim_ambient", dim_ambient)
        object.__setattr__(self, "_input", tuple(gens))
        lin, rays = self._irredundant(gens, dim_ambient)
        object.__setattr__(self, "lineality", tuple(lin))
        object.__setattr__(self, "rays", tuple(rays))
        object.__setattr__(self, "generators", tuple(rays) + tuple(g for l in lin for g in (l, neg(l))))

    @staticmethod
    def _irredundant(gens, n):
        # inequalities of the cone = generators of its dual
        dlin, drays = _hcone_generators(gens, n)
        ineqs = list(drays) + [g for l in dlin for g in (l, neg(l))]
        lin, rays = _hcone_generators(ineqs, n)
        # lineality basis restricted to the span of the generators
        return lin, rays

    @cached_property
    def inequalities(self) -> tuple:
        """Normals a with <a, x> >= 0 cutting out the cone (equations appear as ±a)."""
        dlin, drays = _hcone_generators(self.generators, self.dim_ambient)
        return tuple(drays) + tuple(g for l in dlin for g in (l, neg(l)))

    @property
    def dim(self) -> int:
        return rank(self.generators) if self.generators else 0

    @property
    def is_strongly_convex(self) -> bool:
        return not self.lineality

    def contains(self, x: Sequence) -> bool:
        return all(dot(a, x) >= 0 for a in self.inequalities)

    def relative_interior_point(self) -> tuple:
        if not self.generators:
            return (0,) * self.dim_ambient
        return vec(sum(g[i] for g in self.generators) for i in range(self.dim_ambient))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cone) or other.dim_ambient != self.dim_ambient:
            return NotImplemented
        return all(other.contains(g) for g in self.generators) and all(self.contains(g) for g in other.generators)

    def __hash__(self):
        return hash((self.dim_ambient, frozenset(self.rays), len(self.lineality)))

    def __repr__(self):
        return f"Cone(rays={list(self.rays)}, lineality={list(self.lineality)})"

    @cached_property
    def facet_ray_sets(self) -> tuple[frozenset, ...]:
        """For a pointed cone: the ray-index sets of its facets."""
        if not self.is_strongly_convex:
            raise NotStronglyConvex("facets by rays need a pointed cone")
        d = self.dim
        out = set()
        for a in self.inequalities:
            tight = frozenset(i for i, r in enumerate(self.rays) if dot(a, r) == 0)
            if len(tight) < len(self.rays) and rank([self.rays[i] for i in tight] or [(0,) * self.dim_ambient]) == d - 1:
                out.add(tight)
        if d == 1:
            out = {frozenset()}
        return tuple(sorted(out, key=sorted))

    def face_ray_sets(self) -> list[frozenset]:
        """All faces (as ray-index sets) of a pointed cone, including {} and the cone."""
        facets = set(self.facet_ray_sets)
        faces = {frozenset(range(len(self.rays)))} | facets
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
        faces.add(frozenset())
        return sorted(faces, key=lambda s: (len(s), sorted(s)))


def dual_cone(c: Cone) -> Cone:
    """{f : <f, m> >= 0 for all m in c}."""
    if c.dim_ambient > 3:
        raise UnsupportedDimension("dual_cone supports ambient dimension <= 3")
    lin, rays = _hcone_generators(c.generators, c.dim_ambient)
    gens = list(rays) + [g for l in lin for g in (l, neg(l))]
    return Cone(gens, c.dim_ambient)


def intersect_cones(a: Cone, b: Cone) -> Cone:
    lin, rays = _hcone_generators(list(a.inequalities) + list(b.inequalities), a.dim_ambient)
    return Cone(list(rays) + [g for l in lin for g in (l, neg(l))], a.dim_ambient)


# ---------------------------------------------------------------------------
# Hilbert bases
# ---------------------------------------------------------------------------

def _triangulate_rays(cone: Cone) -> list[tuple[int, ...]]:
    """Placing triangulation of a pointed cone into simplicial cones (ray indices)."""
    faces = cone.face_ray_sets()
    dims = {f: (rank([cone.rays[i] for i in f]) if f else 0) for f in faces}

    def facets_of(face):
        d = dims[face]
        return [g for g in faces if g < face and dims[g] == d - 1]

    def tri(face):
        if len(face) == dims[face]:
            return [tuple(sorted(face))]
        apex = min(face)
        out = []
        for g in facets_of(face):
            if apex in g:
                continue
            for simplex in tri(g):
                out.append(tuple(sorted(simplex + (apex,))))
        return out

    top = frozenset(range(len(cone.rays)))
    return tri(top)


def hilbert_basis(c: Cone, use_numba: bool | None = None) -> list[tuple[int, ...]]:
    """Minimal generating set of the monoid c ∩ Z^n, sorted lexicographically."""
    if not c.is_strongly_convex:
        raise NotStronglyConvex("Hilbert basis requires a strongly convex cone")
    if c.dim_ambient > 3:
        raise UnsupportedDimension("hilbert_basis supports ambient dimension <= 3")
    if not c.rays:
        return []
    n = c.dim_ambient
    w, u, k = saturated_basis(c.rays, n)
    to_intr = [w[i] for i in range(k)]
    back = [tuple(u[r][j] for r in range(n)) for j in range(k)]  # columns of U
    rays = [to_int_vector(mat_vec(to_intr, r)) for r in c.rays]
    icone = Cone(rays, k)
    candidates: set[tuple] = set(rays)
    for simplex in _triangulate_rays(icone):
        g = [icone.rays[i] for i in simplex]
        gm = transpose(g)  # columns are generators
        d = det(gm)
        adj = mat(tuple(int(x * d) for x in row) for row in inverse(gm))
        if _kernels.fits_int64(gm, adj):
            pts = _kernels.parallelepiped_points(gm, adj, int(d), use_numba=use_numba)
            pts = [tuple(int(x) for x in p) for p in pts]
        else:  # pragma: no cover - huge determinants
            pts = _parallelepiped_python(gm, adj, int(d))
        candidates.update(p for p in pts if any(p))
    cands = sorted(candidates)
    basis = []
    for s in cands:
        reducible = any(t != s and icone.contains(sub(s, t)) for t in cands)
        if not reducible:
            basis.append(s)
    out = [to_int_vector(vec(sum(b[j] * back[j][r] for j in range(k)) for r in range(n))) for b in basis]
    return sorted(out)


def _parallelepiped_python(gm, adj, d):
    from .exact import integer_points_in_box

    bounds = [(sum(min(0, x) for x in row), sum(max(0, x) for x in row)) for row in gm]
    out = []
    s = 1 if d > 0 else -1
    for x in integer_points_in_box(bounds):
        lam = [s * dot(row, x) for row in adj]
        if all(0 <= l < abs(d) for l in lam):
            out.append(tuple(x))
    return out


# ---------------------------------------------------------------------------
# Fans
# ---------------------------------------------------------------------------

# fans are immutable, so geometric checks are shared between equal fans
_VALIDATED: set = set()
_COMPLETENESS: dict = {}


@dataclass(eq=False)
class Fan:
    """A rational polyhedral fan given by primitive rays and maximal cones (ray-index tuples)."""

    rays: tuple
    maximal_cones: tuple
    dim: int = 0
    labels: dict = field(default_factory=dict)

    def __init__(self, rays: Iterable[Sequence[int]], maximal_cones: Iterable[Iterable[int]], dim: int | None = None):
        self.rays = tuple(primitive_vector(r) for r in rays)
        self.maximal_cones = tuple(tuple(sorted(c)) for c in maximal_cones)
        if dim is None:
            if not self.rays:
                raise DegenerateInput("fan dimension must be given when there are no rays")
            dim = len(self.rays[0])
        self.dim = dim
        self.labels = {}
        self._cone_cache: dict = {}
        if self._key in _VALIDATED:
            return
        for c in self.maximal_cones:
            cone = self.cone(c)
            if not cone.is_strongly_convex:
                raise NotStronglyConvex(f"cone {c} is not strongly convex")
            if set(cone.rays) != {self.rays[i] for i in c}:
                raise DegenerateInput(f"rays of cone {c} are not its extreme rays")
        _VALIDATED.add(self._key)

    @property
    def _key(self) -> tuple:
        return (self.rays, self.maximal_cones, self.dim)

    def cone(self, ray_ids: Iterable[int]) -> Cone:
        ids = tuple(ray_ids)
        c = self._cone_cache.get(ids)
        if c is None:
            c = self._cone_cache[ids] = Cone([self.rays[i] for i in ids], self.dim)
        return c

    @cached_property
    def cones(self) -> tuple[frozenset, ...]:
        """All cones of the fan as ray-index sets (face closure), sorted."""
        out: set[frozenset] = set()
        for c in self.maximal_cones:
            cone = self.cone(c)
            idx = {cone.rays.index(self.rays[i]): i for i in c}
            for f in cone.face_ray_sets():
                out.add(frozenset(idx[j] for j in f))
        return tuple(sorted(out, key=lambda s: (len(s), sorted(s))))

    def cone_dim(self, ray_ids: Iterable[int]) -> int:
        ids = list(ray_ids)
        return rank([self.rays[i] for i in ids]) if ids else 0

    def walls(self) -> list[frozenset]:
        return [c for c in self.cones if self.cone_dim(c) == self.dim - 1]

    def maximal_containing(self, ray_ids: frozenset) -> list[int]:
        return [k for k, c in enumerate(self.maximal_cones) if ray_ids <= set(c)]

    def wall_normal(self, wall: frozenset) -> tuple:
        """Primitive normal to the wall's span (sign unspecified)."""
        vs = [self.rays[i] for i in wall]
        (nrm,) = nullspace(vs, self.dim) if vs else [(1,)]
        return primitive_vector(nrm)

    def check_complete(self) -> list[str]:
        """Problems preventing the fan from being complete (empty list when complete)."""
        if self._key not in _COMPLETENESS:
            _COMPLETENESS[self._key] = self._completeness_problems()
        return list(_COMPLETENESS[self._key])

    def _completeness_problems(self) -> list[str]:
        problems = []
        for k, c in enumerate(self.maximal_cones):
            if self.cone_dim(c) != self.dim:
                problems.append(f"maximal cone {k} is not full dimensional")
        if problems:
            return problems
        for wall in self.walls():
            adj = self.maximal_containing(wall)
            if len(adj) != 2:
                problems.append(f"wall {sorted(wall)} lies in {len(adj)} maximal cones")
                continue
            nrm = self.wall_normal(wall)
            sides = []
            for k in adj:
                extra = [i for i in self.maximal_cones[k] if i not in wall]
                sides.append(dot(nrm, self.rays[extra[0]]))
            if sides[0] * sides[1] >= 0:
                problems.append(f"cones at wall {sorted(wall)} lie on the same side")
        for a, b in combinations(range(len(self.maximal_cones)), 2):
            ca, cb = self.cone(self.maximal_cones[a]), self.cone(self.maximal_cones[b])
            inter = intersect_cones(ca, cb)
            common = set(self.maximal_cones[a]) & set(self.maximal_cones[b])
            if set(inter.rays) != {self.rays[i] for i in common} or inter.lineality:
                problems.append(f"maximal cones {a} and {b} overlap improperly")
        return problems

    def is_complete(self) -> bool:
        if self.dim > 3:
            raise UnsupportedDimension("completeness is checked for dim <= 3 only")
        return not self.check_complete()

    def require_complete(self):
        problems = self.check_complete()
        if problems:
            raise IncompleteFan("; ".join(problems))

    def locate(self, y: Sequence) -> int:
        """Index of some maximal cone containing y."""
        for k, c in enumerate(self.maximal_cones):
            if self.cone(c).contains(y):
                return k
        raise IncompleteFan(f"{y} is not in the support of the fan")

    def __repr__(self):
        return f"Fan(rays={list(self.rays)}, maximal_cones={list(self.maximal_cones)})"


def same_fan(a: Fan, b: Fan) -> bool:
    """Equality as sets of cones in the same coordinates."""
    if a.dim != b.dim:
        return False
    ca = {frozenset(a.rays[i] for i in c) for c in a.maximal_cones}
    cb = {frozenset(b.rays[i] for i in c) for c in b.maximal_cones}
    return ca == cb


# ---------------------------------------------------------------------------
# PL functions on fans
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class PLFunction:
    """Piecewise linear function on a complete fan, one integral covector per maximal cone."""

    fan: Fan
    slopes: tuple

    def __init__(self, fan: Fan, slopes: Iterable[Sequence]):
        self.fan = fan
        self.slopes = tuple(vec(s) for s in slopes)
        if len(self.slopes) != len(fan.maximal_cones):
            raise DegenerateInput("one slope per maximal cone is required")

    def __call__(self, y: Sequence):
        k = self.fan.locate(y)
        return dot(self.slopes[k], y)

    def is_continuous(self) -> bool:
        """Linear parts agree on the shared rays of every pair of maximal cones."""
        for a, b in combinations(range(len(self.slopes)), 2):
            common = set(self.fan.maximal_cones[a]) & set(self.fan.maximal_cones[b])
            for i in common:
                r = self.fan.rays[i]
                if dot(self.slopes[a], r) != dot(self.slopes[b], r):
                    return False
        return True

    def kink(self, wall: frozenset) -> int:
        """Integral bend across a wall: (m_2 - m_1) = kink * n with n primitive, pointing into cone 2."""
        a, b = self.fan.maximal_containing(wall)
        nrm = self.fan.wall_normal(wall)
        extra_b = next(i for i in self.fan.maximal_cones[b] if i not in wall)
        if dot(nrm, self.fan.rays[extra_b]) < 0:
            nrm = neg(nrm)
        diff = sub(self.slopes[b], self.slopes[a])
        # diff must be a multiple of nrm
        idx = next(i for i, x in enumerate(nrm) if x != 0)
        kval = normalize(frac(diff[idx]) / nrm[idx])
        if vec(kval * x for x in nrm) != diff:
            raise NotConvex(f"slopes are discontinuous across wall {sorted(wall)}")
        return kval

    def is_convex(self, strict: bool = False) -> bool:
        fan = self.fan
        for k, cone in enumerate(fan.maximal_cones):
            for j, other in enumerate(fan.maximal_cones):
                if j == k:
                    continue
                for i in other:
                    r = fan.rays[i]
                    diff = dot(self.slopes[j], r) - dot(self.slopes[k], r)
                    if diff < 0:
                        return False
                    if strict and diff == 0 and i not in cone:
                        return False
        return True

    def add_linear(self, m: Sequence) -> "PLFunction":
        return PLFunction(self.fan, [vec(x + y for x, y in zip(s, m)) for s in self.slopes])


def is_strictly_convex(f: PLFunction) -> bool:
    """Strict convexity of a PL function on a complete fan."""
    problems = f.fan.check_complete()
    if problems:
        raise IncompleteFan("; ".join(problems))
    if not f.is_continuous():
        return False
    return f.is_convex(strict=True)


def support_function(p) -> PLFunction:
    """y -> -min_{x in p} <y, x> on the inner normal fan of p (intrinsic coordinates)."""
    from .polytopes import normal_fan

    if p.dim_intrinsic == 0:
        return PLFunction(Fan([], [()], dim=0), [()])
    fan, corr = normal_fan(p, with_correspondence=True)
    slopes = []
    for cone in fan.maximal_cones:
        vertex = next(f for f, c in corr.items() if len(f) == 1 and c == frozenset(cone))
        (vi,) = vertex
        slopes.append(neg(p.intrinsic_vertices[vi]))
    return PLFunction(fan, slopes)


def newton_polytope(f: PLFunction):
    """{x : <x, y> >= -f(y) for all y}: hull of the negated linear parts."""
    from .polytopes import convex_hull

    if f.fan.dim == 0:
        raise DegenerateInput("Newton polytope of a function on the zero fan")
    if not f.is_continuous() or not f.is_convex():
        raise NotConvex("Newton polytope requires a convex PL function")
    return convex_hull([neg(s) for s in f.slopes])


def cone_lattice_points(c: Cone, bound: int, use_numba: bool | None = None) -> np.ndarray:
    """Integer points of c in the box [-bound, bound]^n (brute force)."""
    n = c.dim_ambient
    ineqs = np.array(c.inequalities, dtype=np.int64).reshape(-1, n)
    return _kernels.box_points_in_cone(ineqs, [-bound] * n, [bound] * n, use_numba=use_numba)
