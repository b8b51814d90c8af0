"""Built-in examples: tori, cycles of rational curves, the quartic K3 and friends."""
from __future__ import annotations

from itertools import product
from typing import Sequence

from .affine_complex import AffineComplex, ComplexSpec, FanStructure, Identification, build_complex, embedded_fan_structures
from .degeneration import Component, DegenerationSpec, ZeroStratum, dual_intersection_complex, polarization_to_mpl
from .errors import SpecError, UnknownFixture
from .fans import Fan
from .mpl import DegenerationTriple, mpl_from_kinks
from .polytopes import convex_hull


# ----------------------------------------------------------------------
# tori
# ----------------------------------------------------------------------

def torus_spec(n: int = 2, segments: Sequence[Sequence[int]] | None = None) -> ComplexSpec:
    """R^n modulo its period lattice, cut into boxes; ``segments[k]`` are the box sides along axis k."""
    if not 1 <= n <= 3:
        raise SpecError("tori are built in dimensions 1 to 3")
    segments = [list(s) for s in (segments or [[1]] * n)]
    if len(segments) != n or any(not s or min(s) <= 0 for s in segments):
        raise SpecError("one non-empty list of positive lengths per axis is required")
    starts = [[sum(s[:j]) for j in range(len(s))] for s in segments]
    grid = list(product(*(range(len(s)) for s in segments)))
    index = {g: k for k, g in enumerate(grid)}
    cells, ids = [], []
    corners = list(product((0, 1), repeat=n))
    for g in grid:
        lo = [starts[a][g[a]] for a in range(n)]
        pts = [tuple(lo[a] + e[a] * segments[a][g[a]] for a in range(n)) for e in corners]
        cells.append(convex_hull(pts))
        ids.append("x" + "_".join(map(str, g)) if len(grid) > 1 else "s0")
    idents = []
    for g in grid:
        c = index[g]
        for a in range(n):
            h = list(g)
            h[a] = (h[a] + 1) % len(segments[a])
            d = index[tuple(h)]
            top = [e for e in corners if e[a] == 1]
            bottom = [tuple(0 if t == a else e[t] for t in range(n)) for e in top]
            fa = tuple(cells[c].vertex_index(_corner_point(cells[c], e)) for e in top)
            fb = tuple(cells[d].vertex_index(_corner_point(cells[d], e)) for e in bottom)
            idents.append(Identification(c, fa, d, fb))
    return ComplexSpec(cells, idents, cell_ids=ids)


def _corner_point(cell, e):
    lo = [min(v[a] for v in cell.vertices) for a in range(len(e))]
    hi = [max(v[a] for v in cell.vertices) for a in range(len(e))]
    return tuple(hi[a] if e[a] else lo[a] for a in range(len(e)))


def torus_complex(n: int = 2, segments=None) -> AffineComplex:
    spec = torus_spec(n, segments)
    return build_complex(spec, embedded_fan_structures(spec))


def torus_triple(n: int = 2, segments=None, kinks=1) -> DegenerationTriple:
    """Torus with the MPL function of constant (or per-face) kink."""
    b = torus_complex(n, segments)
    if isinstance(kinks, int):
        kinks = {fc.id: kinks for fc in b.classes_of_dim(n - 1)}
    return DegenerationTriple(b, mpl_from_kinks(b, kinks))


def skew_torus3() -> AffineComplex:
    """Unit cube 3-torus whose vertex fan uses (-1, 1, 0) and (1, 0, -1) in place of -e1, -e3.

    The fan stays complete, the monodromy is non-trivial, and the toric
    condition fails along one edge.
    """
    spec = torus_spec(3)
    (fs,) = embedded_fan_structures(spec)
    swap = {(-1, 0, 0): (-1, 1, 0), (0, 0, -1): (1, 0, -1)}
    rays = [swap.get(r, r) for r in fs.fan.rays]
    fan = Fan(rays, fs.fan.maximal_cones, dim=3)
    return build_complex(spec, [FanStructure(fs.vertex, fan, fs.edge_rays)])


def abelian_spec(size: Sequence[int] = (2, 2)) -> DegenerationSpec:
    """Degeneration of an abelian surface to a grid of P^1 x P^1 on R^2 / (a Z + b Z)."""
    a, b = size
    if a < 2 or b < 2:
        raise SpecError("each grid side needs at least 2 squares so that components are normal")

    def v(i, j):
        return f"v{i % a}_{j % b}"

    def x(i, j):
        return f"x{i % a}_{j % b}"

    def hor(i, j):
        return f"h{i % a}_{j % b}"

    def ver(i, j):
        return f"u{i % a}_{j % b}"

    strata = []
    for i, j in product(range(a), range(b)):
        rays = [(1, 0, 0), (1, 1, 0), (1, 0, 1), (1, 1, 1)]
        comps = [v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1)]
        labels = {
            frozenset((0, 1)): hor(i, j),
            frozenset((2, 3)): hor(i, j + 1),
            frozenset((0, 2)): ver(i, j),
            frozenset((1, 3)): ver(i + 1, j),
        }
        strata.append(ZeroStratum(x(i, j), rays, (1, 0, 0), comps, labels))
    comps = []
    for i, j in product(range(a), range(b)):
        rays = [(1, 0), (0, 1), (-1, 0), (0, -1)]
        labels = [hor(i, j), ver(i, j), hor(i - 1, j), ver(i, j - 1)]
        cones = [((0, 1), x(i, j)), ((1, 2), x(i - 1, j)), ((2, 3), x(i - 1, j - 1)), ((3, 0), x(i, j - 1))]
        comps.append(Component(v(i, j), rays, labels, cones))
    return DegenerationSpec(strata, comps, name="abelian")


def abelian_polarization(d: DegenerationSpec, degrees: Sequence[int] = (1, 1)) -> dict:
    """Product polarization: every component gets the rectangle [0, d1] x [0, d2]."""
    d1, d2 = degrees
    corner = {(0, 1): (0, 0), (1, 2): (d1, 0), (2, 3): (d1, d2), (3, 0): (0, d2)}
    return {c.id: {xid: corner[tuple(rs)] for rs, xid in c.cones} for c in d.components}


# ----------------------------------------------------------------------
# cycles of rational curves
# ----------------------------------------------------------------------

def cycle_complex(lengths: Sequence[int]) -> AffineComplex:
    """R / mZ cut into segments of the given lattice lengths (any number of segments)."""
    lengths = list(lengths)
    if not lengths or min(lengths) <= 0:
        raise SpecError("segment lengths must be positive")
    p = len(lengths)
    cells = [convex_hull([(0,), (m,)]) for m in lengths]
    idents = []
    for i in range(p):
        j = (i + 1) % p
        idents.append(Identification(i, (cells[i].vertex_index((lengths[i],)),), j, (cells[j].vertex_index((0,)),)))
    labels = []
    for i in range(p):
        lab = {(0,): f"v{i}", (lengths[i],): f"v{(i + 1) % p}"}
        labels.append([lab[tuple(vv)] for vv in cells[i].vertices])
    spec = ComplexSpec(cells, idents, cell_ids=[f"x{i}" for i in range(p)], vertex_labels=labels)
    return build_complex(spec, embedded_fan_structures(spec))


def cycle_triple(lengths: Sequence[int], degrees: Sequence[int]) -> DegenerationTriple:
    """Cycle with kink ``degrees[i]`` at vertex ``v{i}``."""
    b = cycle_complex(lengths)
    if len(degrees) != len(lengths):
        raise SpecError("one degree per component is required")
    kinks = {f"v{i}": n for i, n in enumerate(degrees)}
    return DegenerationTriple(b, mpl_from_kinks(b, kinks))


def im_cycle(*lengths: int) -> DegenerationSpec:
    """Cycle of p >= 2 rational curves, the i-th node an A_{m_i - 1} point."""
    if len(lengths) == 1 and isinstance(lengths[0], (list, tuple)):
        lengths = tuple(lengths[0])
    p = len(lengths)
    if p < 2:
        raise SpecError("a single component would meet itself; use cycle_complex for p = 1")
    if min(lengths) <= 0:
        raise SpecError("segment lengths must be positive")
    strata = [
        ZeroStratum(f"x{i}", [(1, 0), (1, m)], (1, 0), [f"v{i}", f"v{(i + 1) % p}"])
        for i, m in enumerate(lengths)
    ]
    comps = [
        Component(f"v{i}", [(-1,), (1,)], [f"x{(i - 1) % p}", f"x{i}"], [((0,), f"x{(i - 1) % p}"), ((1,), f"x{i}")])
        for i in range(p)
    ]
    return DegenerationSpec(strata, comps, name="im_cycle")


def im_polarization(d: DegenerationSpec, degrees: Sequence[int]) -> dict:
    """Degree n_i on component v_i: Newton polytope [-n_i, 0]."""
    p = len(d.components)
    if len(degrees) != p:
        raise SpecError("one degree per component is required")
    return {f"v{i}": {f"x{(i - 1) % p}": (0,), f"x{i}": (-n,)} for i, n in enumerate(degrees)}


def im_polarized(lengths: Sequence[int], degrees: Sequence[int]) -> DegenerationTriple:
    d = im_cycle(*lengths)
    b = dual_intersection_complex(d)
    return DegenerationTriple(b, polarization_to_mpl(b, im_polarization(d, degrees)))


# ----------------------------------------------------------------------
# quartic K3 and normal crossing points
# ----------------------------------------------------------------------

K3_STRATA = {"s0": (0, 2, 3), "s1": (1, 2, 3), "s2": (0, 1, 2), "s3": (0, 1, 3)}


def _pair(i: int, j: int) -> str:
    return "+".join(sorted((f"v{i}", f"v{j}")))


def k3_spec() -> DegenerationSpec:
    """Four planes meeting like the faces of a tetrahedron; every triple point normal crossing."""
    strata = [
        ZeroStratum(x, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], (1, 1, 1), [f"v{i}" for i in t])
        for x, t in K3_STRATA.items()
    ]
    stratum_of = {frozenset(t): x for x, t in K3_STRATA.items()}
    comps = []
    for i in range(4):
        others = [j for j in range(4) if j != i]
        rays = [(1, 0), (0, 1), (-1, -1)]
        cones = [((a, b), stratum_of[frozenset((i, others[a], others[b]))]) for a, b in ((0, 1), (1, 2), (0, 2))]
        comps.append(Component(f"v{i}", rays, [_pair(i, j) for j in others], cones))
    return DegenerationSpec(strata, comps, name="k3_tetrahedron")


def k3_polarization(d: DegenerationSpec, degree: int = 1) -> dict:
    """O(degree) on every plane: the triangle conv(0, d e1, d e2)."""
    vertex = {(0, 1): (0, 0), (1, 2): (degree, 0), (0, 2): (0, degree)}
    return {c.id: {xid: vertex[tuple(rs)] for rs, xid in c.cones} for c in d.components}


def k3_tetrahedron() -> AffineComplex:
    return dual_intersection_complex(k3_spec())


def k3_triple(degree: int = 1) -> DegenerationTriple:
    d = k3_spec()
    b = dual_intersection_complex(d)
    return DegenerationTriple(b, polarization_to_mpl(b, k3_polarization(d, degree)))


def nc_point(n: int = 2) -> DegenerationSpec:
    """Normal crossing point: n + 1 coordinate hyperplanes of C^{n+1}."""
    if not 1 <= n <= 3:
        raise SpecError("normal crossing points are built for n = 1, 2, 3")
    rays = [tuple(int(i == j) for j in range(n + 1)) for i in range(n + 1)]
    names = [f"c{i}" for i in range(n + 1)]
    strata = [ZeroStratum("x", rays, (1,) * (n + 1), names)]
    comps = []
    for i in range(n + 1):
        others = [j for j in range(n + 1) if j != i]
        crays = [tuple(int(a == b) for b in range(n)) for a in range(n)]
        labels = ["+".join(sorted((names[i], names[j]))) for j in others]
        if n == 1:
            labels = ["x"]
        comps.append(Component(names[i], crays, labels, [(tuple(range(n)), "x")]))
    return DegenerationSpec(strata, comps, name="nc_point")


def segment_spec(n: int) -> DegenerationSpec:
    """Contracted chain: one node of type xy = t^n, an interval of length n with open ends."""
    strata = [ZeroStratum("x", [(1, 0), (1, n)], (1, 0), ["a", "b"])]
    comps = [Component("a", [(1,)], ["x"], [((0,), "x")]), Component("b", [(1,)], ["x"], [((0,), "x")])]
    return DegenerationSpec(strata, comps, name="segment")


# ----------------------------------------------------------------------
# registry
# ----------------------------------------------------------------------

def _as_ints(v) -> list[int]:
    if isinstance(v, str):
        return [int(t) for t in v.replace(";", ",").split(",") if t.strip()]
    if isinstance(v, int):
        return [v]
    return [int(t) for t in v]


def _torus(n=2, lattice=None, segments=None, kinks=1):
    n = int(n)
    if segments is None and lattice is not None:
        segments = [[int(t)] for t in _as_ints(lattice)]
    return torus_triple(n, segments, int(kinks))


CORPUS = {
    "torus": _torus,
    "torus_spec": lambda size=(2, 2): abelian_spec(tuple(_as_ints(size))),
    "im_cycle": lambda lengths=(1, 1, 1): im_cycle(*_as_ints(lengths)),
    "im_polarized": lambda lengths=(1, 1, 1), degrees=None: im_polarized(
        _as_ints(lengths), _as_ints(degrees) if degrees is not None else [1] * len(_as_ints(lengths))
    ),
    "cycle": lambda lengths=(1,), degrees=None: cycle_triple(
        _as_ints(lengths), _as_ints(degrees) if degrees is not None else [1] * len(_as_ints(lengths))
    ),
    "k3_tetrahedron": lambda degree=None: k3_spec() if degree is None else k3_triple(int(degree)),
    "nc_point": lambda n=2: nc_point(int(n)),
    "segment": lambda n=1: segment_spec(int(n)),
    "skew_torus3": skew_torus3,
}


def example_corpus(name: str, **params):
    """Look up a named example; parameters are passed to its generator."""
    if name not in CORPUS:
        raise UnknownFixture(f"unknown example {name!r}; known: {', '.join(sorted(CORPUS))}")
    try:
        return CORPUS[name](**params)
    except TypeError as exc:
        raise SpecError(f"bad parameters for {name}: {exc}") from None


def polarization_for(d: DegenerationSpec, **params) -> dict:
    """Default polarization of a corpus spec."""
    if d.name == "k3_tetrahedron":
        return k3_polarization(d, int(params.get("degree", 1)))
    if d.name == "im_cycle":
        degrees = params.get("degrees")
        return im_polarization(d, _as_ints(degrees) if degrees is not None else [1] * len(d.components))
    if d.name == "abelian":
        return abelian_polarization(d, tuple(_as_ints(params.get("degrees", (1, 1)))))
    raise SpecError(f"no default polarization for {d.name or 'this spec'}")


__all__ = [
    "CORPUS",
    "abelian_polarization",
    "abelian_spec",
    "cycle_complex",
    "cycle_triple",
    "example_corpus",
    "im_cycle",
    "im_polarization",
    "im_polarized",
    "k3_polarization",
    "k3_spec",
    "k3_tetrahedron",
    "k3_triple",
    "nc_point",
    "polarization_for",
    "segment_spec",
    "skew_torus3",
    "torus_complex",
    "torus_spec",
    "torus_triple",
]
