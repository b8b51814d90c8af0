"""Developing maps, holonomy representations and monodromy of the torus fibration.

Loops are path words at a vertex.  Developing a point along a path continues
the chart of the first vertex; along a loop ``g`` this applies the holonomy
``rho(g)``.  Holonomy is a homomorphism: following ``g1`` then ``g2`` gives
``rho(g1) o rho(g2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .affine_complex import AffineComplex, Step
from .errors import NotALoop, SpecError
from .exact import (
    AffineMap,
    affine_compose,
    affine_invert_rational,
    conjugator,
    inverse,
    inverse_transpose,
    is_integral,
    mat_mul,
    sub,
    vec,
)
from .mpl import LegendreResult


def develop_along(b: AffineComplex, path, seed: Sequence | None = None) -> tuple:
    """Continue the developing map along ``path`` starting from ``seed`` in the chart of its first vertex."""
    start, steps = _steps(b, path)
    seed = vec(seed) if seed is not None else (0,) * b.dim
    if len(seed) != b.dim:
        raise SpecError(f"seed must have {b.dim} coordinates")
    if not steps:
        return seed
    return affine_invert_rational(b.path_map(steps))(seed)


def _steps(b: AffineComplex, path):
    if isinstance(path, str) or (isinstance(path, (list, tuple)) and path and isinstance(path[0], str)):
        verts, steps = b.parse_path(path)
        return verts[0], steps
    steps = list(path)
    if not steps:
        return None, []
    return b.corner_vertex[(steps[0].cell, steps[0].enter)], steps


@dataclass
class HolonomyRepresentation:
    basepoint: str
    generators: list
    images: list

    def image_of_word(self, word: Sequence[int]) -> AffineMap:
        """Holonomy of a product of generators (1-based); ``-k`` is the inverse of generator ``k``."""
        n = self.images[0].dim if self.images else 0
        out = AffineMap.identity(n)
        for k in word:
            g = self.images[abs(k) - 1]
            out = affine_compose(out, g if k > 0 else affine_invert_rational(g))
        return out

    def check_relator(self, word: Sequence[int]) -> bool:
        return self.image_of_word(word).is_identity()


def holonomy_representation(b: AffineComplex, generators: Sequence) -> HolonomyRepresentation:
    base = None
    images = []
    for g in generators:
        start, steps = _steps(b, g)
        if not steps:
            raise NotALoop("empty generator")
        if base is None:
            base = start
        elif start != base:
            raise NotALoop(f"generator starts at {start}, expected {base}")
        images.append(b.holonomy(g))
    return HolonomyRepresentation(base, list(generators), images)


@dataclass
class FamilyMonodromy:
    matrix: tuple
    scale: int = 1  # translation multiplied by this to clear denominators

    @property
    def linear(self) -> tuple:
        n = len(self.matrix) - 1
        return tuple(row[:n] for row in self.matrix[:n])

    def is_unipotent(self) -> bool:
        n = len(self.matrix)
        a = tuple(tuple(self.matrix[i][j] - int(i == j) for j in range(n)) for i in range(n))
        p = a
        for _ in range(n - 1):
            p = mat_mul(p, a)
        return all(x == 0 for row in p for x in row)

    def __matmul__(self, other: "FamilyMonodromy") -> "FamilyMonodromy":
        return FamilyMonodromy(mat_mul(self.matrix, other.matrix), self.scale)


def family_monodromy(h: AffineMap, allow_scaling: bool = False) -> FamilyMonodromy:
    """The (n+1)x(n+1) matrix [[A, b], [0, 1]] of the affine map on B x R."""
    t = h.translation
    scale = 1
    if not is_integral(t):
        if not allow_scaling:
            raise SpecError("translation is not integral; pass allow_scaling to clear denominators")
        scale = lcm(*(Fraction(x).denominator for x in t))
        t = tuple(int(x * scale) for x in t)
    n = h.dim
    rows = [tuple(h.linear[i]) + (t[i],) for i in range(n)]
    rows.append((0,) * n + (1,))
    return FamilyMonodromy(tuple(rows), scale)


def holonomy_duality_check(
    b: AffineComplex,
    dual: LegendreResult,
    loops: Sequence,
    dual_loops: Sequence | None = None,
) -> list[dict]:
    """Compare holonomy of each loop with that of its dual loop.

    With ``L`` the wedge map of the first corner, the natural identification
    predicts ``D == (L^-1 M L)^-T``; the report also records a conjugator of
    ``D`` and ``M^-T`` in GL(Z).
    """
    bd = dual.triple.b
    out = []
    for t, loop in enumerate(loops):
        _, steps = _steps(b, loop)
        if not steps:
            raise NotALoop("empty loop")
        hol = b.holonomy(steps)
        m = hol.linear
        expected = dual.dual_loop(b, steps)
        if dual_loops is not None:
            _, given = _steps(bd, dual_loops[t])
            if [s.cell for s in given] != [s.cell for s in expected]:
                raise SpecError(f"loop {t} and its proposed dual do not correspond")
            dsteps = given
        else:
            dsteps = expected
        dual_hol = bd.holonomy(dsteps)
        d = dual_hol.linear
        lw = b.wedge[(steps[0].cell, steps[0].enter)]
        natural = inverse_transpose(mat_mul(mat_mul(inverse(lw), m), lw))
        x = conjugator(d, inverse_transpose(m))
        out.append({
            "loop": b.format_path(b.corner_vertex[(steps[0].cell, steps[0].enter)], steps),
            "dual_loop": bd.format_path(bd.corner_vertex[(dsteps[0].cell, dsteps[0].enter)], dsteps),
            "linear": m,
            "dual_linear": d,
            "translation": hol.translation,
            "dual_translation": dual_hol.translation,
            "natural_ok": d == natural,
            "conjugate_ok": x is not None,
            "conjugator": x,
            "ok": d == natural and x is not None,
        })
    return out


def standard_generators(b: AffineComplex, name: str) -> list[str]:
    """Known loop generators of corpus complexes."""
    if name == "torus":
        # boxes whose lowest corner sits on a coordinate axis, walked from corner to far corner
        lows = [min(c.vertices) for c in b.cells]
        gens = []
        for axis in range(b.dim):
            row = sorted(
                (k for k, lo in enumerate(lows) if all(x == 0 for a, x in enumerate(lo) if a != axis)),
                key=lambda k: lows[k][axis],
            )
            steps = []
            for k in row:
                cell = b.cells[k]
                origin = cell.vertex_index(lows[k])
                far = max(
                    (i for i in range(cell.n_vertices)
                     if all(d == 0 for a, d in enumerate(sub(cell.vertices[i], lows[k])) if a != axis)),
                    key=lambda i: cell.vertices[i][axis],
                )
                steps.append(Step(k, origin, far))
            gens.append(b.format_path(b.corner_vertex[(row[0], steps[0].enter)], steps))
        return gens
    if name == "cycle":
        p = len(b.cells)
        words = []
        for i in range(p):
            cell = b.cells[i]
            lo = min(range(2), key=lambda k: cell.vertices[k])
            words.append((i, lo, 1 - lo))
        start = b.corner_vertex[(words[0][0], words[0][1])]
        return [b.format_path(start, [Step(*w) for w in words])]
    if name == "k3":
        return ["v2,s1,v1,s2,v2"]
    raise SpecError(f"no known generators for {name!r}")


__all__ = [
    "FamilyMonodromy",
    "HolonomyRepresentation",
    "develop_along",
    "family_monodromy",
    "holonomy_duality_check",
    "holonomy_representation",
    "standard_generators",
]
