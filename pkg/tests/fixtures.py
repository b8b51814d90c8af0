"""Seeded random strictly convex triples over torus and cycle topologies."""
import random

from tordeg import corpus
from tordeg.mpl import DegenerationTriple, mpl_from_kinks


def _wall_line(b, fc):
    """(axis, coordinate) of the grid hyperplane containing a codimension one face."""
    c, face = fc.rep
    pts = [b.cells[c].vertices[i] for i in face]
    axis = next(a for a in range(b.dim) if len({p[a] for p in pts}) == 1)
    return axis, pts[0][axis]


def random_torus_triple(rng: random.Random, dim=None):
    n = dim or rng.choice((2, 2, 3))
    parts = 2 if n == 2 else 1
    segments = [[rng.randint(1, 3) for _ in range(rng.randint(1, parts))] for _ in range(n)]
    b = corpus.torus_complex(n, segments)
    period = [sum(s) for s in segments]
    line_kink = {}
    kinks = {}
    for fc in b.classes_of_dim(n - 1):
        axis, x = _wall_line(b, fc)
        key = (axis, x % period[axis])
        kinks[fc.id] = line_kink.setdefault(key, rng.randint(1, 3))
    return DegenerationTriple(b, mpl_from_kinks(b, kinks))


def random_cycle_triple(rng: random.Random):
    p = rng.randint(1, 4)
    return corpus.cycle_triple([rng.randint(1, 5) for _ in range(p)], [rng.randint(1, 5) for _ in range(p)])


def random_triples(count: int, seed: int = 2024):
    rng = random.Random(seed)
    return [random_torus_triple(rng) if k % 2 == 0 else random_cycle_triple(rng) for k in range(count)]


def random_loop(b, rng: random.Random, length: int, start=None):
    """A random path word of explicit corner steps; closed up by walking back if needed."""
    from tordeg.affine_complex import Step

    v = start or rng.choice(b.vertex_ids)
    steps = []
    cur = v
    for _ in range(length):
        c, i = rng.choice(b.corners_at(cur))
        j = rng.randrange(b.cells[c].n_vertices)
        steps.append(Step(c, i, j))
        cur = b.corner_vertex[(c, j)]
    if cur != v:
        c, i = next(((c, i) for c, i in b.corners_at(cur) if b.corners_of(c, v)), (None, None))
        if c is None:
            back = [Step(s.cell, s.leave, s.enter) for s in reversed(steps)]
            return v, steps + back
        steps.append(Step(c, i, b.corners_of(c, v)[0]))
    return v, steps
