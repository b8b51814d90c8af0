"""Comparisons between library results and the brute-force oracles."""
from itertools import product

import oracles
from tordeg.fans import newton_polytope, support_function
from tordeg.polytopes import convex_hull, face_lattice, normal_fan


def face_lattice_problems(pts):
    p = convex_hull(pts)
    fl = face_lattice(p)
    ours = {frozenset(p.vertices[i] for i in f) for f in fl.faces if f}
    theirs, verts = oracles.brute_faces(pts)
    out = []
    if set(p.vertices) != verts:
        out.append("vertices")
    if ours != theirs:
        out.append("faces")
    for f in fl.faces:
        if f and fl.dims[f] != oracles.affine_dim([p.vertices[i] for i in f]):
            out.append(f"dim of {sorted(f)}")
    return out


def normal_fan_problems(pts):
    p = convex_hull(pts)
    fan = normal_fan(p)
    facets = oracles.brute_facets(pts)
    out = []
    if set(fan.rays) != {nrm for nrm, _, _ in facets}:
        out.append("rays")
    for i, v in enumerate(p.vertices):
        expected = {nrm for nrm, _, on in facets if v in on}
        if {fan.rays[r] for r in fan.maximal_cones[i]} != expected:
            out.append(f"cone at {v}")
    return out


def newton_problems(pts, box=3):
    p = convex_hull(pts)
    f = support_function(p)
    out = []
    if set(newton_polytope(f).vertices) != oracles.brute_vertices(pts):
        out.append("newton vertices")
    d = len(pts[0])
    for y in product(range(-box, box + 1), repeat=d):
        if f(y) != oracles.brute_support(pts, y):
            out.append(f"support at {y}")
            break
    return out


def all_problems(pts):
    return face_lattice_problems(pts) + normal_fan_problems(pts) + newton_problems(pts)
