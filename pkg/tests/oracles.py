"""Brute-force reference implementations used only by the tests.

Nothing here imports the library; everything is plain enumeration over
integers and fractions.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product


def _det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return d


def _rank(rows):
    rows = [[Fraction(x) for x in r] for r in rows]
    if not rows:
        return 0
    rank, ncols = 0, len(rows[0])
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def affine_dim(points):
    points = list(points)
    if not points:
        return -1
    p0 = points[0]
    return _rank([[a - b for a, b in zip(p, p0)] for p in points[1:]])


def _normal_through(points):
    """Normal of the hyperplane through d affinely independent points in R^d (cofactor expansion)."""
    d = len(points[0])
    diffs = [[a - b for a, b in zip(p, points[0])] for p in points[1:]]
    normal = []
    for i in range(d):
        minor = [[row[j] for j in range(d) if j != i] for row in diffs]
        normal.append(((-1) ** i) * _det(minor) if minor else Fraction(1))
    return normal


def brute_facets(points):
    """Facets of conv(points) (full dimensional) as (inner normal, offset, frozenset of points on it)."""
    points = sorted(set(map(tuple, points)))
    d = len(points[0])
    seen = {}
    for sub in combinations(points, d):
        nrm = _normal_through(sub)
        if all(x == 0 for x in nrm):
            continue
        off = sum(a * b for a, b in zip(nrm, sub[0]))
        vals = [sum(a * b for a, b in zip(nrm, p)) - off for p in points]
        if all(v >= 0 for v in vals):
            pass
        elif all(v <= 0 for v in vals):
            nrm = [-x for x in nrm]
            off = -off
        else:
            continue
        on = frozenset(p for p in points if sum(a * b for a, b in zip(nrm, p)) == off)
        if affine_dim(on) != d - 1:
            continue
        seen[on] = (_primitive(nrm), on)
    out = []
    for on, (nrm, _) in seen.items():
        off = sum(a * b for a, b in zip(nrm, next(iter(on))))
        out.append((tuple(nrm), off, on))
    return out


def _primitive(v):
    from math import gcd

    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return [x // g for x in ints] if g else ints


def brute_faces(points):
    """All non-empty faces as frozensets of vertex coordinates, via intersections of facets."""
    facets = brute_facets(points)
    allpts = frozenset(map(tuple, points))
    faces = {allpts}
    frontier = {f for _, _, f in facets}
    while frontier:
        faces |= frontier
        nxt = set()
        for a in frontier:
            for _, _, f in facets:
                inter = a & f
                if inter and inter not in faces:
                    nxt.add(inter)
        frontier = nxt
    verts = {next(iter(f)) for f in faces if affine_dim(f) == 0}
    return {frozenset(p for p in f if p in verts) for f in faces}, verts


def brute_vertices(points):
    return brute_faces(points)[1]


def brute_support(points, y):
    """-min <y, x> over the points."""
    return -min(sum(a * b for a, b in zip(y, p)) for p in points)


def brute_minimizers(points, y):
    vals = {p: sum(a * b for a, b in zip(y, p)) for p in points}
    m = min(vals.values())
    return {p for p, v in vals.items() if v == m}


def cone_points(ineqs, bound, d):
    """Integer points x in [-bound, bound]^d with <a, x> >= 0 for all a in ineqs."""
    out = []
    for x in product(range(-bound, bound + 1), repeat=d):
        if all(sum(a * b for a, b in zip(row, x)) >= 0 for row in ineqs):
            out.append(x)
    return out


def brute_hilbert_basis(ineqs, bound, d):
    """Irreducible non-zero lattice points of the cone inside the box."""
    pts = [p for p in cone_points(ineqs, bound, d) if any(p)]
    pset = set(pts)
    out = []
    for p in pts:
        reducible = False
        for q in pts:
            r = tuple(a - b for a, b in zip(p, q))
            if any(r) and r in pset:
                reducible = True
                break
        if not reducible:
            out.append(p)
    return sorted(out)


def in_cone(gens, x):
    """Whether x is a non-negative combination of gens (Caratheodory: try independent subsets)."""
    gens = [tuple(g) for g in gens]
    if not any(x):
        return True
    for k in range(1, min(len(x), len(gens)) + 1):
        for sub in combinations(gens, k):
            if _rank(sub) < k:
                continue
            coeffs = _solve_columns(sub, x)
            if coeffs is not None and all(c >= 0 for c in coeffs):
                return True
    return False


def _solve_columns(cols, x):
    """Solve sum c_i cols_i = x exactly; None if inconsistent."""
    k = len(cols)
    d = len(x)
    rows = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(x[i])] for i in range(d)]
    r = 0
    piv_cols = []
    for c in range(k):
        piv = next((i for i in range(r, d) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(d):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][k] != 0 for i in range(r, d)):
        return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][k] / rows[i][c]
    return sol


def cone_inequalities(gens):
    """Inner facet normals of a full dimensional cone in R^2 or R^3 spanned by gens."""
    gens = [tuple(g) for g in gens]
    d = len(gens[0])
    out = set()
    for sub in combinations(gens, d - 1):
        nrm = _normal_through([(0,) * d] + list(sub))
        if all(x == 0 for x in nrm):
            continue
        vals = [sum(a * b for a, b in zip(nrm, g)) for g in gens]
        if all(v >= 0 for v in vals):
            out.add(tuple(_primitive(nrm)))
        elif all(v <= 0 for v in vals):
            out.add(tuple(-x for x in _primitive(nrm)))
    return sorted(out)


def generated_by(gens, ineqs, p, _memo=None):
    """Whether the lattice point p of the cone is a non-negative integer combination of gens.

    Every step subtracts a generator and stays in the cone, so a positive
    functional strictly decreases and the recursion terminates.
    """
    memo = {} if _memo is None else _memo
    p = tuple(p)
    if not any(p):
        return True
    if p in memo:
        return memo[p]
    ok = False
    for g in gens:
        q = tuple(a - b for a, b in zip(p, g))
        if all(sum(a * b for a, b in zip(row, q)) >= 0 for row in ineqs) and generated_by(gens, ineqs, q, memo):
            ok = True
            break
    memo[p] = ok
    return ok
