"""Exact integer / rational linear algebra and the group of integral affine maps.

Vectors are tuples whose entries are ``int`` or ``fractions.Fraction``; matrices
are tuples of row tuples.  Nothing here touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Iterable, Sequence

from .errors import DegenerateInput, DimensionMismatch, NotInvertibleOverZ

Vector = tuple
Matrix = tuple


def frac(x) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def normalize(x):
    """Return an ``int`` when the rational is integral, else the Fraction."""
    x = frac(x)
    return x.numerator if x.denominator == 1 else x


def vec(xs: Iterable) -> Vector:
    return tuple(normalize(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vec(r) for r in rows)


def is_integral(v) -> bool:
    if isinstance(v, (tuple, list)):
        return all(is_integral(x) for x in v)
    return frac(v).denominator == 1


def to_int_vector(v: Sequence) -> tuple[int, ...]:
    if not is_integral(v):
        raise DegenerateInput(f"vector {v} is not integral")
    return tuple(int(frac(x)) for x in v)


def dot(a: Sequence, b: Sequence):
    if len(a) != len(b):
        raise DimensionMismatch(f"dot of lengths {len(a)} and {len(b)}")
    if all(type(x) is int for x in a) and all(type(y) is int for y in b):
        return sum(x * y for x, y in zip(a, b))
    return normalize(sum((frac(x) * y for x, y in zip(a, b)), Fraction(0)))


def add(a: Sequence, b: Sequence) -> Vector:
    if len(a) != len(b):
        raise DimensionMismatch("vector lengths differ")
    return vec(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> Vector:
    if len(a) != len(b):
        raise DimensionMismatch("vector lengths differ")
    return vec(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> Vector:
    return vec(frac(c) * x for x in a)


def neg(a: Sequence) -> Vector:
    return vec(-x for x in a)


def zero(n: int) -> Vector:
    return (0,) * n


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: Sequence[Sequence]) -> Matrix:
    return tuple(zip(*m)) if m else ()


def mat_vec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    if a and len(a[0]) != len(b):
        raise DimensionMismatch("matrix shapes do not compose")
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def _row_echelon(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rref, pivot columns)."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    rows = [[frac(x) for x in r] for r in rows]
    if not rows or not rows[0]:
        return 0
    return len(_row_echelon(rows)[1])


def nullspace(rows: Sequence[Sequence], n: int | None = None) -> list[Vector]:
    """Rational basis of {x : rows . x = 0}, scaled to primitive integer vectors."""
    rows = [[frac(x) for x in r] for r in rows]
    if n is None:
        n = len(rows[0])
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    rref, pivots = _row_echelon(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -rref[i][f]
        basis.append(clear_denominators(x))
    return basis


def clear_denominators(v: Sequence) -> tuple[int, ...]:
    """Smallest positive integer multiple of ``v`` that is a primitive lattice vector."""
    fs = [frac(x) for x in v]
    lcm = 1
    for x in fs:
        lcm = lcm * x.denominator // gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in fs]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def solve(a: Sequence[Sequence], b: Sequence) -> Vector | None:
    """Return one exact solution of ``a x = b`` or None when inconsistent."""
    n = len(a[0])
    aug = [[frac(x) for x in row] + [frac(bi)] for row, bi in zip(a, b)]
    rref, pivots = _row_echelon(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, pc in enumerate(pivots):
        x[pc] = rref[i][n]
    return vec(x)


def det(m: Sequence[Sequence]):
    n = len(m)
    if any(len(r) != n for r in m):
        raise DimensionMismatch("determinant of non-square matrix")
    a = [[frac(x) for x in r] for r in m]
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return normalize(d)


def inverse(m: Sequence[Sequence]) -> Matrix:
    """Inverse over Q."""
    n = len(m)
    aug = [[frac(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    rref, pivots = _row_echelon(aug)
    if pivots[:n] != list(range(n)):
        raise DegenerateInput("singular matrix")
    return mat(row[n:] for row in rref)


def is_unimodular(m: Sequence[Sequence]) -> bool:
    return is_integral(m) and det(m) in (1, -1)


def primitive_vector(v: Sequence) -> tuple[int, ...]:
    v = to_int_vector(v)
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        raise DegenerateInput("primitive_vector of the zero vector")
    return tuple(x // g for x in v)


def lattice_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def integer_row_reduce(columns: Sequence[Sequence[int]], n: int) -> tuple[list[list[int]], int]:
    """Find unimodular W with W @ D upper-echelon, D having ``columns`` as columns.

    Returns ``(W, k)`` with k = rank(D).  Rows k.. of W annihilate every column;
    the first k columns of W^{-1} are a basis of the saturated lattice
    span(D) ∩ Z^n.
    """
    d = [[int(col[i]) for col in columns] for i in range(n)]
    w = [[int(i == j) for j in range(n)] for i in range(n)]
    m = len(columns)
    r = 0
    for c in range(m):
        if r == n:
            break
        while True:
            nz = [i for i in range(r, n) if d[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(d[i][c]))
            d[r], d[piv] = d[piv], d[r]
            w[r], w[piv] = w[piv], w[r]
            done = True
            for i in range(r + 1, n):
                if d[i][c]:
                    q = d[i][c] // d[r][c]
                    d[i] = [x - q * y for x, y in zip(d[i], d[r])]
                    w[i] = [x - q * y for x, y in zip(w[i], w[r])]
                    if d[i][c]:
                        done = False
            if done:
                break
        if any(d[i][c] for i in range(r, n)):
            r += 1
    return w, r


def saturated_basis(vectors: Sequence[Sequence[int]], n: int) -> tuple[Matrix, Matrix, int]:
    """Unimodular change of basis adapted to the saturation of span(vectors).

    Returns ``(W, U, k)`` with ``U = W^{-1}``: the first k columns of U span
    span(vectors) ∩ Z^n, and the last n-k rows of W cut out that span.
    """
    w, k = integer_row_reduce(vectors, n)
    wm = mat(w)
    return wm, inverse(wm), k


def unimodular_completion(u: Sequence[int]) -> Matrix:
    """A matrix in GL_n(Z) whose first column is the primitive vector u."""
    u = to_int_vector(u)
    if lattice_gcd(u) != 1:
        raise DegenerateInput("vector is not primitive")
    w, _ = integer_row_reduce([u], len(u))
    wm = mat(w)
    s = mat_vec(wm, u)[0]
    if s == -1:
        wm = (neg(wm[0]),) + wm[1:]
    return inverse(wm)


@dataclass(frozen=True)
class AffineMap:
    """x -> linear @ x + translation."""

    linear: Matrix
    translation: Vector

    def __post_init__(self):
        n = len(self.linear)
        if any(len(r) != n for r in self.linear) or len(self.translation) != n:
            raise DimensionMismatch("affine map with inconsistent shapes")
        object.__setattr__(self, "linear", mat(self.linear))
        object.__setattr__(self, "translation", vec(self.translation))

    @property
    def dim(self) -> int:
        return len(self.linear)

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(identity(n), zero(n))

    @classmethod
    def translation_by(cls, t: Sequence) -> "AffineMap":
        return cls(identity(len(t)), vec(t))

    @classmethod
    def linear_map(cls, m: Sequence[Sequence]) -> "AffineMap":
        return cls(mat(m), zero(len(m)))

    def __call__(self, x: Sequence) -> Vector:
        return add(mat_vec(self.linear, x), self.translation)

    def apply_linear(self, x: Sequence) -> Vector:
        return mat_vec(self.linear, x)

    def is_unimodular(self) -> bool:
        return is_unimodular(self.linear)

    def in_aff_m(self) -> bool:
        """Membership in M ⋊ GL_n(Z)."""
        return self.is_unimodular() and is_integral(self.translation)

    def is_identity(self) -> bool:
        return self == AffineMap.identity(self.dim)

    def __matmul__(self, other: "AffineMap") -> "AffineMap":
        return affine_compose(self, other)


def affine_compose(a: AffineMap, b: AffineMap) -> AffineMap:
    """The map a∘b."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"cannot compose maps of dims {a.dim} and {b.dim}")
    return AffineMap(mat_mul(a.linear, b.linear), add(mat_vec(a.linear, b.translation), a.translation))


def affine_invert(a: AffineMap) -> AffineMap:
    if not a.is_unimodular():
        raise NotInvertibleOverZ(f"linear part {a.linear} is not in GL_n(Z)")
    return affine_invert_rational(a)


def affine_invert_rational(a: AffineMap) -> AffineMap:
    inv = inverse(a.linear)
    return AffineMap(inv, neg(mat_vec(inv, a.translation)))


def affine_from_points(src: Sequence[Sequence], dst: Sequence[Sequence]) -> AffineMap | None:
    """Affine map sending src[i] -> dst[i], determined when src affinely spans.

    Returns None when no affine map of full dimension fits.  Points may live in
    an n-dimensional space with fewer than n+1 of them only if the solution is
    unique, which requires affine spanning.
    """
    n = len(src[0])
    rows = []
    rhs = [[] for _ in range(n)]
    for s, d in zip(src, dst):
        rows.append(list(s) + [1])
        for i in range(n):
            rhs[i].append(d[i])
    if rank(rows) < n + 1:
        return None
    lin = []
    trans = []
    for i in range(n):
        sol = solve(rows, rhs[i])
        if sol is None:
            return None
        lin.append(sol[:n])
        trans.append(sol[n])
    return AffineMap(lin, trans)


def solve_linear_map(src: Sequence[Sequence], dst: Sequence[Sequence]) -> Matrix | None:
    """Linear map L with L src[i] = dst[i] for all i; None if impossible or not unique."""
    n = len(src[0])
    if rank(src) < n:
        return None
    rows = [list(s) for s in src]
    lin = []
    for i in range(len(dst[0])):
        sol = solve(rows, [d[i] for d in dst])
        if sol is None:
            return None
        lin.append(sol)
    return mat(lin)


def integer_points_in_box(bounds: Sequence[tuple[int, int]]):
    return product(*(range(lo, hi + 1) for lo, hi in bounds))


def conjugator(a: Sequence[Sequence], b: Sequence[Sequence], bound: int = 3, budget: int = 200_000) -> Matrix | None:
    """Search X in GL_n(Z) with X a X^{-1} = b.

    Solves the linear system X a = b X over Q, saturates the solution lattice
    and tries integer combinations of its basis by increasing coefficient size
    (at most ``bound`` per coefficient, ``budget`` candidates in all).  Among
    the unimodular solutions at the first size that has one, the one with the
    smallest entries is returned; None when the search finds nothing.
    """
    a, b = mat(a), mat(b)
    n = len(a)
    if a == b:
        return identity(n)
    # unknowns x_{ij}, row-major
    eqs = []
    for i in range(n):
        for j in range(n):
            row = [0] * (n * n)
            for k in range(n):
                row[i * n + k] += a[k][j]
                row[k * n + j] -= b[i][k]
            eqs.append(row)
    basis = nullspace(eqs, n * n)
    if not basis:
        return None
    _, u, k = saturated_basis(basis, n * n)
    gens = [tuple(u[r][c] for r in range(n * n)) for c in range(k)]
    tried = 0
    for size in range(1, bound * k + 1):
        best = None
        for coeffs in _coefficients_of_size(k, size, bound):
            tried += 1
            x = [sum(c * g[t] for c, g in zip(coeffs, gens)) for t in range(n * n)]
            xm = tuple(tuple(x[i * n:(i + 1) * n]) for i in range(n))
            if det(xm) in (1, -1):
                cand = (sum(abs(t) for t in x), xm)
                if best is None or cand < best:
                    best = cand
            if tried >= budget:
                break
        if best is not None:
            return best[1]
        if tried >= budget:
            return None
    return None


def _coefficients_of_size(k: int, size: int, bound: int):
    """Integer vectors of length k with sum |c_i| == size and every |c_i| <= bound."""
    if k == 0:
        if size == 0:
            yield ()
        return
    for c in range(-min(size, bound), min(size, bound) + 1):
        for rest in _coefficients_of_size(k - 1, size - abs(c), bound):
            yield (c,) + rest


def are_conjugate(a, b, bound: int = 3) -> bool:
    return conjugator(a, b, bound) is not None


def shear_normal_form(a: Sequence[Sequence]) -> tuple[Matrix, Matrix] | None:
    """Normal form (1 0; k 1), k >= 0, of a 2x2 unipotent integer matrix.

    Returns ``(normal_form, X)`` with ``X a X^{-1} = normal_form`` and X in
    GL_2(Z), or None when ``a`` is not unipotent.
    """
    a = mat(a)
    if len(a) != 2 or not is_integral(a):
        return None
    nmat = ((a[0][0] - 1, a[0][1]), (a[1][0], a[1][1] - 1))
    if mat_mul(nmat, nmat) != ((0, 0), (0, 0)):
        return None
    if nmat == ((0, 0), (0, 0)):
        return identity(2), identity(2)
    # image of N is spanned by a column of N
    image = (nmat[0][0], nmat[1][0]) if (nmat[0][0], nmat[1][0]) != (0, 0) else (nmat[0][1], nmat[1][1])
    u = primitive_vector(image)
    # X u = e2: take X = inverse of a completion whose second column is u
    comp = unimodular_completion(u)
    swap = ((0, 1), (1, 0))
    x = mat_mul(swap, inverse(comp))
    nf = mat_mul(mat_mul(x, a), inverse(x))
    if nf[1][0] < 0:
        flip = ((1, 0), (0, -1))
        x = mat_mul(flip, x)
        nf = mat_mul(mat_mul(x, a), inverse(x))
    return nf, x


def inverse_transpose(m: Sequence[Sequence]) -> Matrix:
    return transpose(inverse(m))


def fmt_scalar(x) -> int | str:
    """JSON form of a scalar: int, or ``"p/q"`` string."""
    x = frac(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_vector(v: Sequence) -> list:
    return [fmt_scalar(x) for x in v]


def fmt_matrix(m: Sequence[Sequence]) -> list:
    return [fmt_vector(r) for r in m]
