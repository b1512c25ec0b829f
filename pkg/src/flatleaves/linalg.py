"""Exact dense linear algebra over the integers and the rationals.

Entries are Python ``int`` or :class:`fractions.Fraction`; a Fraction with
denominator one is stored as an ``int`` so integrality checks are cheap.
Column conventions: a basis of a lattice or subspace is the set of columns
of a matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import DimensionMismatch, MalformedRational


def _norm(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, int):
        return int(x)
    return _norm(Fraction(x))


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


class Matrix:
    """Immutable dense matrix with exact entries."""

    __slots__ = ("_rows", "shape")

    def __init__(self, rows: Iterable[Iterable], shape: Optional[tuple[int, int]] = None):
        rows = tuple(tuple(_norm(x) for x in r) for r in rows)
        if shape is None:
            shape = (len(rows), len(rows[0]) if rows else 0)
        if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
            raise DimensionMismatch(f"ragged matrix data for shape {shape}")
        self._rows = rows
        self.shape = shape

    @classmethod
    def _raw(cls, rows: tuple, shape: tuple[int, int]) -> "Matrix":
        m = object.__new__(cls)
        m._rows = rows
        m.shape = shape
        return m

    # constructors

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._raw(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), (n, n))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls._raw(tuple((0,) * ncols for _ in range(nrows)), (nrows, ncols))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: Optional[int] = None) -> "Matrix":
        columns = [tuple(c) for c in columns]
        if nrows is None:
            if not columns:
                raise DimensionMismatch("row count needed for an empty column list")
            nrows = len(columns[0])
        if any(len(c) != nrows for c in columns):
            raise DimensionMismatch("columns of unequal length")
        return cls((tuple(c[i] for c in columns) for i in range(nrows)), (nrows, len(columns)))

    @classmethod
    def diag(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        return cls(((entries[i] if i == j else 0 for j in range(n)) for i in range(n)), (n, n))

    # access

    @property
    def nrows(self) -> int:
        return self.shape[0]

    @property
    def ncols(self) -> int:
        return self.shape[1]

    @property
    def rows(self) -> tuple:
        return self._rows

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.ncols)]

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def tolist(self) -> list[list]:
        return [list(r) for r in self._rows]

    def __iter__(self):
        return iter(self._rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"Matrix([{body}], shape={self.shape})"

    # arithmetic

    @property
    def T(self) -> "Matrix":
        n, m = self.shape
        return Matrix._raw(tuple(tuple(r[j] for r in self._rows) for j in range(m)), (m, n))

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.T._rows
            rows = tuple(
                tuple(_norm(sum(a * b for a, b in zip(r, c))) for c in cols) for r in self._rows
            )
            return Matrix._raw(rows, (self.nrows, other.ncols))
        return matvec(self, other)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in addition")
        return Matrix._raw(
            tuple(tuple(_norm(a + b) for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)),
            self.shape,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in subtraction")
        return Matrix._raw(
            tuple(tuple(_norm(a - b) for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)),
            self.shape,
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self._rows), self.shape)

    def scale(self, c) -> "Matrix":
        return Matrix._raw(tuple(tuple(_norm(c * a) for a in r) for r in self._rows), self.shape)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise DimensionMismatch("row count mismatch in hstack")
        return Matrix._raw(
            tuple(r + s for r, s in zip(self._rows, other._rows)), (self.nrows, self.ncols + other.ncols)
        )

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise DimensionMismatch("column count mismatch in vstack")
        return Matrix._raw(self._rows + other._rows, (self.nrows + other.nrows, self.ncols))

    def select_columns(self, idx: Sequence[int]) -> "Matrix":
        return Matrix._raw(tuple(tuple(r[j] for j in idx) for r in self._rows), (self.nrows, len(idx)))

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for r in self._rows for x in r)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def denominator(self) -> int:
        d = 1
        for r in self._rows:
            for x in r:
                if isinstance(x, Fraction):
                    d = lcm(d, x.denominator)
        return d

    def det(self):
        return det(self)

    def inverse(self) -> "Matrix":
        return inverse(self)

    def rank(self) -> int:
        return rank(self)


def matvec(a: Matrix, v: Sequence) -> tuple:
    if a.ncols != len(v):
        raise DimensionMismatch(f"cannot apply {a.shape} matrix to length-{len(v)} vector")
    return tuple(_norm(sum(x * y for x, y in zip(r, v))) for r in a.rows)


def vec(values: Iterable) -> tuple:
    return tuple(_norm(x) for x in values)


def vadd(u: Sequence, v: Sequence) -> tuple:
    return tuple(_norm(a + b) for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> tuple:
    return tuple(_norm(a - b) for a, b in zip(u, v))


def vneg(u: Sequence) -> tuple:
    return tuple(_norm(-a) for a in u)


def vscale(c, u: Sequence) -> tuple:
    return tuple(_norm(c * a) for a in u)


def is_integral_vector(v: Sequence) -> bool:
    return all(isinstance(x, int) for x in v)


def frac_mod1(v: Sequence) -> tuple:
    """Reduce a rational vector entrywise into ``[0, 1)``."""
    return tuple(_norm(x - (x.numerator // x.denominator)) if isinstance(x, Fraction) else 0 for x in v)


def primitive(v: Sequence[int]) -> tuple:
    """Divide an integer vector by the gcd of its entries; sign kept."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def clear_denominators(v: Sequence) -> tuple:
    d = 1
    for x in v:
        if isinstance(x, Fraction):
            d = lcm(d, x.denominator)
    return tuple(int(x * d) for x in v)


# --------------------------------------------------------------------------
# rational elimination


def rref(a: Matrix) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over Q. Returns ``(rows, pivot_columns)``."""
    m = [[Fraction(x) for x in r] for r in a.rows]
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        k = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        p = m[r][c]
        if p != 1:
            m[r] = [x / p for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return [[_norm(x) for x in row] for row in m], pivots


def rank(a: Matrix) -> int:
    if a.nrows == 0 or a.ncols == 0:
        return 0
    if a.nrows > a.ncols:
        a = a.T
    return len(rref(a)[1])


def det(a: Matrix):
    n = a.nrows
    if a.ncols != n:
        raise DimensionMismatch("determinant of a non-square matrix")
    m = [[Fraction(x) for x in r] for r in a.rows]
    d = Fraction(1)
    for c in range(n):
        k = next((i for i in range(c, n) if m[i][c] != 0), None)
        if k is None:
            return 0
        if k != c:
            m[c], m[k] = m[k], m[c]
            d = -d
        p = m[c][c]
        d *= p
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / p
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return _norm(d)


def inverse(a: Matrix) -> Matrix:
    n = a.nrows
    if a.ncols != n:
        raise DimensionMismatch("inverse of a non-square matrix")
    aug = a.hstack(Matrix.identity(n))
    rows, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return Matrix((r[n:] for r in rows), (n, n))


def _primitive_positive(v: Sequence) -> tuple:
    w = primitive(clear_denominators(v))
    lead = next((x for x in w if x != 0), 0)
    return tuple(-x for x in w) if lead < 0 else w


def kernel(a: Matrix) -> list[tuple]:
    """Basis of the rational null space, as primitive integer vectors whose
    first nonzero entry is positive."""
    n = a.ncols
    if a.nrows == 0:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    rows, piv = rref(a)
    pivset = set(piv)
    out = []
    for f in range(n):
        if f in pivset:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -Fraction(rows[i][f])
        out.append(_primitive_positive(v))
    return out


def annihilator(basis: Matrix) -> Matrix:
    """Integer matrix whose rows span the annihilator of the column span."""
    n = basis.nrows
    if basis.ncols == 0:
        return Matrix.identity(n)
    rows = kernel(basis.T)
    return Matrix(rows, (len(rows), n))


class RationalSolution(NamedTuple):
    x: tuple
    kernel: list[tuple]


def solve_rational(a: Matrix, b: Sequence) -> Optional[RationalSolution]:
    """One solution of ``a x = b`` over Q plus a kernel basis, or ``None``."""
    if a.nrows != len(b):
        raise DimensionMismatch(f"{a.shape} matrix against length-{len(b)} right-hand side")
    n = a.ncols
    aug = a.hstack(Matrix.from_columns([tuple(b)], a.nrows)) if a.nrows else Matrix.zeros(0, n + 1)
    rows, piv = rref(aug)
    if n in piv:
        return None
    x = [0] * n
    for i, pc in enumerate(piv):
        x[pc] = rows[i][n]
    return RationalSolution(vec(x), kernel(a))


# --------------------------------------------------------------------------
# integer normal forms


def _row_hnf(a: list[list[int]], ncols: int):
    """Row-style HNF. Returns ``(h, u, pivots)`` with ``u @ a == h``."""
    m = len(a)
    h = [list(r) for r in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        k = next((i for i in range(r, m) if h[i][c] != 0), None)
        if k is None:
            continue
        if k != r:
            h[r], h[k] = h[k], h[r]
            u[r], u[k] = u[k], u[r]
        for i in range(r + 1, m):
            b = h[i][c]
            if b == 0:
                continue
            a0 = h[r][c]
            if b % a0 == 0:
                f = b // a0
                h[i] = [t - f * s for s, t in zip(h[r], h[i])]
                u[i] = [t - f * s for s, t in zip(u[r], u[i])]
                continue
            g, x, y = xgcd(a0, b)
            p, q = a0 // g, b // g
            hr, hi = h[r], h[i]
            h[r] = [x * s + y * t for s, t in zip(hr, hi)]
            h[i] = [-q * s + p * t for s, t in zip(hr, hi)]
            ur, ui = u[r], u[i]
            u[r] = [x * s + y * t for s, t in zip(ur, ui)]
            u[i] = [-q * s + p * t for s, t in zip(ur, ui)]
        if h[r][c] < 0:
            h[r] = [-s for s in h[r]]
            u[r] = [-s for s in u[r]]
        p = h[r][c]
        for i in range(r):
            f = h[i][c] // p
            if f:
                h[i] = [t - f * s for s, t in zip(h[r], h[i])]
                u[i] = [t - f * s for s, t in zip(u[r], u[i])]
        pivots.append(c)
        r += 1
    return h, u, pivots


@dataclass(frozen=True)
class HnfResult:
    h: Matrix
    u: Matrix
    rank: int
    pivot_rows: tuple


def _require_int(m: Matrix, what: str) -> None:
    if not m.is_integral():
        raise ValueError(f"{what} must be an integer matrix")


def hnf(m: Matrix) -> HnfResult:
    """Column Hermite normal form: ``m @ u == h``.

    The first ``rank`` columns of ``h`` are nonzero; column ``j`` has its first
    nonzero entry (the pivot) at ``pivot_rows[j]``, strictly increasing in
    ``j``. Pivots are positive and entries to the left of a pivot lie in
    ``[0, pivot)``. ``h`` depends only on the column lattice of ``m``.
    """
    _require_int(m, "hnf input")
    nrows, ncols = m.shape
    ht, ut, piv = _row_hnf([list(r) for r in m.T.rows], nrows)
    h = Matrix._raw(tuple(tuple(ht[j][i] for j in range(ncols)) for i in range(nrows)), (nrows, ncols))
    u = Matrix._raw(tuple(tuple(ut[j][i] for j in range(ncols)) for i in range(ncols)), (ncols, ncols))
    return HnfResult(h, u, len(piv), tuple(piv))


def hnf_basis(m: Matrix) -> Matrix:
    """Canonical basis (nonzero HNF columns) of the column lattice."""
    res = hnf(m)
    return res.h.select_columns(range(res.rank))


def _elim(a: int, b: int) -> tuple[int, int, int, int]:
    # (x, y, p, q): the unimodular pair-op sending (a, b) to (gcd, 0); a pure
    # elimination when a divides b, so the other pivot line is left untouched.
    if b % a == 0:
        return 1, 0, 1, b // a
    g, x, y = xgcd(a, b)
    return x, y, a // g, b // g


@dataclass(frozen=True)
class SnfResult:
    d: Matrix
    u: Matrix
    v: Matrix
    divisors: tuple


def snf(m: Matrix) -> SnfResult:
    """Smith normal form with unimodular certificates: ``u @ m @ v == d``."""
    _require_int(m, "snf input")
    nr, nc = m.shape
    a = [list(r) for r in m.rows]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    vt = [[int(i == j) for j in range(nc)] for i in range(nc)]  # rows of v^T

    def col_op(j, k, x, y, p, q):
        # columns (j, k) <- (x*cj + y*ck, -q*cj + p*ck)
        for row in a:
            s, t = row[j], row[k]
            row[j], row[k] = x * s + y * t, -q * s + p * t
        s, t = vt[j], vt[k]
        vt[j] = [x * e + y * f for e, f in zip(s, t)]
        vt[k] = [-q * e + p * f for e, f in zip(s, t)]

    def row_op(j, k, x, y, p, q):
        s, t = a[j], a[k]
        a[j] = [x * e + y * f for e, f in zip(s, t)]
        a[k] = [-q * e + p * f for e, f in zip(s, t)]
        s, t = u[j], u[k]
        u[j] = [x * e + y * f for e, f in zip(s, t)]
        u[k] = [-q * e + p * f for e, f in zip(s, t)]

    for t in range(min(nr, nc)):
        while True:
            best = None
            for i in range(t, nr):
                for j in range(t, nc):
                    if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            if i != t:
                a[t], a[i] = a[i], a[t]
                u[t], u[i] = u[i], u[t]
            if j != t:
                for row in a:
                    row[t], row[j] = row[j], row[t]
                vt[t], vt[j] = vt[j], vt[t]
            clean = False
            while not clean:
                clean = True
                for i in range(t + 1, nr):
                    if a[i][t] != 0:
                        row_op(t, i, *_elim(a[t][t], a[i][t]))
                for j in range(t + 1, nc):
                    if a[t][j] != 0:
                        col_op(t, j, *_elim(a[t][t], a[t][j]))
                        clean = False
                if any(a[i][t] != 0 for i in range(t + 1, nr)):
                    clean = False
            p = a[t][t]
            bad = next(
                (i for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % p != 0), None
            )
            if bad is None:
                break
            a[t] = [e + f for e, f in zip(a[t], a[bad])]
            u[t] = [e + f for e, f in zip(u[t], u[bad])]
        if a[t][t] < 0:
            a[t] = [-e for e in a[t]]
            u[t] = [-e for e in u[t]]
    d = Matrix(a, (nr, nc))
    um = Matrix(u, (nr, nr))
    vm = Matrix(vt, (nc, nc)).T
    return SnfResult(d, um, vm, tuple(a[i][i] for i in range(min(nr, nc))))


class IntegerSolution(NamedTuple):
    x: tuple
    kernel: list[tuple]


def integer_kernel(a: Matrix) -> Matrix:
    """Z-basis of ``{x in Z^n : a x = 0}`` in canonical (HNF) form, as columns."""
    n = a.ncols
    if a.nrows == 0:
        return Matrix.identity(n)
    _require_int(a, "integer_kernel input")
    res = hnf(a)
    ker = res.u.select_columns(range(res.rank, n))
    if ker.ncols == 0:
        return ker
    return hnf_basis(ker)


def integer_solve(a: Matrix, b: Sequence) -> Optional[IntegerSolution]:
    """Integer solution of ``a x = b`` plus a Z-basis of the integer kernel."""
    if a.nrows != len(b):
        raise DimensionMismatch(f"{a.shape} matrix against length-{len(b)} right-hand side")
    b = vec(b)
    if not is_integral_vector(b):
        return None
    n = a.ncols
    if a.nrows == 0:
        return IntegerSolution((0,) * n, Matrix.identity(n).columns())
    _require_int(a, "integer_solve matrix")
    res = hnf(a)
    h = res.h
    y = [0] * n
    for j, pr in enumerate(res.pivot_rows):
        rem = b[pr] - sum(h[pr, i] * y[i] for i in range(j))
        q, r = divmod(rem, h[pr, j])
        if r:
            return None
        y[j] = q
    if matvec(h, y) != b:
        return None
    x = matvec(res.u, y)
    ker = res.u.select_columns(range(res.rank, n))
    ker_cols = hnf_basis(ker).columns() if ker.ncols else []
    return IntegerSolution(x, ker_cols)


class MembershipWitness(NamedTuple):
    w: tuple
    lam: tuple


def affine_lattice_membership(
    target: Sequence, subspace_basis: Matrix, lattice_basis: Matrix
) -> Optional[MembershipWitness]:
    """Decide ``target in span(subspace_basis) + Z-span(lattice_basis)``.

    Returns ``(w, lam)`` with ``target == w + lam`` (``w`` in the subspace,
    ``lam`` in the lattice), or ``None``.
    """
    n = len(target)
    if subspace_basis.nrows != n or lattice_basis.nrows != n:
        raise DimensionMismatch("target and bases live in different dimensions")
    target = vec(target)
    ann = annihilator(subspace_basis)
    if ann.nrows == 0:
        return MembershipWitness(target, (0,) * n)
    rhs = matvec(ann, target)
    lhs = ann @ lattice_basis
    sol = integer_solve(lhs, rhs)
    if sol is None:
        return None
    lam = matvec(lattice_basis, sol.x)
    return MembershipWitness(vsub(target, lam), lam)


def reduce_mod_lattice(v: Sequence[int], basis: Matrix) -> tuple:
    """Canonical representative of ``v`` modulo the column lattice of an
    HNF-form ``basis`` (pivot entries reduced into ``[0, pivot)``)."""
    v = list(v)
    for j in range(basis.ncols):
        col = basis.col(j)
        pr = next(i for i, x in enumerate(col) if x != 0)
        f = v[pr] // col[pr]
        if f:
            v = [a - f * c for a, c in zip(v, col)]
    return vec(v)


# --------------------------------------------------------------------------
# serialization of rationals


def format_rational(x) -> str:
    x = _norm(x)
    if isinstance(x, int):
        return str(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> int | Fraction:
    if isinstance(s, bool):
        raise MalformedRational(f"not a rational: {s!r}")
    if isinstance(s, int):
        return s
    if not isinstance(s, str):
        raise MalformedRational(f"rationals are encoded as strings, got {s!r}")
    text = s.strip()
    parts = text.split("/")
    try:
        if len(parts) == 1:
            return int(parts[0])
        if len(parts) == 2:
            q = int(parts[1])
            if q == 0:
                raise MalformedRational(f"zero denominator in {s!r}")
            return _norm(Fraction(int(parts[0]), q))
    except ValueError:
        pass
    raise MalformedRational(f"malformed rational {s!r}")


def matrix_to_json(m: Matrix) -> list[list[str]]:
    return [[format_rational(x) for x in r] for r in m.rows]


def matrix_from_json(data, ncols: Optional[int] = None) -> Matrix:
    if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
        raise MalformedRational("matrix must be an array of arrays")
    rows = [[parse_rational(x) for x in r] for r in data]
    shape = (len(rows), len(rows[0]) if rows else (ncols or 0))
    return Matrix(rows, shape)


def vector_to_json(v: Sequence) -> list[str]:
    return [format_rational(x) for x in v]


def vector_from_json(data) -> tuple:
    if not isinstance(data, list):
        raise MalformedRational("vector must be an array")
    return tuple(parse_rational(x) for x in data)
