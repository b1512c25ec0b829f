"""Saturated sublattices of Z^n and the rational subspaces they span.

Every rational subspace U of Q^n is stored through the lattice Z^n ∩ U
(its saturated sublattice) in column-HNF canonical form, so two subspaces are
equal exactly when their ``sat_basis`` matrices are equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotContained, NotSaturated
from .linalg import (
    Matrix,
    annihilator,
    clear_denominators,
    hnf_basis,
    integer_kernel,
    integer_solve,
    matvec,
    rank,
    snf,
)


@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    sat_basis: Matrix = field(compare=True)

    def __post_init__(self):
        if self.sat_basis.nrows != self.ambient_dim:
            raise DimensionMismatch("basis rows must equal the ambient dimension")

    @property
    def dim(self) -> int:
        return self.sat_basis.ncols

    @property
    def basis(self) -> list[tuple]:
        return self.sat_basis.columns()

    def annihilator(self) -> Matrix:
        return annihilator(self.sat_basis)

    def contains(self, v: Sequence) -> bool:
        ann = self.annihilator()
        return all(x == 0 for x in matvec(ann, v)) if ann.nrows else True

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(c) for c in other.basis)

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def coordinates(self, v: Sequence) -> tuple:
        """Coordinates of ``v`` (which must lie in the subspace) in ``sat_basis``."""
        from .linalg import solve_rational

        sol = solve_rational(self.sat_basis, v)
        if sol is None:
            raise NotContained("vector does not lie in the subspace")
        return sol.x

    def sort_key(self) -> tuple:
        return basis_order_key(self.sat_basis)

    def __repr__(self) -> str:
        cols = ", ".join("(" + ", ".join(str(x) for x in c) + ")" for c in self.basis)
        return f"Subspace(n={self.ambient_dim}, basis=[{cols}])"


def basis_order_key(basis: Matrix) -> tuple:
    """Total order used for deterministic tie-breaking between subspaces.

    Columns are compared one by one: earlier pivot row first, then entries by
    absolute value with a positive entry before its negative.
    """
    key = []
    for c in basis.columns():
        pivot = next((i for i, x in enumerate(c) if x != 0), len(c))
        key.append((pivot, tuple((abs(x), x < 0) for x in c)))
    return (basis.ncols, tuple(key))


def _integer_columns(generators: Matrix | Iterable[Sequence], n: int | None) -> Matrix:
    if isinstance(generators, Matrix):
        cols = generators.columns()
        n = generators.nrows
    else:
        cols = [tuple(c) for c in generators]
        if n is None:
            if not cols:
                raise DimensionMismatch("ambient dimension needed for an empty generator list")
            n = len(cols[0])
    cols = [clear_denominators(c) for c in cols]
    return Matrix.from_columns(cols, n)


def saturate(generators: Matrix | Iterable[Sequence], n: int | None = None) -> Subspace:
    """Z^n ∩ span(generators), in canonical form.

    ``generators`` is a matrix whose columns span the subspace, or an
    iterable of column vectors (then ``n`` is needed if it is empty).
    Rational columns are scaled to integers first.
    """
    gens = _integer_columns(generators, n)
    n = gens.nrows
    if gens.ncols == 0 or gens.is_zero():
        return Subspace(n, Matrix.zeros(n, 0))
    ann = annihilator(gens)
    ker = integer_kernel(ann)
    return Subspace(n, ker)


def zero_subspace(n: int) -> Subspace:
    return Subspace(n, Matrix.zeros(n, 0))


def full_subspace(n: int) -> Subspace:
    return Subspace(n, Matrix.identity(n))


def lattice_basis(m: Matrix) -> Matrix:
    """A Z-basis (canonical) of the column lattice of an integer matrix."""
    if m.ncols == 0:
        return m
    return hnf_basis(m)


def _coords_in(sub: Matrix, ambient: Matrix) -> Matrix:
    cols = []
    for c in sub.columns():
        sol = integer_solve(ambient, c)
        if sol is None:
            raise NotContained(f"column {c} is not in the ambient lattice")
        cols.append(sol.x)
    return Matrix.from_columns(cols, ambient.ncols)


def is_direct_summand(sub: Matrix, ambient: Matrix) -> bool:
    """True iff the column lattice of ``sub`` is a direct summand of that of
    ``ambient`` (the quotient is torsion-free)."""
    amb = lattice_basis(ambient)
    if sub.ncols == 0:
        return True
    x = _coords_in(sub, amb)
    return all(d in (0, 1) for d in snf(x).divisors)


def extend_to_basis(sub: Subspace) -> Matrix:
    """A unimodular n×n matrix whose first ``sub.dim`` columns are ``sat_basis``.

    Standard basis vectors are appended greedily while the partial basis stays
    primitive; whatever is left is completed from a Smith normal form.
    """
    n, k = sub.ambient_dim, sub.dim
    b = sub.sat_basis
    if not is_direct_summand(b, Matrix.identity(n)):
        raise NotSaturated("basis does not span a saturated sublattice")
    cols = b.columns()
    for i in range(n):
        if len(cols) == n:
            break
        e = tuple(int(i == j) for j in range(n))
        trial = Matrix.from_columns(cols + [e], n)
        if rank(trial) == len(cols) + 1 and all(d == 1 for d in snf(trial).divisors):
            cols.append(e)
    if len(cols) < n:
        m = Matrix.from_columns(cols, n)
        s = snf(m)
        w = s.u.inverse()
        cols += w.columns()[len(cols):]
    out = Matrix.from_columns(cols, n)
    assert abs(out.det()) == 1
    return out


def span_subspaces(subs: Sequence[Subspace]) -> Subspace:
    if not subs:
        raise ValueError("need at least one subspace")
    n = subs[0].ambient_dim
    if any(s.ambient_dim != n for s in subs):
        raise DimensionMismatch("subspaces live in different ambient spaces")
    cols = [c for s in subs for c in s.basis]
    return saturate(cols, n)


def intersect_subspaces(subs: Sequence[Subspace]) -> Subspace:
    if not subs:
        raise ValueError("need at least one subspace")
    n = subs[0].ambient_dim
    if any(s.ambient_dim != n for s in subs):
        raise DimensionMismatch("subspaces live in different ambient spaces")
    rows = [r for s in subs for r in s.annihilator().rows]
    if not rows:
        return full_subspace(n)
    return Subspace(n, integer_kernel(Matrix(rows, (len(rows), n))))


@dataclass(frozen=True)
class SublatticeQuotient:
    index: int  # 0 encodes an infinite index
    cyclic_factors: tuple  # elementary divisors; 0 stands for a free factor Z
    projection_basis: Matrix
    _transform: Matrix = field(repr=False, compare=False)

    @property
    def rank(self) -> int:
        return sum(1 for d in self.cyclic_factors if d == 0)

    def coordinates(self, v: Sequence[int]) -> tuple:
        """Coordinates of the class of ``v`` in the quotient w.r.t. ``projection_basis``."""
        k = len(self._transform.rows) - self.projection_basis.ncols
        return matvec(self._transform, v)[k:]


def quotient_data(sub: Subspace) -> SublatticeQuotient:
    """The quotient Z^n / (Z^n ∩ U); torsion-free because ``sub`` is saturated."""
    n, k = sub.ambient_dim, sub.dim
    u = extend_to_basis(sub)
    comp = u.select_columns(range(k, n))
    index = 1 if k == n else 0
    return SublatticeQuotient(index, (0,) * (n - k), comp, u.inverse())


def sublattice_index(sub_basis: Matrix, ambient_basis: Matrix) -> int:
    """Index of the column lattice of ``sub_basis`` in that of ``ambient_basis``;
    0 when the ranks differ (infinite index)."""
    amb = lattice_basis(ambient_basis)
    sub = lattice_basis(sub_basis)
    x = _coords_in(sub, amb)
    if sub.ncols != amb.ncols:
        return 0
    return prod(snf(x).divisors)


def subspace_to_json(sub: Subspace) -> dict:
    from .linalg import matrix_to_json

    return {"ambient_dim": sub.ambient_dim, "sat_basis": matrix_to_json(sub.sat_basis)}


def subspace_from_json(data: dict) -> Subspace:
    from .errors import SchemaError
    from .linalg import matrix_from_json

    try:
        n = int(data["ambient_dim"])
        basis = matrix_from_json(data["sat_basis"], 0)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad subspace document: {exc}") from exc
    if basis.nrows == 0:
        basis = Matrix.zeros(n, 0)
    return saturate(basis, n)
