"""Point-group-invariant lattice subspaces: fixed space, orbit spans, averaged
complements, a bounded search for proper invariant subspaces and recursive
decompositions into summands with no further splitting found."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .crystal import CrystGroup
from .errors import DimensionMismatch, NotInvariant
from .lattice import Subspace, basis_order_key, extend_to_basis, saturate, zero_subspace
from .linalg import Matrix, kernel, matvec, primitive, rank

DEFAULT_BOUND = 2


@dataclass(frozen=True)
class InvariantSubspace:
    base: Subspace
    certified_invariant: bool = True

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def ambient_dim(self) -> int:
        return self.base.ambient_dim

    @property
    def sat_basis(self) -> Matrix:
        return self.base.sat_basis

    @property
    def basis(self) -> list:
        return self.base.basis


def as_subspace(v) -> Subspace:
    return v.base if isinstance(v, InvariantSubspace) else v


def _group_matrices(g) -> Sequence[Matrix]:
    return g.elements if isinstance(g, CrystGroup) else g


def _generator_matrices(g) -> Sequence[Matrix]:
    if isinstance(g, CrystGroup):
        return [g.elements[i] for i in g.point_group.generating_indices()]
    return g


def is_invariant(v, g) -> bool:
    """True iff every point-group element maps the subspace into itself.

    Checking generators suffices since the group is finite.
    """
    sub = as_subspace(v)
    ann = sub.annihilator()
    if ann.nrows == 0 or sub.dim == 0:
        return True
    for a in _generator_matrices(g):
        img = a @ sub.sat_basis
        if not (ann @ img).is_zero():
            return False
    return True


def require_invariant(v, g) -> InvariantSubspace:
    if isinstance(v, InvariantSubspace) and v.certified_invariant:
        return v
    sub = as_subspace(v)
    if not is_invariant(sub, g):
        raise NotInvariant(f"{sub!r} is not invariant under the point group")
    return InvariantSubspace(sub)


def fixed_subspace(g) -> InvariantSubspace:
    """Vectors fixed by every element, via the stacked ``A - I`` over generators."""
    gens = _generator_matrices(g)
    n = gens[0].nrows if gens else g.dim
    rows = []
    for a in gens:
        rows.extend((a - Matrix.identity(n)).rows)
    if not rows:
        return InvariantSubspace(saturate(Matrix.identity(n)))
    ker = kernel(Matrix(rows, (len(rows), n)))
    return InvariantSubspace(saturate(ker, n))


def averaging_operator(g) -> Matrix:
    """Average of the point-group elements, the projector onto the fixed subspace."""
    mats = _group_matrices(g)
    n = mats[0].nrows
    acc = Matrix.zeros(n, n)
    for a in mats:
        acc = acc + a
    return acc.scale(Fraction(1, len(mats)))


def orbit_span(v: Sequence[int], g) -> InvariantSubspace:
    if all(x == 0 for x in v):
        raise ValueError("orbit span of the zero vector is not defined")
    mats = _group_matrices(g)
    return InvariantSubspace(saturate([matvec(a, v) for a in mats], len(v)))


def coordinate_projector(sub: Subspace) -> Matrix:
    """Projection onto ``sub`` along the coordinate complement from ``extend_to_basis``."""
    n, k = sub.ambient_dim, sub.dim
    u = extend_to_basis(sub)
    d = Matrix.diag([1] * k + [0] * (n - k))
    return u @ d @ u.inverse()


def averaged_projector(vprime, g) -> Matrix:
    """Average of A P0 A^-1 over the point group, P0 the coordinate projector onto ``vprime``."""
    sub = require_invariant(vprime, g).base
    p0 = coordinate_projector(sub)
    mats = _group_matrices(g)
    n = sub.ambient_dim
    acc = Matrix.zeros(n, n)
    for a in mats:
        acc = acc + a @ p0 @ a.inverse()
    return acc.scale(Fraction(1, len(mats)))


def invariant_complement(vprime, g) -> InvariantSubspace:
    """An invariant subspace complementary to ``vprime``: the kernel of the averaged projector."""
    sub = require_invariant(vprime, g).base
    n = sub.ambient_dim
    if sub.dim == 0:
        return InvariantSubspace(saturate(Matrix.identity(n)))
    if sub.dim == n:
        return InvariantSubspace(zero_subspace(n))
    p = averaged_projector(sub, g)
    return InvariantSubspace(saturate(kernel(p), n))


# --------------------------------------------------------------------------
# restricted actions


@dataclass(frozen=True)
class RestrictedAction:
    """The group acting on an invariant summand, in its ``sat_basis`` coordinates."""

    summand: Subspace
    matrices: tuple  # distinct k×k integer matrices

    @property
    def dim(self) -> int:
        return self.summand.dim

    def lift(self, coords: Subspace) -> Subspace:
        """Subspace of the ambient space spanned by coordinates in the summand."""
        b = self.summand.sat_basis
        if coords.dim == 0:
            return zero_subspace(self.summand.ambient_dim)
        return saturate(b @ coords.sat_basis)


def restrict_action(sub, g) -> RestrictedAction:
    """Solve ``A B = B M_A`` for every element; ``B`` is the summand basis."""
    s = as_subspace(sub)
    n, k = s.ambient_dim, s.dim
    u_inv = extend_to_basis(s).inverse()
    top = Matrix(u_inv.rows[:k], (k, n))
    bottom = Matrix(u_inv.rows[k:], (n - k, n))
    out = {}
    for a in _group_matrices(g):
        ab = a @ s.sat_basis
        if n > k and not (bottom @ ab).is_zero():
            raise NotInvariant(f"{s!r} is not invariant under the point group")
        m = top @ ab
        out.setdefault(m, None)
    return RestrictedAction(s, tuple(out))


# --------------------------------------------------------------------------
# reducibility search


def _line(v: Sequence[int]) -> Subspace:
    """Canonical form of Z v ∩ span(v) without a full saturation."""
    p = primitive(v)
    lead = next(x for x in p if x != 0)
    if lead < 0:
        p = tuple(-x for x in p)
    return Subspace(len(p), Matrix.from_columns([p], len(p)))


def candidate_vectors(k: int, bound: int) -> np.ndarray:
    """Primitive integer vectors of sup-norm at most ``bound``, one per ± pair."""
    rng = range(-bound, bound + 1)
    out = []
    from math import gcd

    for v in product(rng, repeat=k):
        lead = next((x for x in v if x != 0), 0)
        if lead <= 0:
            continue
        g = 0
        for x in v:
            g = gcd(g, x)
        if g == 1:
            out.append(v)
    return np.array(out, dtype=np.int64).reshape(len(out), k)


@dataclass
class SearchResult:
    subspace: Optional[Subspace]  # in summand coordinates
    candidates_examined: int = 0
    exact_spans: int = 0


def _search_action(mats: Sequence[Matrix], k: int, bound: int) -> SearchResult:
    """Smallest proper invariant subspace of Q^k among the pooled candidates.

    Tie-break: smallest dimension, then ``basis_order_key``.
    """
    if k < 2:
        return SearchResult(None)
    best: Optional[Subspace] = None

    def offer(s: Subspace) -> None:
        nonlocal best
        if 0 < s.dim < k and (best is None or basis_order_key(s.sat_basis) < basis_order_key(best.sat_basis)):
            best = s

    fixed = fixed_subspace(list(mats))
    offer(fixed.base)
    if 0 < fixed.dim < k:
        offer(invariant_complement(fixed.base, list(mats)).base)

    vecs = candidate_vectors(k, bound)
    arr = np.array([m.tolist() for m in mats], dtype=np.int64).reshape(len(mats), k, k)
    ranks = kernels.orbit_ranks(arr, vecs, kernels.MODULUS_PRIME)
    order = np.argsort(ranks, kind="stable")
    found: dict = {}
    exact = 0
    for idx in order:
        r = int(ranks[idx])
        if r >= k:
            break  # full rank mod p forces full rank over Q
        if best is not None and r > best.dim:
            break  # the rational rank is at least r
        v = tuple(int(x) for x in vecs[idx])
        images = [matvec(m, v) for m in mats]
        if r == 1:
            s = _line(v)
            if all(s.contains(w) for w in images):
                offer(s)
                continue
        hit = None
        for s in found.get(r, ()):
            if all(s.contains(w) for w in images):
                hit = s  # orbit lies in a known span of the same rank mod p
                break
        if hit is not None:
            continue
        exact += 1
        s = saturate(images, k)
        found.setdefault(s.dim, []).append(s)
        offer(s)
    return SearchResult(best, len(vecs), exact)


def find_proper_invariant(g, bound: int = DEFAULT_BOUND, within=None) -> Optional[InvariantSubspace]:
    """A nonzero proper invariant subspace, or None when the bounded search finds none.

    ``None`` means nothing was found among the candidates; it does not certify
    irreducibility. ``within`` restricts the search to an invariant summand.
    """
    if within is None:
        mats = list(_group_matrices(g))
        n = mats[0].nrows if mats else g.dim
        if n < 2:
            raise DimensionMismatch("the search needs dimension at least 2")
        res = _search_action(mats, n, bound)
        return None if res.subspace is None else InvariantSubspace(res.subspace)
    act = restrict_action(within, g)
    if act.dim < 2:
        return None
    res = _search_action(list(act.matrices), act.dim, bound)
    return None if res.subspace is None else InvariantSubspace(act.lift(res.subspace))


# --------------------------------------------------------------------------
# decompositions


def commutant_dimension(mats: Sequence[Matrix]) -> int:
    """dim_Q of the matrices X with X A = A X for every A."""
    k = mats[0].nrows
    rows = []
    # unknown X flattened row-major; entry (i, j) of XA - AX is linear in X
    for a in mats:
        for i in range(k):
            for j in range(k):
                r = [0] * (k * k)
                for t in range(k):
                    r[i * k + t] += a[t, j]
                    r[t * k + j] -= a[i, t]
                rows.append(r)
    if not rows:
        return k * k
    return k * k - rank(Matrix(rows, (len(rows), k * k)))


@dataclass(frozen=True)
class Summand:
    space: InvariantSubspace
    status: str  # "certified" or "search-bound-only"
    bound: Optional[int] = None

    def to_json(self) -> dict:
        from .lattice import subspace_to_json

        out = {"subspace": subspace_to_json(self.space.base), "dim": self.space.dim, "status": self.status}
        if self.bound is not None:
            out["bound"] = self.bound
        return out


@dataclass
class Decomposition:
    summands: list = field(default_factory=list)

    @property
    def dims(self) -> list[int]:
        return [s.space.dim for s in self.summands]

    def to_json(self) -> dict:
        return {"summands": [s.to_json() for s in self.summands], "dims": self.dims}


def _split_within(sub: Subspace, g, part: Subspace) -> Subspace:
    """Invariant complement of ``part`` inside the invariant summand ``sub``."""
    act = restrict_action(sub, g)
    coords = saturate([sub.coordinates(c) for c in part.basis], sub.dim)
    comp = invariant_complement(coords, list(act.matrices))
    return act.lift(comp.base)


def minimal_decomposition(g, start=None, bound: int = DEFAULT_BOUND) -> Decomposition:
    """Split ``start`` (default: the whole space) until no summand splits further.

    A summand is ``certified`` when it is a line or its commutant is the
    scalars (so it is absolutely irreducible); otherwise the label records
    that only the bounded search failed.
    """
    if start is None:
        mats = _group_matrices(g)
        n = mats[0].nrows if mats else g.dim
        start_sub = saturate(Matrix.identity(n))
    else:
        start_sub = require_invariant(start, g).base
    if start_sub.dim == 0:
        raise ValueError("cannot decompose the zero subspace")
    out: list = []
    stack = [start_sub]
    while stack:
        sub = stack.pop()
        found = find_proper_invariant(g, bound, within=sub) if sub.dim >= 2 else None
        if found is None:
            act = restrict_action(sub, g)
            if sub.dim == 1 or commutant_dimension(list(act.matrices)) == 1:
                out.append(Summand(InvariantSubspace(sub), "certified"))
            else:
                out.append(Summand(InvariantSubspace(sub), "search-bound-only", bound))
            continue
        comp = _split_within(sub, g, found.base)
        stack.append(comp)
        stack.append(found.base)
    out.sort(key=lambda s: (s.space.dim, basis_order_key(s.space.sat_basis)))
    return Decomposition(out)
