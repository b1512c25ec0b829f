"""Leaves of the foliation by cosets of an invariant subspace.

A leaf is the image of a coset ``x0 + U`` of an invariant subspace U. Its stabilizer is recorded per
point-group element as one integer solution ``t_A`` of
``(A - I) x0 + a(A) + t ∈ U``, reduced modulo ``Z^n ∩ U`` so that equal
stabilizers have equal entries.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .crystal import CrystGroup, is_torsion_free
from .errors import NotNested, SearchExhausted
from .invariant import as_subspace, require_invariant
from .lattice import Subspace, extend_to_basis, saturate, subspace_from_json, subspace_to_json
from .linalg import (
    Matrix,
    affine_lattice_membership,
    det,
    hnf_basis,
    kernel,
    matrix_to_json,
    matvec,
    reduce_mod_lattice,
    vadd,
    vec,
    vector_from_json,
    vector_to_json,
    vneg,
)


@dataclass(frozen=True)
class CosetLeaf:
    vprime: Subspace
    basepoint: tuple

    def __init__(self, vprime, basepoint: Sequence):
        object.__setattr__(self, "vprime", as_subspace(vprime))
        object.__setattr__(self, "basepoint", vec(basepoint))

    def to_json(self) -> dict:
        return {"subspace": subspace_to_json(self.vprime), "basepoint": vector_to_json(self.basepoint)}

    @classmethod
    def from_json(cls, data: dict) -> "CosetLeaf":
        return cls(subspace_from_json(data["subspace"]), vector_from_json(data["basepoint"]))


@dataclass(frozen=True)
class StabilizerGroup:
    entries: tuple  # ((element index, t_A), ...) sorted by index
    common_sublattice: Matrix

    @property
    def element_set(self) -> frozenset:
        return frozenset(i for i, _ in self.entries)

    def as_dict(self) -> dict:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self, g: Optional[CrystGroup] = None) -> dict:
        ents = []
        for i, lam in self.entries:
            e = {"element": i, "lambda": vector_to_json(lam)}
            if g is not None:
                e["matrix"] = matrix_to_json(g.elements[i])
            ents.append(e)
        return {"entries": ents, "order_mod_lattice": len(self.entries), "common_sublattice": matrix_to_json(self.common_sublattice)}


# --------------------------------------------------------------------------
# kernel of the quotient action and stabilizers


def orthogonal_complement(sub: Subspace, gram: Matrix) -> Subspace:
    """The G-orthogonal complement of ``sub``, saturated."""
    n = sub.ambient_dim
    if sub.dim == 0:
        return saturate(Matrix.identity(n))
    return saturate(kernel(sub.sat_basis.T @ gram), n)


def k_prime(vprime, g: CrystGroup) -> frozenset:
    """Element indices acting as the identity on the G-orthogonal complement.

    The equivalent condition ``(A - I) Q^n ⊆ U`` is evaluated as well and the two
    must agree; the result is checked to be a normal subgroup.
    """
    sub = require_invariant(vprime, g).base
    n = g.dim
    w = orthogonal_complement(sub, g.gram)
    ann = sub.annihilator()
    ident = Matrix.identity(n)
    out = set()
    for i, a in enumerate(g.elements):
        d = a - ident
        metric = w.dim == 0 or (d @ w.sat_basis).is_zero()
        quotient = ann.nrows == 0 or (ann @ d).is_zero()
        if metric != quotient:
            raise RuntimeError(f"complement tests disagree on element {i}; is the Gram matrix invariant?")
        if metric:
            out.add(i)
    pg = g.point_group
    for i in out:
        for j in pg.generating_indices():
            if pg.mul(pg.mul(j, i), pg.inv(j)) not in out:
                raise RuntimeError("the kernel subgroup is not normal")
    return frozenset(out)


def _reduce(lam: Sequence[int], sub: Subspace) -> tuple:
    return reduce_mod_lattice(lam, sub.sat_basis) if sub.dim else vec(lam)


def coset_stabilizer(leaf: CosetLeaf, g: CrystGroup) -> StabilizerGroup:
    sub = leaf.vprime
    x0 = leaf.basepoint
    ident = Matrix.identity(g.dim)
    entries = []
    for i, a in enumerate(g.elements):
        target = vadd(matvec(a - ident, x0), g.vector_system[i])
        wit = affine_lattice_membership(target, sub.sat_basis, ident)
        if wit is not None:
            entries.append((i, _reduce(vneg(wit.lam), sub)))
    return StabilizerGroup(tuple(entries), sub.sat_basis)


def kernel_entries(vprime, g: CrystGroup) -> StabilizerGroup:
    """Kernel of the action on the quotient space: pairs (A in ``k_prime``, t) with a(A) + t in U."""
    sub = require_invariant(vprime, g).base
    ident = Matrix.identity(g.dim)
    entries = []
    for i in sorted(k_prime(sub, g)):
        wit = affine_lattice_membership(g.vector_system[i], sub.sat_basis, ident)
        if wit is not None:
            entries.append((i, _reduce(vneg(wit.lam), sub)))
    return StabilizerGroup(tuple(entries), sub.sat_basis)


def is_generic(leaf: CosetLeaf, g: CrystGroup) -> bool:
    return coset_stabilizer(leaf, g).entries == kernel_entries(leaf.vprime, g).entries


def find_generic_coset(vprime, g: CrystGroup, seed: int = 0, retries: int = 64) -> CosetLeaf:
    """Draw basepoints with entries i/D (D = 97·2^j) until a generic coset turns up."""
    sub = require_invariant(vprime, g).base
    rng = random.Random(seed)
    kern = kernel_entries(sub, g).entries
    for j in range(retries):
        d = 97 << min(j, 24)
        x0 = tuple(Fraction(rng.randrange(d), d) for _ in range(g.dim))
        leaf = CosetLeaf(sub, x0)
        if coset_stabilizer(leaf, g).entries == kern:
            return leaf
    raise SearchExhausted(f"no generic coset in {retries} draws (seed {seed})")


# --------------------------------------------------------------------------
# the leaf as a flat manifold


def _coordinate_rows(sub: Subspace) -> tuple[Matrix, Matrix]:
    """Rows of U^-1 giving coordinates along ``sub`` and along its coordinate complement."""
    n, k = sub.ambient_dim, sub.dim
    u_inv = extend_to_basis(sub).inverse()
    return Matrix(u_inv.rows[:k], (k, n)), Matrix(u_inv.rows[k:], (n - k, n))


def _lattice_span(cols: Sequence[Sequence], k: int) -> Matrix:
    """HNF basis of the lattice spanned by rational vectors (assumed of full rank)."""
    d = 1
    for c in cols:
        for x in c:
            if isinstance(x, Fraction):
                d = lcm(d, x.denominator)
    scaled = Matrix.from_columns([tuple(d * x for x in c) for c in cols], k)
    return hnf_basis(scaled).scale(Fraction(1, d))


def _rational_lattice(gens: Sequence[Sequence], k: int) -> tuple[Matrix, int]:
    """Lattice spanned by Z^k and ``gens``, with its index over Z^k."""
    ident = [tuple(int(i == j) for i in range(k)) for j in range(k)]
    lb = _lattice_span(ident + [tuple(c) for c in gens], k)
    index = Fraction(1) / abs(det(lb))
    assert index.denominator == 1
    return lb, int(index)


@dataclass(frozen=True)
class LeafSequence:
    leaf: CosetLeaf
    stabilizer: StabilizerGroup
    leaf_lattice: Matrix  # translation lattice of the leaf, in sat_basis coordinates
    lattice_index: int  # index of Z^n ∩ U in the leaf lattice
    leaf_holonomy: tuple  # distinct restrictions to U, in sat_basis coordinates
    translation_parts: tuple  # per stabilizer entry, (A - I) x0 + a(A) + t_A in U coordinates
    covering_degree: int
    generic: bool
    k_prime_order: int
    holonomy_matches_k_prime: bool

    @property
    def holonomy_order(self) -> int:
        return len(self.leaf_holonomy)

    def leaf_lattice_ambient(self) -> Matrix:
        return self.leaf.vprime.sat_basis @ self.leaf_lattice

    def leaf_group(self, g: CrystGroup) -> CrystGroup:
        """The leaf's own crystallographic group, written in a basis of its lattice."""
        sub = self.leaf.vprime
        lb = self.leaf_lattice
        lb_inv = lb.inverse()
        top, _ = _coordinate_rows(sub)
        gens = []
        for (i, _lam), c in zip(self.stabilizer.entries, self.translation_parts):
            m = top @ g.elements[i] @ sub.sat_basis
            gens.append((lb_inv @ m @ lb, matvec(lb_inv, c)))
        gram = lb.T @ sub.sat_basis.T @ g.gram @ sub.sat_basis @ lb
        return CrystGroup.from_generators(gens, gram=gram, dim=sub.dim)

    def to_json(self) -> dict:
        return {
            "leaf": self.leaf.to_json(),
            "stabilizer_order_mod_lattice": len(self.stabilizer),
            "leaf_lattice": matrix_to_json(self.leaf_lattice),
            "lattice_index": self.lattice_index,
            "leaf_holonomy": [matrix_to_json(m) for m in self.leaf_holonomy],
            "holonomy_order": self.holonomy_order,
            "covering_degree": self.covering_degree,
            "generic": self.generic,
            "k_prime_order": self.k_prime_order,
            "holonomy_matches_k_prime": self.holonomy_matches_k_prime,
        }


def leaf_exact_sequence(leaf: CosetLeaf, g: CrystGroup) -> LeafSequence:
    sub = require_invariant(leaf.vprime, g).base
    k = sub.dim
    stab = coset_stabilizer(leaf, g)
    top, _ = _coordinate_rows(sub)
    ident = Matrix.identity(g.dim)
    ident_k = Matrix.identity(k)
    hol: dict = {}
    trans = []
    lattice_gens = []
    for i, lam in stab.entries:
        a = g.elements[i]
        m = top @ a @ sub.sat_basis
        hol.setdefault(m, None)
        w = vadd(vadd(matvec(a - ident, leaf.basepoint), g.vector_system[i]), lam)
        c = matvec(top, w)
        trans.append(c)
        if m == ident_k:
            lattice_gens.append(c)
    if k:
        lb, index = _rational_lattice(lattice_gens, k)
    else:
        lb, index = Matrix.zeros(0, 0), 1
    kp = k_prime(sub, g)
    kp_images = {top @ g.elements[i] @ sub.sat_basis for i in kp}
    generic = stab.entries == kernel_entries(sub, g).entries
    return LeafSequence(
        leaf=leaf,
        stabilizer=stab,
        leaf_lattice=lb,
        lattice_index=index,
        leaf_holonomy=tuple(hol),
        translation_parts=tuple(trans),
        covering_degree=len(hol) * index,
        generic=generic,
        k_prime_order=len(kp),
        holonomy_matches_k_prime=set(hol) == kp_images,
    )


def stabilizer_index(leaf_a: CosetLeaf, leaf_b: CosetLeaf, g: CrystGroup) -> int:
    """Index of the stabilizer of ``leaf_a`` in that of ``leaf_b`` (cosets of one subspace)."""
    if leaf_a.vprime != leaf_b.vprime:
        raise NotNested("leaves belong to different subspaces")
    sa = coset_stabilizer(leaf_a, g).as_dict()
    sb = coset_stabilizer(leaf_b, g).as_dict()
    for i, lam in sa.items():
        if sb.get(i) != lam:
            raise NotNested(f"element {i} of the first stabilizer is not in the second")
    # each entry stands for one coset of Z^n ∩ U in both groups
    return len(sb) // len(sa)


# --------------------------------------------------------------------------
# leaf space


@dataclass(frozen=True)
class OrbifoldData:
    quotient_dim: int
    complement: Subspace  # G-orthogonal complement modelling Q^n / U
    lattice_basis: Matrix  # translation lattice in complement coordinates
    group: CrystGroup  # quotient group in lattice coordinates
    torsion_free: bool

    @property
    def quotient_point_group(self) -> tuple:
        return self.group.elements

    def to_json(self) -> dict:
        return {
            "quotient_dim": self.quotient_dim,
            "complement": subspace_to_json(self.complement),
            "lattice_basis": matrix_to_json(self.lattice_basis),
            "point_group_order": self.group.order,
            "point_group": [matrix_to_json(m) for m in self.group.elements],
            "vector_system": [vector_to_json(t) for t in self.group.vector_system],
            "gram": matrix_to_json(self.group.gram),
            "torsion_free": self.torsion_free,
        }


def leaf_space_orbifold(vprime, g: CrystGroup) -> OrbifoldData:
    """The crystallographic group acting on the space of cosets, modelled on the G-orthogonal complement W.

    Its translations come from Z^n together with the translation parts of ``k_prime``,
    which act on W by translations too.
    """
    sub = require_invariant(vprime, g).base
    n, k = g.dim, sub.dim
    w = orthogonal_complement(sub, g.gram)
    m = n - k
    if m == 0:
        raise ValueError("the leaf space of the full space is a point")
    frame = sub.sat_basis.hstack(w.sat_basis).inverse()
    proj = Matrix(frame.rows[k:], (m, n))  # W-coordinates of the projection along U
    gens = [proj.col(j) for j in range(n)]
    kp = k_prime(sub, g)
    gens += [matvec(proj, g.vector_system[i]) for i in sorted(kp)]
    lb = _lattice_span(gens, m)
    lb_inv = lb.inverse()
    qgens = []
    for i in g.point_group.generating_indices():
        a = g.elements[i]
        qa = proj @ a @ w.sat_basis
        qgens.append((lb_inv @ qa @ lb, matvec(lb_inv, matvec(proj, g.vector_system[i]))))
    gram = lb.T @ w.sat_basis.T @ g.gram @ w.sat_basis @ lb
    q = CrystGroup.from_generators(qgens, gram=gram, dim=m)
    tf, _ = is_torsion_free(q)
    return OrbifoldData(m, w, lb, q, tf)


# --------------------------------------------------------------------------
# sweeping cosets with bounded denominators


@dataclass
class Stratum:
    elements: frozenset
    count: int  # grid points (grids for different denominators may overlap)
    representative: tuple  # basepoint in ambient coordinates
    sequence: LeafSequence

    @property
    def generic(self) -> bool:
        return self.sequence.generic


@dataclass
class SweepResult:
    strata: list
    points: int
    denominators: tuple
    nongeneric_points: int = 0
    nongeneric_leaves: list = field(default_factory=list)  # one orbit representative per leaf
    special_leaf_points: int = 0
    mask_mismatches: int = 0

    @property
    def nongeneric_off_special_leaf(self) -> int:
        return sum(1 for y in self.nongeneric_leaves if any(x != 0 for x in y))


def _maximal_denominators(max_den: int) -> list[int]:
    ds = range(1, max_den + 1)
    return [d for d in ds if not any(e != d and e % d == 0 for e in ds)]


def _denominator(values) -> int:
    d = 1
    for x in values:
        if isinstance(x, Fraction):
            d = lcm(d, x.denominator)
    return d


def leaf_orbit_key(x0: Sequence, sub: Subspace, g: CrystGroup) -> tuple:
    """Canonical label of the leaf through ``x0``: least image of its coset under the group,
    in coordinates along the complement modulo the lattice."""
    _, bottom = _coordinate_rows(sub)
    return _orbit_key(x0, [(bottom @ a, matvec(bottom, g.vector_system[i])) for i, a in enumerate(g.elements)])


def _orbit_key(x0: Sequence, actions: Sequence) -> tuple:
    from .linalg import frac_mod1

    return min(frac_mod1(vadd(matvec(t, x0), c)) for t, c in actions)


def _orbit_keys_int(t_rows: np.ndarray, offs: np.ndarray, pts: np.ndarray, q: int) -> set:
    """Vectorized ``_orbit_key`` on integer data scaled by ``q``: the image of
    point z under element A is ``(t_rows[A] z + offs[A]) / q`` mod 1."""
    h, mc, _ = t_rows.shape
    imgs = (np.einsum("aij,tj->tai", t_rows, pts) + offs[None, :, :]) % q  # (npts, h, mc)
    if q**mc < 2**62:
        weights = np.array([q ** (mc - 1 - i) for i in range(mc)], dtype=np.int64)
        codes = (imgs @ weights).min(axis=1)
        out = set()
        for c in np.unique(codes).tolist():
            digits = []
            for _ in range(mc):
                c, r = divmod(c, q)
                digits.append(Fraction(r, q))
            out.add(vec(digits[::-1]))
        return out
    return {vec(min(tuple(Fraction(int(x), q) for x in row) for row in img)) for img in imgs}


def sweep_strata(
    vprime,
    g: CrystGroup,
    max_den: int,
    frame: Optional[Matrix] = None,
    chunk: int = 1 << 18,
    spot_checks: int = 3,
) -> SweepResult:
    """Stabilizers of the cosets through x0 = F z, z in (1/D)Z^m ∩ [0,1)^m, D <= max_den.

    ``F`` defaults to the coordinate complement from ``extend_to_basis``.
    Element membership is decided by the mask kernel; each distinct mask is
    recomputed exactly and spot-checked on further points, and non-generic
    points are grouped into leaves by their orbits under the group.
    """
    sub = require_invariant(vprime, g).base
    n, k = g.dim, sub.dim
    if frame is None:
        frame = extend_to_basis(sub).select_columns(range(k, n))
    m = frame.ncols
    _, bottom = _coordinate_rows(sub)
    mc = n - k
    ident = Matrix.identity(n)
    h = g.order
    if h > 62:
        raise ValueError("mask encoding supports point groups of order at most 62")
    r_mats = [bottom @ (a - ident) @ frame for a in g.elements]
    c_vecs = [matvec(bottom, g.vector_system[i]) for i in range(h)]
    s_mat = bottom @ frame
    den_r = _denominator(x for r in r_mats + [s_mat] for row in r.rows for x in row)
    den_c = _denominator(x for c in c_vecs for x in c)
    kern = frozenset(i for i, _ in kernel_entries(sub, g).entries)
    kern_code = sum(1 << i for i in kern)
    weights = np.array([1 << i for i in range(h)], dtype=np.int64)

    def scaled(mat: Matrix, f) -> list:
        return [[int(x * f) for x in row] for row in mat.rows]

    found: dict = {}
    extra: dict = {}
    leaves: set = set()
    total = nongen = on_special = 0
    dens = _maximal_denominators(max_den)
    for d in dens:
        q = lcm(d * den_r, den_c)
        f = Fraction(q, d)
        rows = np.array([scaled(rm, f) for rm in r_mats], dtype=np.int64).reshape(h, mc, m)
        offs = np.array([[int(x * q) for x in c] for c in c_vecs], dtype=np.int64).reshape(h, mc)
        srows = np.broadcast_to(np.array(scaled(s_mat, f), dtype=np.int64).reshape(mc, m), (h, mc, m)).copy()
        npts = d**m
        for start in range(0, npts, chunk):
            rem = np.arange(start, min(start + chunk, npts), dtype=np.int64)
            pts = np.empty((len(rem), m), dtype=np.int64)
            for j in range(m - 1, -1, -1):
                pts[:, j] = rem % d
                rem = rem // d
            masks = kernels.coset_masks(rows, offs, pts, q)
            codes = masks.astype(np.int64) @ weights
            total += len(pts)
            uniq, first, counts = np.unique(codes, return_index=True, return_counts=True)
            for code, fi, cnt in zip(uniq.tolist(), first.tolist(), counts.tolist()):
                if code not in found:
                    found[code] = [cnt, tuple(Fraction(int(x), d) for x in pts[fi])]
                    extra[code] = []
                else:
                    found[code][0] += cnt
                if len(extra[code]) < spot_checks:
                    sel = np.nonzero(codes == code)[0][-1]
                    extra[code].append(tuple(Fraction(int(x), d) for x in pts[sel]))
            bad = np.nonzero(codes != kern_code)[0]
            nongen += len(bad)
            if len(bad):
                leaves.update(_orbit_keys_int(rows + srows, offs, pts[bad], q))
            smask = kernels.coset_masks(srows, -offs, pts, q).any(axis=1)
            on_special += int(smask.sum())
    strata = []
    mismatches = 0
    for code, (cnt, z) in sorted(found.items()):
        elements = frozenset(i for i in range(h) if code >> i & 1)
        leaf = CosetLeaf(sub, matvec(frame, z))
        seq = leaf_exact_sequence(leaf, g)
        if seq.stabilizer.element_set != elements:
            mismatches += 1
        for z2 in extra[code]:
            if coset_stabilizer(CosetLeaf(sub, matvec(frame, z2)), g).element_set != elements:
                mismatches += 1
        strata.append(Stratum(elements, cnt, leaf.basepoint, seq))
    return SweepResult(strata, total, tuple(dens), nongen, sorted(leaves), on_special, mismatches)


def lattice_label(seq: LeafSequence) -> str:
    """Generator of a rank-one leaf lattice, in units of the saturated basis vector."""
    if seq.leaf_lattice.shape != (1, 1):
        raise ValueError("label defined for rank-one leaf lattices only")
    from .linalg import format_rational

    return format_rational(seq.leaf_lattice[0, 0])
