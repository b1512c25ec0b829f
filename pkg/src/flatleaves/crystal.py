"""Crystallographic groups in lattice-adapted coordinates.

The lattice is Z^n, the point group H is a finite subgroup of GL(n, Z), and
the group itself is ``{(A, a(A) + t) : A in H, t in Z^n}`` acting on Q^n by
``x -> A x + a(A) + t``. The metric enters only through a rational Gram
matrix preserved by H.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import CapExceeded, InconsistentVectorSystem, NotUnimodular, SchemaError
from .linalg import (
    Matrix,
    det,
    frac_mod1,
    integer_solve,
    is_integral_vector,
    matrix_from_json,
    matrix_to_json,
    matvec,
    vadd,
    vec,
    vector_from_json,
    vector_to_json,
    vneg,
)

DEFAULT_CAP = 100_000


@dataclass(frozen=True)
class PointGroup:
    dim: int
    elements: tuple  # tuple[Matrix, ...]
    identity_index: int
    generators: tuple = ()  # indices of a generating set
    _index: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self._index is None:
            object.__setattr__(self, "_index", {m: i for i, m in enumerate(self.elements)})

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, m: Matrix) -> int:
        return self._index[m]

    def find(self, m: Matrix) -> Optional[int]:
        return self._index.get(m)

    def mul(self, i: int, j: int) -> int:
        return self._index[self.elements[i] @ self.elements[j]]

    def inv(self, i: int) -> int:
        return self._index[self.elements[i].inverse()]

    @property
    def multiplication_table(self) -> tuple:
        return tuple(tuple(self.mul(i, j) for j in range(self.order)) for i in range(self.order))

    def generating_indices(self) -> tuple:
        return self.generators or tuple(range(self.order))

    def closure_of(self, indices: Iterable[int]) -> frozenset:
        """Indices of the subgroup generated by ``indices``."""
        gens = [i for i in set(indices) if i != self.identity_index]
        seen = {self.identity_index}
        queue = deque([self.identity_index])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != self.identity_index:
            x = self.mul(x, i)
            k += 1
        return k


def _check_generator(m: Matrix, n: int) -> None:
    if m.shape != (n, n):
        raise SchemaError(f"generator of shape {m.shape} in dimension {n}")
    if not m.is_integral():
        raise NotUnimodular("generator matrices must be integral")
    if abs(det(m)) != 1:
        raise NotUnimodular(f"generator {m.tolist()} has determinant {det(m)}")


def close_group(generators: Sequence[Matrix], cap: int = DEFAULT_CAP, dim: Optional[int] = None) -> PointGroup:
    """Smallest set of matrices closed under products containing ``generators``."""
    if dim is None:
        if not generators:
            raise SchemaError("dimension needed for an empty generator list")
        dim = generators[0].nrows
    for g in generators:
        _check_generator(g, dim)
    ident = Matrix.identity(dim)
    elements = [ident]
    index = {ident: 0}
    queue = deque([ident])
    gens = list(dict.fromkeys(generators))
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x @ g
            if y not in index:
                if len(elements) >= cap:
                    raise CapExceeded(f"point group exceeds {cap} elements")
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)
    return PointGroup(dim, tuple(elements), 0, tuple(index[g] for g in gens), index)


@dataclass(frozen=True)
class AffineElement:
    linear: Matrix
    translation: tuple

    def __matmul__(self, other: "AffineElement") -> "AffineElement":
        return mul(self, other)

    def apply(self, x: Sequence) -> tuple:
        return vadd(matvec(self.linear, x), self.translation)


def mul(x: AffineElement, y: AffineElement) -> AffineElement:
    return AffineElement(x.linear @ y.linear, vadd(matvec(x.linear, y.translation), x.translation))


def inv(x: AffineElement) -> AffineElement:
    ai = x.linear.inverse()
    return AffineElement(ai, vneg(matvec(ai, x.translation)))


@dataclass(frozen=True)
class CrystGroup:
    dim: int
    point_group: PointGroup
    gram: Matrix
    vector_system: tuple  # vector_system[i] represents a(elements[i]) in [0, 1)^n
    generators: tuple = ()  # ((Matrix, translation), ...) as supplied

    @property
    def elements(self) -> tuple:
        return self.point_group.elements

    @property
    def order(self) -> int:
        return self.point_group.order

    def a(self, i: int) -> tuple:
        return self.vector_system[i]

    def element(self, i: int, lam: Sequence[int] | None = None) -> AffineElement:
        t = self.vector_system[i] if lam is None else vadd(self.vector_system[i], lam)
        return AffineElement(self.elements[i], t)

    def generator_elements(self) -> list[AffineElement]:
        return [self.element(i) for i in self.point_group.generating_indices()]

    @classmethod
    def from_generators(
        cls,
        generators: Sequence[tuple[Matrix, Sequence]],
        gram: Optional[Matrix] = None,
        dim: Optional[int] = None,
        cap: int = DEFAULT_CAP,
    ) -> "CrystGroup":
        """Close the point group and induce the vector system from affine
        generators ``(A, b)``; inconsistent translations are rejected."""
        gens = [(m, vec(t)) for m, t in generators]
        if dim is None:
            if not gens:
                raise SchemaError("dimension needed for an empty generator list")
            dim = gens[0][0].nrows
        for m, t in gens:
            if len(t) != dim:
                raise SchemaError(f"translation of length {len(t)} in dimension {dim}")
        pg = close_group([m for m, _ in gens], cap=cap, dim=dim)
        a: list = [None] * pg.order
        a[pg.identity_index] = (0,) * dim
        queue = deque([pg.identity_index])
        while queue:
            i = queue.popleft()
            x = pg.elements[i]
            for m, t in gens:
                j = pg.index(x @ m)
                # (X, a(X)) (m, t) = (X m, X t + a(X))
                cand = frac_mod1(vadd(matvec(x, t), a[i]))
                if a[j] is None:
                    a[j] = cand
                    queue.append(j)
                elif a[j] != cand:
                    raise InconsistentVectorSystem(
                        f"translation of element {pg.elements[j].tolist()} is not well defined mod Z^{dim}"
                    )
        if gram is None:
            gram = Matrix.identity(dim)
        return cls(dim, pg, gram, tuple(a), tuple((m, t) for m, t in gens))

    def to_document(self) -> dict:
        gens = self.generators or tuple(
            (self.elements[i], self.vector_system[i]) for i in self.point_group.generating_indices()
        )
        return {
            "dim": self.dim,
            "gram": matrix_to_json(self.gram),
            "generators": [
                {"matrix": matrix_to_json(m), "translation": vector_to_json(t)} for m, t in gens
            ],
        }


def group_from_document(doc: dict, cap: int = DEFAULT_CAP) -> CrystGroup:
    if not isinstance(doc, dict):
        raise SchemaError("group document must be a JSON object")
    try:
        n = int(doc["dim"])
        raw_gens = doc["generators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"missing or bad field: {exc}") from exc
    if n < 1:
        raise SchemaError("dim must be positive")
    if not isinstance(raw_gens, list):
        raise SchemaError("generators must be an array")
    gens = []
    for g in raw_gens:
        if not isinstance(g, dict) or "matrix" not in g:
            raise SchemaError("each generator needs a matrix")
        m = matrix_from_json(g["matrix"])
        t = vector_from_json(g.get("translation", ["0"] * n))
        gens.append((m, t))
    gram = matrix_from_json(doc["gram"]) if doc.get("gram") is not None else None
    if gram is not None and gram.shape != (n, n):
        raise SchemaError(f"gram of shape {gram.shape} in dimension {n}")
    return CrystGroup.from_generators(gens, gram=gram, dim=n, cap=cap)


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


# --------------------------------------------------------------------------
# verification


@dataclass
class Check:
    name: str
    passed: bool
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "failures": self.failures[:20]}


@dataclass
class Report:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def _positive_definite(g: Matrix) -> bool:
    n = g.nrows
    return all(det(Matrix((g.row(i)[:k] for i in range(k)), (k, k))) > 0 for k in range(1, n + 1))


def verify_cryst(g: CrystGroup) -> Report:
    """Check every structural identity of ``g``; failures name the offenders."""
    n = g.dim
    els = g.elements
    pg = g.point_group
    checks = []

    bad = [i for i, m in enumerate(els) if not m.is_integral() or abs(det(m)) != 1]
    checks.append(Check("integral_unimodular", not bad, [els[i].tolist() for i in bad]))

    ident = pg.identity_index
    ok_id = els[ident] == Matrix.identity(n)
    checks.append(Check("identity", ok_id, [] if ok_id else ["identity element missing"]))

    closure_fail = []
    for i in range(len(els)):
        if pg.find(els[i].inverse()) is None:
            closure_fail.append(["inverse", i])
        for j in range(len(els)):
            if pg.find(els[i] @ els[j]) is None:
                closure_fail.append(["product", i, j])
    checks.append(Check("closure", not closure_fail, closure_fail))

    gram = g.gram
    sym = gram == gram.T
    pd = sym and _positive_definite(gram)
    checks.append(Check("gram_positive_definite", pd, [] if pd else [matrix_to_json(gram)]))

    iso_fail = [i for i, m in enumerate(els) if m.T @ gram @ m != gram]
    checks.append(Check("isometry", not iso_fail, iso_fail))

    a = g.vector_system
    id_ok = is_integral_vector(a[ident])
    checks.append(Check("vector_system_identity", id_ok, [] if id_ok else [vector_to_json(a[ident])]))

    cocycle_fail = []
    if not closure_fail:
        for i, x in enumerate(els):
            for j, y in enumerate(els):
                k = pg.mul(i, j)
                diff = vadd(vadd(matvec(x, a[j]), a[i]), vneg(a[k]))
                if not is_integral_vector(diff):
                    cocycle_fail.append([i, j])
    checks.append(Check("cocycle", not cocycle_fail and not closure_fail, cocycle_fail))
    return Report(checks)


def norm_map(m: Matrix, order: int) -> Matrix:
    """I + A + ... + A^(order-1)."""
    n = m.nrows
    acc = Matrix.identity(n)
    p = Matrix.identity(n)
    for _ in range(order - 1):
        p = p @ m
        acc = acc + p
    return acc


def is_torsion_free(g: CrystGroup) -> tuple[bool, Optional[AffineElement]]:
    """Decide torsion-freeness; on failure also return an element of finite order.

    An element with linear part A of order m and translation t has m-th power
    the translation by ``N_A t``. Lifts of A differ by integer vectors, so
    torsion exists iff ``N_A x = -N_A t`` is solvable in integers for some
    ``A != I``.
    """
    pg = g.point_group
    for i in range(pg.order):
        if i == pg.identity_index:
            continue
        m = pg.element_order(i)
        na = norm_map(pg.elements[i], m)
        rhs = vneg(matvec(na, g.vector_system[i]))
        sol = integer_solve(na, rhs)
        if sol is not None:
            return False, g.element(i, sol.x)
    return True, None


def is_orientable(g: CrystGroup) -> bool:
    return all(det(m) == 1 for m in g.elements)


def identity_element(n: int) -> AffineElement:
    return AffineElement(Matrix.identity(n), (0,) * n)


def power(x: AffineElement, k: int) -> AffineElement:
    out = identity_element(x.linear.nrows)
    for _ in range(k):
        out = mul(out, x)
    return out


def translation_vector(values: Sequence) -> tuple:
    return tuple(Fraction(v) if not isinstance(v, int) else v for v in values)
