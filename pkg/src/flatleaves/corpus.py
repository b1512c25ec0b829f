"""Small named groups used by the tests and the documentation."""

from __future__ import annotations

from .crystal import CrystGroup
from .klein import build_klein
from .linalg import Matrix


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    n, m = a.nrows, b.nrows
    rows = [tuple(a.row(i)) + (0,) * m for i in range(n)]
    rows += [(0,) * n + tuple(b.row(i)) for i in range(m)]
    return Matrix(rows, (n + m, n + m))


def direct_product(g1: CrystGroup, g2: CrystGroup) -> CrystGroup:
    """Product group acting on the orthogonal sum; generators of each factor
    act trivially on the other."""
    n1, n2 = g1.dim, g2.dim
    gens = []
    for m, t in g1.generators:
        gens.append((block_diag(m, Matrix.identity(n2)), tuple(t) + (0,) * n2))
    for m, t in g2.generators:
        gens.append((block_diag(Matrix.identity(n1), m), (0,) * n1 + tuple(t)))
    return CrystGroup.from_generators(gens, gram=block_diag(g1.gram, g2.gram), dim=n1 + n2)


def torus(n: int) -> CrystGroup:
    return CrystGroup.from_generators([], dim=n)


def circle() -> CrystGroup:
    return torus(1)


def minus_identity(n: int) -> CrystGroup:
    """Z^n with point group {±I} and zero translations (not torsion-free)."""
    return CrystGroup.from_generators([(Matrix.identity(n).scale(-1), (0,) * n)], dim=n)


def klein_squared() -> CrystGroup:
    k = build_klein(2).group
    return direct_product(k, k)


def klein3_times_circle() -> CrystGroup:
    return direct_product(build_klein(3).group, circle())


def corpus() -> dict:
    out = {f"klein{n}": build_klein(n).group for n in range(2, 9)}
    out["klein2xklein2"] = klein_squared()
    out["klein3xcircle"] = klein3_times_circle()
    for n in (2, 3, 4):
        out[f"pm_identity{n}"] = minus_identity(n)
    out["torus3"] = torus(3)
    return out
