"""Generalized Klein bottle groups in lattice-adapted coordinates.

The group acts on functions ``f: Z/n -> R`` by ``f -> f∘r + t`` with ``r`` the
cyclic shift and ``t`` a constant. We pass once to the lattice basis
``v1 = 1`` (the constant function) and ``psi_k = e_k - e_0``, k = 1..n-1,
so the lattice becomes Z^n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .crystal import CrystGroup
from .errors import DimensionMismatch
from .lattice import Subspace, saturate
from .linalg import Matrix


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n**0.5) + 1))


def change_of_basis(n: int) -> Matrix:
    """Columns: v1 and psi_1 .. psi_{n-1}, written in the point basis of R^(Z/n)."""
    cols = [tuple([1] * n)]
    for k in range(1, n):
        cols.append(tuple(1 if j == k else (-1 if j == 0 else 0) for j in range(n)))
    return Matrix.from_columns(cols, n)


def shift_matrix(n: int) -> Matrix:
    """(R f)(j) = f(j + 1 mod n) in the point basis."""
    return Matrix([[1 if i == (j - 1) % n else 0 for i in range(n)] for j in range(n)], (n, n))


def point_frame(n: int) -> Matrix:
    """Point functions e_1 .. e_{n-1} in lattice coordinates; with f(0) = 0 they
    parametrize cosets of the constants by the values of f."""
    p_inv = change_of_basis(n).inverse()
    return Matrix.from_columns([p_inv.col(j) for j in range(1, n)], n)


@dataclass(frozen=True)
class KleinFixture:
    n: int
    group: CrystGroup
    vprime: Subspace  # constant functions
    vsecond: Subspace  # zero-average functions
    basis_change: Matrix  # lattice basis in point coordinates, kept for audit
    expected: dict


def build_klein(n: int) -> KleinFixture:
    if n < 2:
        raise DimensionMismatch("the Klein family starts at n = 2")
    p = change_of_basis(n)
    gen = p.inverse() @ shift_matrix(n) @ p
    assert gen.is_integral()
    gram = p.T @ p
    translation = (Fraction(1, n),) + (0,) * (n - 1)
    group = CrystGroup.from_generators([(gen, translation)], gram=gram, dim=n)
    e = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    vprime = saturate([e[0]], n)
    vsecond = saturate(e[1:], n)
    return KleinFixture(n, group, vprime, vsecond, p, klein_expected(n))


def klein_expected(n: int) -> dict:
    """Closed-form predictions for the Klein family, used as golden values."""
    if n < 2:
        raise DimensionMismatch("the Klein family starts at n = 2")
    divs = divisors(n)
    return {
        "n": n,
        "point_group_order": n,
        "torsion_free": True,
        "orientable": n % 2 == 1,
        "vprime_dim": 1,
        "vsecond_dim": n - 1,
        # generic stabilizers: pure translations by the lattice of each factor
        "generic_vprime_translation_rank": 1,
        "generic_vprime_leaf_lattice": ["1"],
        "generic_vprime_holonomy_order": 1,
        "generic_vsecond_translation_rank": n - 1,
        "generic_vsecond_holonomy_order": 1,
        # translation groups of stabilizers of cosets of the constants: (d/n)Z for d | n
        "stabilizer_translation_groups": [f"{d}/{n}" if d != n else "1" for d in divs],
        "stratum_dims": {str(d): d for d in divs},
        "unique_nongeneric_leaf": is_prime(n),
        "special_leaf_lattice": [f"1/{n}"],
        "special_leaf_degree": n,
        "decomposition_summands": len(divs),
        "decomposition_dims": sorted(euler_phi(d) for d in divs),
        "torus_count": 1,
        "h_hat_order": n,
        "leaf_count": n,
    }
