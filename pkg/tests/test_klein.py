import pytest

from flatleaves.crystal import is_orientable, is_torsion_free, verify_cryst
from flatleaves.errors import DimensionMismatch
from flatleaves.invariant import fixed_subspace, invariant_complement, minimal_decomposition
from flatleaves.klein import build_klein, change_of_basis, divisors, euler_phi, is_prime, klein_expected, shift_matrix
from flatleaves.linalg import Matrix


@pytest.mark.parametrize("n", range(2, 9))
def test_fixture_matches_predictions(klein, n):
    fx = klein(n)
    ex = fx.expected
    g = fx.group
    assert verify_cryst(g).passed
    assert is_torsion_free(g)[0] == ex["torsion_free"]
    assert is_orientable(g) == ex["orientable"]
    assert g.order == ex["point_group_order"]
    assert fixed_subspace(g).base == fx.vprime
    assert invariant_complement(fx.vprime, g).base == fx.vsecond
    assert (fx.vprime.dim, fx.vsecond.dim) == (ex["vprime_dim"], ex["vsecond_dim"])
    assert sorted(minimal_decomposition(g).dims) == ex["decomposition_dims"]
    assert len(ex["stabilizer_translation_groups"]) == ex["decomposition_summands"] == len(divisors(n))


def test_klein2_is_the_reflection():
    g = build_klein(2).group
    assert g.elements[1] == Matrix.diag([1, -1])
    assert g.gram == Matrix.diag([2, 2])


@pytest.mark.parametrize("n", range(2, 9))
def test_basis_change_conjugates_the_shift(n):
    p = change_of_basis(n)
    g = build_klein(n).group
    gen = g.elements[g.point_group.generating_indices()[0]]
    assert p @ gen == shift_matrix(n) @ p
    assert abs(p.det()) == n


def test_arithmetic_helpers():
    assert [euler_phi(k) for k in range(1, 11)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert [k for k in range(20) if is_prime(k)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_rejects_small_n():
    with pytest.raises(DimensionMismatch):
        build_klein(1)
    with pytest.raises(DimensionMismatch):
        klein_expected(0)
