from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatleaves.errors import DimensionMismatch, NotSaturated
from flatleaves.linalg import Matrix, det, snf
from flatleaves.lattice import (
    basis_order_key,
    extend_to_basis,
    full_subspace,
    intersect_subspaces,
    is_direct_summand,
    quotient_data,
    saturate,
    span_subspaces,
    sublattice_index,
    subspace_from_json,
    subspace_to_json,
    zero_subspace,
)


def columns(n, max_cols=3):
    return st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=1, max_size=max_cols)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), columns(n))))
def test_saturation_idempotent(data):
    n, cols = data
    s = saturate(cols, n)
    assert saturate(s.sat_basis) == s
    assert all(s.contains(c) for c in cols)
    assert is_direct_summand(s.sat_basis, Matrix.identity(n))


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), columns(n, 4))))
def test_direct_summand_iff_unit_divisors(data):
    n, cols = data
    m = Matrix.from_columns(cols, n)
    divs = [d for d in snf(m).divisors if d != 0]
    independent = len(divs) == m.ncols
    expected = independent and all(d == 1 for d in divs)
    if independent:
        assert is_direct_summand(m, Matrix.identity(n)) == expected


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), columns(n))))
def test_extend_to_basis_unimodular(data):
    n, cols = data
    s = saturate(cols, n)
    u = extend_to_basis(s)
    assert abs(det(u)) == 1
    assert u.select_columns(range(s.dim)) == s.sat_basis


def test_extend_requires_saturation():
    from flatleaves.lattice import Subspace

    with pytest.raises(NotSaturated):
        extend_to_basis(Subspace(2, Matrix([[2], [0]], (2, 1))))


def test_rational_generators_are_cleared():
    s = saturate([(Fraction(1, 2), Fraction(1, 3))], 2)
    assert s == saturate([(3, 2)], 2)


def test_span_and_intersection_dimensions():
    a = saturate([(1, 0, 0), (0, 1, 0)], 3)
    b = saturate([(0, 1, 0), (0, 0, 1)], 3)
    assert span_subspaces([a, b]) == full_subspace(3)
    assert intersect_subspaces([a, b]) == saturate([(0, 1, 0)], 3)
    assert intersect_subspaces([a, zero_subspace(3)]).dim == 0
    with pytest.raises(DimensionMismatch):
        span_subspaces([a, full_subspace(2)])


def test_sublattice_index():
    assert sublattice_index(Matrix([[2, 0], [0, 3]], (2, 2)), Matrix.identity(2)) == 6
    assert sublattice_index(Matrix([[1, 1], [1, -1]], (2, 2)), Matrix.identity(2)) == 2
    assert sublattice_index(Matrix([[1], [0]], (2, 1)), Matrix.identity(2)) == 0


def test_quotient_is_free():
    q = quotient_data(saturate([(1, 1, 0)], 3))
    assert q.rank == 2 and q.index == 0
    assert q.coordinates((1, 1, 0)) == (0, 0)
    assert quotient_data(full_subspace(2)).index == 1


def test_order_key_prefers_early_pivot_and_positive():
    a = Matrix([[1], [0]], (2, 1))
    b = Matrix([[0], [1]], (2, 1))
    c = Matrix([[-1], [0]], (2, 1))
    assert basis_order_key(a) < basis_order_key(b)
    assert basis_order_key(a) < basis_order_key(c)


def test_subspace_json_roundtrip():
    s = saturate([(1, 2, 3), (0, 1, 1)], 3)
    assert subspace_from_json(subspace_to_json(s)) == s
    z = zero_subspace(2)
    assert subspace_from_json(subspace_to_json(z)) == z
