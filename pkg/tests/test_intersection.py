import random

import pytest

from flatleaves.corpus import klein3_times_circle, klein_squared, torus
from flatleaves.crystal import CrystGroup
from flatleaves.errors import CapExceeded
from flatleaves.invariant import find_proper_invariant, invariant_complement
from flatleaves.lattice import saturate
from flatleaves.leaves import CosetLeaf
from flatleaves.linalg import Matrix, det
from flatleaves.intersection import (
    ComplementaryPair,
    FiniteQuotient,
    finite_quotient_oracle,
    generic_pair,
    h_hat_order,
    intersection_inclusion_map,
    leaf_intersection_count,
    split_basis,
    torus_intersection_count,
    torus_point_count,
    validate_pair,
)


def random_splitting(n: int, r: random.Random):
    while True:
        cols = [tuple(r.randint(-3, 3) for _ in range(n)) for _ in range(n)]
        if det(Matrix.from_columns(cols, n)) != 0:
            break
    k = r.randint(1, n - 1)
    return saturate(cols[:k], n), saturate(cols[k:], n)


@pytest.mark.parametrize("n", range(2, 9))
def test_klein_intersections(klein, n):
    fx = klein(n)
    p = generic_pair(fx.vprime, fx.vsecond, fx.group, seed=n)
    assert validate_pair(p, fx.group).passed
    rep = leaf_intersection_count(p, fx.group)
    assert (rep.torus_count, rep.h_hat_order, rep.leaf_count) == (1, n, n)
    assert rep.oracle_count == n and rep.consistent and rep.formula_asserted
    inc = intersection_inclusion_map(p, fx.group)
    assert inc.passed and inc.image_order == 1 and inc.pi_hat_order == n


@pytest.mark.parametrize("seed", range(20))
def test_random_torus_splittings(seed):
    r = random.Random(1000 + seed)
    n = 3 if seed % 2 else 4
    v1, v2 = random_splitting(n, r)
    g = torus(n)
    p = generic_pair(v1, v2, g, seed=seed)
    assert validate_pair(p, g).passed
    rep = leaf_intersection_count(p, g)
    sb = split_basis(p)
    assert rep.leaf_count == rep.torus_count == abs(det(sb)) == torus_point_count(sb) == rep.oracle_count
    assert rep.h_hat_order == 1


def test_torus_index_two_example():
    g = torus(2)
    p = generic_pair(saturate([(1, 0)], 2), saturate([(1, 2)], 2), g)
    assert torus_intersection_count(p) == 2
    assert torus_point_count(split_basis(p)) == 2
    assert leaf_intersection_count(p, g).oracle_count == 2


def test_klein_squared_split():
    g = klein_squared()
    v1 = saturate([(1, 0, 0, 0)], 4)
    v2 = invariant_complement(v1, g).base
    p = generic_pair(v1, v2, g, seed=2)
    rep = leaf_intersection_count(p, g)
    assert rep.consistent and rep.leaf_count == 2


def test_klein_squared_product_split_has_trivial_quotient():
    g = klein_squared()
    v1 = saturate([(1, 0, 0, 0), (0, 1, 0, 0)], 4)
    v2 = saturate([(0, 0, 1, 0), (0, 0, 0, 1)], 4)
    p = generic_pair(v1, v2, g, seed=4)
    assert validate_pair(p, g).passed
    assert h_hat_order(p, g) == 1
    assert leaf_intersection_count(p, g).oracle_count == 1
    # splitting off the fixed directions instead leaves every element unused
    w1 = saturate([(1, 0, 0, 0), (0, 0, 1, 0)], 4)
    w2 = saturate([(0, 1, 0, 0), (0, 0, 0, 1)], 4)
    q = generic_pair(w1, w2, g, seed=4)
    rep = leaf_intersection_count(q, g)
    assert rep.h_hat_order == 4 and rep.consistent


def test_klein3_times_circle():
    g = klein3_times_circle()
    v1 = find_proper_invariant(g).base
    v2 = invariant_complement(v1, g).base
    p = generic_pair(v1, v2, g)
    rep = leaf_intersection_count(p, g)
    assert rep.consistent and rep.leaf_count == 3


def test_validation_reports_failures(klein):
    fx = klein(3)
    p = ComplementaryPair(fx.vprime, fx.vprime, CosetLeaf(fx.vprime, (0, 0, 0)), CosetLeaf(fx.vprime, (0, 0, 0)))
    rep = validate_pair(p, fx.group)
    assert not rep["dimensions"].passed
    assert not rep["trivial_intersection"].passed
    special = ComplementaryPair(fx.vprime, fx.vsecond, CosetLeaf(fx.vprime, (0, 0, 0)), CosetLeaf(fx.vsecond, (0, 0, 0)))
    rep = validate_pair(special, fx.group)
    assert not rep["generic"].passed
    assert not leaf_intersection_count(special, fx.group).formula_asserted


def test_quotient_cap(klein):
    fx = klein(3)
    with pytest.raises(CapExceeded):
        FiniteQuotient(fx.group, Matrix.diag([50, 50, 50]), cap=1000)


def test_finite_quotient_group_axioms(klein):
    fx = klein(3)
    q = FiniteQuotient(fx.group, Matrix.diag([2, 1, 1]))
    els = list(q.closure([q.element(i, (0, 0, 0)) for i in range(3)] + q.translations()))
    assert len(els) == q.order == 6
    r = random.Random(3)
    for _ in range(50):
        x, y, z = (r.choice(els) for _ in range(3))
        assert q.mul(q.mul(x, y), z) == q.mul(x, q.mul(y, z))
        assert q.mul(q.identity, x) == x
