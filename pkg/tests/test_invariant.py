import random
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatleaves import kernels
from flatleaves.corpus import corpus, klein_squared, minus_identity
from flatleaves.crystal import CrystGroup
from flatleaves.errors import NotInvariant
from flatleaves.invariant import (
    averaged_projector,
    averaging_operator,
    commutant_dimension,
    find_proper_invariant,
    fixed_subspace,
    invariant_complement,
    is_invariant,
    minimal_decomposition,
    orbit_span,
    require_invariant,
    restrict_action,
)
from flatleaves.klein import divisors, euler_phi
from flatleaves.lattice import basis_order_key, full_subspace, intersect_subspaces, saturate, span_subspaces
from flatleaves.linalg import Matrix, matvec, rank

GROUPS = {k: v for k, v in corpus().items() if v.dim >= 2}
NAMES = sorted(GROUPS)


def random_invariant(g, r: random.Random):
    v = tuple(r.randint(-3, 3) for _ in range(g.dim))
    if not any(v):
        v = (1,) + v[1:]
    return orbit_span(v, g).base


@given(st.sampled_from(NAMES), st.integers(0, 10**6))
def test_span_and_meet_of_invariants_are_invariant(name, seed):
    g = GROUPS[name]
    r = random.Random(seed)
    a, b = random_invariant(g, r), random_invariant(g, r)
    assert is_invariant(a, g) and is_invariant(b, g)
    assert is_invariant(span_subspaces([a, b]), g)
    assert is_invariant(intersect_subspaces([a, b]), g)


@given(st.sampled_from(NAMES), st.integers(0, 10**6))
def test_averaged_projector_identities(name, seed):
    g = GROUPS[name]
    sub = random_invariant(g, random.Random(seed))
    p = averaged_projector(sub, g)
    assert p @ p == p
    for a in g.elements:
        assert p @ a == a @ p
    assert rank(p) == sub.dim
    for c in sub.basis:
        assert matvec(p, c) == c
    comp = invariant_complement(sub, g)
    assert comp.dim + sub.dim == g.dim
    assert is_invariant(comp, g)
    assert intersect_subspaces([sub, comp.base]).dim == 0


@pytest.mark.parametrize("name", NAMES)
def test_fixed_subspace_matches_averaging_image(name):
    g = GROUPS[name]
    avg = averaging_operator(g)
    oracle = saturate(avg, g.dim) if not avg.is_zero() else None
    fx = fixed_subspace(g)
    if oracle is None:
        assert fx.dim == 0
    else:
        assert fx.base == oracle


def exhaustive_minimum(g, bound: int):
    """Oracle: exact orbit span of every box vector, plus the fixed space and its complement."""
    n = g.dim
    pool = []
    for v in product(range(-bound, bound + 1), repeat=n):
        if any(v):
            s = saturate([matvec(a, v) for a in g.elements], n)
            if 0 < s.dim < n:
                pool.append(s)
    fx = fixed_subspace(g).base
    if 0 < fx.dim < n:
        pool += [fx, invariant_complement(fx, g).base]
    if not pool:
        return None
    return min(pool, key=lambda s: basis_order_key(s.sat_basis))


@pytest.mark.parametrize("name", [k for k in NAMES if GROUPS[k].dim <= 5])
def test_search_agrees_with_exhaustive_orbit_spans(name):
    g = GROUPS[name]
    found = find_proper_invariant(g, bound=2)
    oracle = exhaustive_minimum(g, 2)
    if oracle is None:
        assert found is None
    else:
        assert found.base == oracle


@pytest.mark.parametrize("name", NAMES)
def test_reducibility_gives_complementary_pair(name):
    g = GROUPS[name]
    found = find_proper_invariant(g)
    assert found is not None and 0 < found.dim < g.dim
    comp = invariant_complement(found, g)
    assert 0 < comp.dim < g.dim
    assert span_subspaces([found.base, comp.base]) == full_subspace(g.dim)


def test_rotation_search_finds_nothing():
    rot = CrystGroup.from_generators([(Matrix([[0, -1], [1, 0]], (2, 2)), (0, 0))])
    assert find_proper_invariant(rot, bound=3) is None
    dec = minimal_decomposition(rot)
    assert dec.dims == [2]
    # commutant of the rotation is Q(i), so irreducibility is not certified
    assert dec.summands[0].status == "search-bound-only"


@pytest.mark.parametrize("n", range(2, 9))
def test_klein_decomposition_dims(klein, n):
    g = klein(n).group
    dec = minimal_decomposition(g)
    assert sorted(dec.dims) == sorted(euler_phi(d) for d in divisors(n))
    spaces = [s.space.base for s in dec.summands]
    assert span_subspaces(spaces) == full_subspace(n)
    assert all(is_invariant(s, g) for s in spaces)
    for s in dec.summands:
        act = restrict_action(s.space, g)
        exact = s.space.dim == 1 or commutant_dimension(list(act.matrices)) == 1
        assert s.status == ("certified" if exact else "search-bound-only")
        assert s.status == "certified" or s.bound == 2


@pytest.mark.parametrize("n", range(2, 9))
def test_klein_decomposition_summands_are_minimal(klein, n):
    """Each summand has no proper invariant subspace among exact orbit spans (box 2)."""
    g = klein(n).group
    for s in minimal_decomposition(g).summands:
        act = restrict_action(s.space, g)
        k = act.dim
        if k < 2:
            continue
        for v in product(range(-2, 3), repeat=k):
            if next((x for x in v if x), 0) > 0:  # one vector per +- pair
                assert rank(Matrix.from_columns([matvec(m, v) for m in act.matrices], k)) == k


def test_require_invariant_rejects():
    g = klein_squared()
    with pytest.raises(NotInvariant):
        require_invariant(saturate([(0, 1, 1, 0)], 4), g)


def test_commutant_dimension():
    assert commutant_dimension([Matrix.identity(3)]) == 9
    assert commutant_dimension([Matrix.diag([1, -1])]) == 2
    assert commutant_dimension(list(minus_identity(2).elements)) == 4


def test_orbit_ranks_mod_p_match_exact_rank(klein):
    g = klein(6).group
    import numpy as np

    r = random.Random(7)
    vecs = np.array([[r.randint(-3, 3) for _ in range(6)] for _ in range(50)], dtype=np.int64)
    mats = np.array([m.tolist() for m in g.elements], dtype=np.int64)
    ranks = kernels.orbit_ranks(mats, vecs, kernels.MODULUS_PRIME)
    for v, rk in zip(vecs.tolist(), ranks.tolist()):
        exact = rank(Matrix.from_columns([matvec(m, v) for m in g.elements], 6)) if any(v) else 0
        assert rk == exact
