import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from minclones import constructions, group, optable
from minclones.optable import OpTable, ArityError, PreconditionError

from strategies import tables


def xor3():
    return OpTable.from_function(2, 3, lambda x, y, z: x ^ y ^ z)


def maj3():
    return OpTable.from_function(2, 3, lambda x, y, z: int(x + y + z >= 2))


def proj(n, k, i):
    return OpTable.projection(n, k, i)


def test_compose_examples():
    assert optable.compose(proj(2, 2, 0), [proj(2, 2, 1), proj(2, 2, 0)]) == proj(2, 2, 1)
    assert optable.compose(xor3(), [proj(2, 3, 0), proj(2, 3, 0), proj(2, 3, 2)]) == proj(2, 3, 2)
    mn = OpTable.from_function(2, 2, min)
    neg = [OpTable.from_function(2, 2, lambda x, y, i=i: 1 - (x, y)[i]) for i in (0, 1)]
    assert optable.compose(mn, neg) == OpTable.from_function(2, 2, lambda x, y: 1 - max(x, y))


def test_minor_examples():
    assert optable.minor(proj(2, 1, 0), [0], 2) == proj(2, 2, 0)
    assert optable.minor(xor3(), [0, 0, 1], 2) == proj(2, 2, 1)
    assert optable.minor(maj3(), [0, 1, 0], 2) == proj(2, 2, 0)


def test_essentially_unary_examples():
    i, u = optable.essentially_unary(proj(2, 3, 1))
    assert i == 1 and list(u.values) == [0, 1]
    assert optable.essentially_unary(OpTable.from_function(2, 2, min)) is None
    i, u = optable.essentially_unary(OpTable.constant(2, 2, 0))
    assert i == 0 and list(u.values) == [0, 0]


def test_identity_predicates():
    assert optable.is_quasi_minority(xor3()) and optable.is_quasi_malcev(xor3())
    assert not optable.is_quasi_majority(xor3())
    assert optable.is_quasi_majority(maj3())
    i, g = optable.is_semiprojection(proj(2, 3, 0))
    assert i == 0 and list(g.values) == [0, 1]
    assert optable.is_semiprojection(xor3()) is None


def test_group_relative_examples():
    klein = group.free_boolean_action(1, 2)
    ksum = constructions.boolean_sum(klein)
    assert optable.is_G_quasi_minority(ksum, klein)
    z2 = group.free_boolean_action(2, 1)
    assert optable.is_odd_majority(constructions.odd_majority(z2), z2)
    t = group.trivial_action(3)
    w = optable.is_orbit_semiprojection(proj(3, 3, 0), t)
    assert w and w.witness == (0, 0)


def test_rosenberg_examples():
    z2 = group.free_boolean_action(1, 1)
    assert optable.rosenberg_type(xor3(), z2) == "G-quasi-minority"
    t3 = group.trivial_action(3)
    osp = constructions.rank_orbit_semiprojection(t3, 3)
    assert optable.rosenberg_type(osp, t3) == "semiprojection"
    a = group.FiniteAction(4, [[1, 0, 2, 3]])
    assert optable.rosenberg_type(constructions.rank_orbit_semiprojection(a, 3), a) \
        == "orbit-semiprojection"
    t2 = group.trivial_action(2)
    assert optable.rosenberg_type(maj3(), t2) == "majority"
    assert optable.rosenberg_type(maj3(), t2, allow_trivial=False) == "unclassified"
    assert optable.rosenberg_type(OpTable.from_function(2, 3, lambda x, y, z: 1 - (x + y + z >= 2)), t2) \
        == "quasi-majority"
    with pytest.raises(PreconditionError):
        optable.rosenberg_type(proj(2, 3, 0), t2)


def test_errors():
    with pytest.raises(ArityError):
        OpTable(2, 2, [0, 1, 0])
    with pytest.raises(ArityError):
        OpTable(2, 1, [0, 2])
    with pytest.raises(ArityError):
        optable.compose(proj(2, 2, 0), [proj(2, 2, 0)])
    with pytest.raises(ArityError):
        optable.parse_op("2")


def test_odd_predicates_need_z2_free():
    k = group.free_boolean_action(1, 2)
    with pytest.raises(PreconditionError):
        optable.is_odd_majority(constructions.boolean_sum(k), k)


def test_text_round_trip():
    f = xor3()
    assert optable.parse_op(f.to_text()) == f


@given(tables())
def test_compose_with_projections_is_identity(f):
    ps = [proj(f.n, f.k, i) for i in range(f.k)]
    assert optable.compose(f, ps) == f


@given(tables(max_k=2), st.data())
def test_compose_is_associative(f, data):
    n = f.n
    gs = [data.draw(tables(n=n, k=2)) for _ in range(f.k)]
    hs = [data.draw(tables(n=n, k=2)) for _ in range(2)]
    left = optable.compose(optable.compose(f, gs), hs)
    right = optable.compose(f, [optable.compose(g, hs) for g in gs])
    assert left == right


@given(tables(), st.data())
def test_minor_matches_compose_with_projections(f, data):
    m = data.draw(st.integers(1, 3))
    vm = data.draw(st.lists(st.integers(0, m - 1), min_size=f.k, max_size=f.k))
    assert optable.minor(f, vm, m) == optable.compose(f, [proj(f.n, m, v) for v in vm])


@given(tables(), st.data())
def test_permutation_round_trip(f, data):
    perm = data.draw(st.permutations(list(range(f.k))))
    inv = [perm.index(i) for i in range(f.k)]
    assert optable.permute_variables(optable.permute_variables(f, perm), inv) == f


@given(tables())
def test_essentially_unary_is_correct(f):
    eu = optable.essentially_unary(f)
    deps = [i for i in range(f.k) if optable.depends_on(f, i)]
    if eu is None:
        assert len(deps) >= 2
    else:
        i, u = eu
        assert len(deps) <= 1 and (not deps or deps == [i])
        assert optable.minor(u, [i], f.k) == f if f.k >= 1 else True


@given(tables(k=3))
def test_predicates_match_pointwise_definitions(f):
    n = f.n
    xs = range(n)
    maj = all(f(x, x, y) == f(x, y, x) == f(y, x, x) == f(x, x, x) for x in xs for y in xs)
    mino = all(f(x, x, y) == f(x, y, x) == f(y, x, x) == f(y, y, y) for x in xs for y in xs)
    malc = all(f(x, x, y) == f(y, x, x) == f(y, y, y) for x in xs for y in xs)
    assert optable.is_quasi_majority(f) == maj
    assert optable.is_quasi_minority(f) == mino
    assert optable.is_quasi_malcev(f) == malc


@given(tables(k=3))
def test_semiprojection_witness(f):
    w = optable.is_semiprojection(f)
    if w is not None:
        i, g = w
        for a in itertools.product(range(f.n), repeat=3):
            if len(set(a)) < 3:
                assert f(*a) == g(a[i])


def test_orbit_semiprojection_witness_is_twisted_projection():
    a = group.FiniteAction(4, [[1, 0, 2, 3]])
    f = constructions.rank_orbit_semiprojection(a, 3)
    i, g = optable.is_orbit_semiprojection(f, a).witness
    orb = a.orbit_of
    for t in itertools.product(range(4), repeat=3):
        if len({orb[v] for v in t}) < 3:
            assert f(*t) == a.perms[g][t[i]]
    weak = optable.is_weak_orbit_semiprojection(f, a)
    assert weak and set(weak.witness) == {(0, 1), (0, 2), (1, 2)}


def test_weak_orbit_semiprojection_on_trivial_actions():
    t2 = group.trivial_action(2)
    assert optable.is_weak_orbit_semiprojection(xor3(), t2)
    t3 = group.trivial_action(3)
    sum3 = OpTable.from_function(3, 3, lambda x, y, z: (x + y + z) % 3)
    assert not optable.is_weak_orbit_semiprojection(sum3, t3)
