import itertools

import numpy as np
import pytest
from hypothesis import given

from minclones import group
from minclones.group import GroupError, compose, inverse

from strategies import actions


def test_generate_small_groups():
    assert group.generate_group([[1, 0]], 2) == ((0, 1), (1, 0))
    assert group.generate_group([], 3) == ((0, 1, 2),)
    klein = group.generate_group([[1, 0, 3, 2], [2, 3, 0, 1]], 4)
    assert len(klein) == 4
    assert all(compose(g, g) == (0, 1, 2, 3) for g in klein)


def test_budget_and_bad_permutations():
    with pytest.raises(GroupError):
        group.symmetric_action(6).__class__(6, [[1, 0, 2, 3, 4, 5], [1, 2, 3, 4, 5, 0]], budget=100)
    with pytest.raises(GroupError):
        group.FiniteAction(3, [[0, 0, 1]])
    with pytest.raises(GroupError):
        group.FiniteAction(3, [[0, 1]])


def test_orbits_examples():
    z2 = group.FiniteAction(4, [[1, 0, 3, 2]])
    assert z2.orbits == ((0, 1), (2, 3)) and z2.s == 2
    t = group.trivial_action(3)
    assert t.orbits == ((0,), (1,), (2,)) and t.s == 3
    assert group.free_boolean_action(1, 2).s == 1


def test_boolean_and_free_examples():
    z2 = group.FiniteAction(4, [[1, 0, 3, 2]])
    assert z2.is_boolean() and z2.is_free()
    s3 = group.symmetric_action(3)
    assert not s3.is_boolean() and not s3.is_free()
    z4 = group.regular_cyclic_action(4)
    assert not z4.is_boolean() and z4.is_free()


def test_free_boolean_action_shapes():
    a = group.free_boolean_action(2, 1)
    assert a.n == 4 and a.order == 2 and a.orbits == ((0, 1), (2, 3))
    k = group.free_boolean_action(1, 2)
    assert k.n == 4 and k.order == 4 and k.is_transitive() and k.is_free()
    b = group.free_boolean_action(4, 1)
    assert b.n == 8 and b.s == 4


def test_boolean_coordinates_are_an_isomorphism():
    a = group.free_boolean_action(1, 3)
    vec, elem = a.boolean_coordinates()
    for g, h in itertools.product(range(a.order), repeat=2):
        assert vec[a.mult[g, h]] == vec[g] ^ vec[h]
    assert list(elem[vec]) == list(range(a.order))
    with pytest.raises(GroupError):
        group.regular_cyclic_action(4).boolean_coordinates()


def test_parse_round_trip():
    a = group.free_boolean_action(2, 2)
    b = group.parse_action(a.to_text())
    assert a == b and hash(a) == hash(b)
    with pytest.raises(GroupError):
        group.parse_action("")
    with pytest.raises(GroupError):
        group.parse_action("3\n0 x 2\n")


@given(actions())
def test_group_tables_are_consistent(a):
    e = a.elements[0]
    assert e == tuple(range(a.n))
    for g in range(a.order):
        assert a.mult[g, a.inv[g]] == 0
        assert a.elements[a.inv[g]] == inverse(a.elements[g])
    for g, h in itertools.product(range(a.order), repeat=2):
        assert a.elements[a.mult[g, h]] == compose(a.elements[g], a.elements[h])


@given(actions())
def test_orbits_and_orbitals_partition(a):
    assert sorted(x for o in a.orbits for x in o) == list(range(a.n))
    assert sum(len(o) for o in a.orbitals) == a.n * a.n
    for x in range(a.n):
        for g in range(a.order):
            assert a.orbit_of[a.perms[g][x]] == a.orbit_of[x]
            y = (x + 1) % a.n
            assert a.orbital_of[a.perms[g][x], a.perms[g][y]] == a.orbital_of[x, y]
    # orbit ids follow minimal members
    assert [o[0] for o in a.orbits] == sorted(o[0] for o in a.orbits)


@given(actions())
def test_transporter(a):
    for x, y in itertools.product(range(a.n), repeat=2):
        g = a.transporter[x, y]
        if a.same_orbit(x, y):
            assert g >= 0 and a.perms[g][x] == y
            movers = [h for h in range(a.order) if a.perms[h][x] == y]
            assert g == min(movers)
        else:
            assert g == -1


@given(actions())
def test_freeness_witness(a):
    w = a.freeness_witness()
    fixed = [(g, x) for g in range(1, a.order) for x in range(a.n) if a.perms[g][x] == x]
    assert (w is None) == (not fixed)
    if w is not None:
        g, x = w
        assert a.perms[g][x] == x
