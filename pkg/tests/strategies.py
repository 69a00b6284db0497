"""Hypothesis strategies for small actions and operation tables."""
import numpy as np
from hypothesis import strategies as st

from minclones import group
from minclones.optable import OpTable


@st.composite
def tables(draw, n=None, k=None, max_n=3, max_k=3):
    n = draw(st.integers(1, max_n)) if n is None else n
    k = draw(st.integers(1, max_k)) if k is None else k
    vals = draw(st.lists(st.integers(0, n - 1), min_size=n ** k, max_size=n ** k))
    return OpTable(n, k, vals)


@st.composite
def permutations(draw, n):
    return tuple(draw(st.permutations(list(range(n)))))


@st.composite
def actions(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    gens = draw(st.lists(permutations(n), max_size=2))
    return group.FiniteAction(n, gens)


def small_actions():
    return st.sampled_from([
        group.trivial_action(2),
        group.trivial_action(3),
        group.free_boolean_action(1, 1),
        group.free_boolean_action(2, 1),
        group.free_boolean_action(1, 2),
        group.regular_cyclic_action(3, 1),
        group.FiniteAction(4, [[1, 0, 2, 3]]),
        group.symmetric_action(3),
    ])


def random_table(rng: np.random.Generator, n: int, k: int) -> OpTable:
    return OpTable(n, k, rng.integers(n, size=n ** k))
