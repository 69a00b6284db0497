"""Finite permutation groups acting on B = {0, ..., n-1}.

Groups are stored extensionally: every element is kept as an image tuple,
and products, inverses, orbits and orbitals are precomputed as arrays.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

Permutation = tuple  # tuple[int, ...]; images of 0..n-1

DEFAULT_GROUP_BUDGET = 10_000


class GroupError(ValueError):
    """Invalid permutation data or a group that exceeds its budget."""


def check_permutation(p: Sequence[int], n: int) -> Permutation:
    p = tuple(int(v) for v in p)
    if len(p) != n or sorted(p) != list(range(n)):
        raise GroupError(f"not a permutation of {n} points: {p}")
    return p


def compose(p: Permutation, q: Permutation) -> Permutation:
    """The product ``p q``: first apply ``q``, then ``p``."""
    return tuple(p[x] for x in q)


def inverse(p: Permutation) -> Permutation:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def identity(n: int) -> Permutation:
    return tuple(range(n))


def generate_group(generators: Iterable[Sequence[int]], n: int,
                   budget: int = DEFAULT_GROUP_BUDGET) -> tuple[Permutation, ...]:
    """All elements of the group generated by ``generators``, sorted.

    The identity is always first since it is the lexicographically
    smallest permutation.
    """
    gens = [check_permutation(g, n) for g in generators]
    e = identity(n)
    seen = {e}
    queue = deque([e])
    while queue:
        p = queue.popleft()
        for g in gens:
            q = compose(g, p)
            if q not in seen:
                seen.add(q)
                if len(seen) > budget:
                    raise GroupError(f"group order exceeds budget {budget}")
                queue.append(q)
    return tuple(sorted(seen))


class FiniteAction:
    """A finite permutation group G acting faithfully on {0..n-1}.

    Elements are indexed by their position in ``elements`` (sorted, identity
    at index 0).  ``perms[g, x]`` is the image of ``x`` under element ``g``.
    """

    def __init__(self, n: int, generators: Iterable[Sequence[int]] = (),
                 name: str | None = None, budget: int = DEFAULT_GROUP_BUDGET):
        if n < 1 or n > 256:
            raise GroupError("domain size must be in 1..256")
        self.n = n
        self.generators = tuple(check_permutation(g, n) for g in generators)
        self.elements = generate_group(self.generators, n, budget)
        self.order = len(self.elements)
        self.name = name or f"G(n={n},|G|={self.order})"
        self.index = {p: i for i, p in enumerate(self.elements)}
        self.perms = np.array(self.elements, dtype=np.int64).reshape(self.order, n)
        self.mult = np.array(
            [[self.index[compose(p, q)] for q in self.elements] for p in self.elements],
            dtype=np.int64,
        ).reshape(self.order, self.order)
        self.inv = np.array([self.index[inverse(p)] for p in self.elements], dtype=np.int64)
        self._orbits()
        self._orbitals()
        self._transporter()

    # -- structure -------------------------------------------------------

    def _orbits(self):
        n = self.n
        orbit_of = np.full(n, -1, dtype=np.int64)
        orbits = []
        for x in range(n):
            if orbit_of[x] >= 0:
                continue
            members = sorted(set(self.perms[:, x].tolist()))
            orbit_of[members] = len(orbits)
            orbits.append(tuple(members))
        self.orbit_of = orbit_of
        self.orbits = tuple(orbits)
        self.s = len(orbits)
        self.representatives = tuple(o[0] for o in orbits)

    def _orbitals(self):
        n = self.n
        orbital_of = np.full((n, n), -1, dtype=np.int64)
        orbitals = []
        for a in range(n):
            for b in range(n):
                if orbital_of[a, b] >= 0:
                    continue
                pairs = sorted(set(zip(self.perms[:, a].tolist(), self.perms[:, b].tolist())))
                for u, v in pairs:
                    orbital_of[u, v] = len(orbitals)
                orbitals.append(tuple(pairs))
        self.orbital_of = orbital_of
        self.orbitals = tuple(orbitals)

    def _transporter(self):
        # lowest-index element sending a to b, or -1
        n = self.n
        tr = np.full((n, n), -1, dtype=np.int64)
        for g in range(self.order - 1, -1, -1):
            tr[np.arange(n), self.perms[g]] = g
        self.transporter = tr

    # -- queries ---------------------------------------------------------

    def act(self, g: int, x):
        return self.perms[g][x]

    def same_orbit(self, a: int, b: int) -> bool:
        return bool(self.orbit_of[a] == self.orbit_of[b])

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_transitive(self) -> bool:
        return self.s == 1

    def freeness_witness(self):
        """``None`` if the action is free, else ``(g, x)`` with g != 1 fixing x."""
        for g in range(1, self.order):
            fixed = np.nonzero(self.perms[g] == np.arange(self.n))[0]
            if fixed.size:
                return g, int(fixed[0])
        return None

    def is_free(self) -> bool:
        return self.freeness_witness() is None

    def boolean_witness(self):
        """``None`` if every element squares to 1, else an element that does not."""
        for g in range(self.order):
            if self.mult[g, g] != 0:
                return g
        return None

    def is_boolean(self) -> bool:
        return self.boolean_witness() is None

    def boolean_coordinates(self):
        """Isomorphism with (Z_2)^r for a Boolean group.

        Returns ``(vec, elem)``: ``vec[g]`` is the bit vector of element g and
        ``elem[v]`` the element with bit vector v.  Basis elements are chosen
        greedily in index order.
        """
        if not self.is_boolean():
            raise GroupError("group is not Boolean")
        vec = {0: 0}
        for g in range(self.order):
            if g in vec:
                continue
            bit = len(vec)
            for h, v in list(vec.items()):
                vec[int(self.mult[g, h])] = v | bit
        vec_arr = np.array([vec[g] for g in range(self.order)], dtype=np.int64)
        elem = np.empty(self.order, dtype=np.int64)
        elem[vec_arr] = np.arange(self.order)
        return vec_arr, elem

    def unique_transporter(self, a: int, b: int):
        """Element sending ``a`` to ``b``; requires a free action."""
        g = int(self.transporter[a, b])
        return None if g < 0 else g

    def to_text(self) -> str:
        lines = [str(self.n)]
        gens = self.generators or ()
        lines += [" ".join(map(str, g)) for g in gens]
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"FiniteAction({self.name}, orbits={self.s})"

    def __eq__(self, other):
        return (isinstance(other, FiniteAction) and self.n == other.n
                and self.elements == other.elements)

    def __hash__(self):
        return hash((self.n, self.elements))


def parse_action(text: str, name: str | None = None) -> FiniteAction:
    """Read an action: first line n, then one generator per line."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise GroupError("empty action description")
    try:
        n = int(rows[0][0])
        gens = [[int(v) for v in r] for r in rows[1:]]
    except ValueError as exc:
        raise GroupError(f"malformed action description: {exc}") from None
    return FiniteAction(n, gens, name=name)


# -- standard actions ------------------------------------------------------


def trivial_action(n: int) -> FiniteAction:
    return FiniteAction(n, (), name=f"trivial(n={n})")


def free_boolean_action(s: int, m: int) -> FiniteAction:
    """(Z_2)^m acting freely on s copies of itself.

    Point ``o * 2**m + v`` lies in orbit ``o``; generator ``i`` flips bit ``i``
    of ``v``.
    """
    if s < 1 or m < 0:
        raise GroupError("need s >= 1 and m >= 0")
    size = 2 ** m
    n = s * size
    gens = []
    for i in range(m):
        gens.append([(x // size) * size + ((x % size) ^ (1 << i)) for x in range(n)])
    return FiniteAction(n, gens, name=f"free_boolean(s={s},m={m})")


def regular_cyclic_action(order: int, s: int = 1) -> FiniteAction:
    """Z_order acting freely on s copies of itself by rotation."""
    n = order * s
    gen = [(x // order) * order + (x % order + 1) % order for x in range(n)]
    return FiniteAction(n, [gen] if order > 1 else [], name=f"cyclic(order={order},s={s})")


def symmetric_action(n: int) -> FiniteAction:
    gens = []
    if n > 1:
        gens.append([1, 0] + list(range(2, n)))
        gens.append(list(range(1, n)) + [0])
    return FiniteAction(n, gens, name=f"symmetric(n={n})")
