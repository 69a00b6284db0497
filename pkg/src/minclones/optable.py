"""Finitary operations on {0..n-1} as dense value tables.

Values are stored row-major over argument tuples with the last argument
varying fastest, so ``values[a1*n**(k-1) + ... + ak] == f(a1, ..., ak)``.
"""
from __future__ import annotations

import itertools
from functools import cached_property
from typing import Callable, Sequence

import numpy as np


class ArityError(ValueError):
    """Operations with incompatible domain sizes or arities."""


class PreconditionError(ValueError):
    """A predicate was asked about an input outside its scope."""


class OpTable:
    """An immutable k-ary operation on an n-element set."""

    def __init__(self, n: int, k: int, values):
        if k < 1:
            raise ArityError("arity must be at least 1")
        vals = np.array(values, dtype=np.uint8).reshape(-1)
        if vals.size != n ** k:
            raise ArityError(f"expected {n ** k} values for n={n}, k={k}, got {vals.size}")
        if vals.size and int(vals.max()) >= n:
            raise ArityError(f"value {int(vals.max())} out of range for n={n}")
        vals.setflags(write=False)
        self.n = n
        self.k = k
        self.values = vals
        self._key = vals.tobytes()

    @classmethod
    def from_function(cls, n: int, k: int, fn: Callable[..., int]) -> "OpTable":
        return cls(n, k, [fn(*a) for a in itertools.product(range(n), repeat=k)])

    @classmethod
    def projection(cls, n: int, k: int, i: int) -> "OpTable":
        if not 0 <= i < k:
            raise ArityError(f"projection index {i} out of range for arity {k}")
        return cls(n, k, _coordinate(n, k, i))

    @classmethod
    def constant(cls, n: int, k: int, c: int) -> "OpTable":
        return cls(n, k, np.full(n ** k, c, dtype=np.uint8))

    @classmethod
    def unary(cls, image: Sequence[int]) -> "OpTable":
        return cls(len(image), 1, image)

    # -- evaluation --------------------------------------------------------

    def __call__(self, *args) -> int:
        if len(args) != self.k:
            raise ArityError(f"expected {self.k} arguments")
        code = 0
        for a in args:
            code = code * self.n + int(a)
        return int(self.values[code])

    @cached_property
    def cube(self) -> np.ndarray:
        """Values as a k-dimensional array indexed by the arguments."""
        return self.values.reshape((self.n,) * self.k)

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, OpTable) and self.n == other.n and self.k == other.k
                and self._key == other._key)

    def __hash__(self):
        return hash((self.n, self.k, self._key))

    def sort_key(self):
        return (self.k, self._key)

    def __lt__(self, other: "OpTable"):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        if self.values.size <= 16:
            return f"OpTable(n={self.n}, k={self.k}, {self.values.tolist()})"
        return f"OpTable(n={self.n}, k={self.k}, <{self.values.size} values>)"

    def to_text(self) -> str:
        return f"{self.n} {self.k}\n" + " ".join(map(str, self.values.tolist())) + "\n"


def parse_op(text: str) -> OpTable:
    """Read the ``n k`` header followed by n**k values."""
    tokens = text.split()
    if len(tokens) < 2:
        raise ArityError("operation text needs an 'n k' header")
    try:
        n, k = int(tokens[0]), int(tokens[1])
        vals = [int(t) for t in tokens[2:]]
    except ValueError as exc:
        raise ArityError(f"malformed operation text: {exc}") from None
    return OpTable(n, k, vals)


def _coordinate(n: int, k: int, i: int) -> np.ndarray:
    """Array over B^k (flattened) giving the i-th argument of each tuple."""
    return np.repeat(np.tile(np.arange(n, dtype=np.uint8), n ** i), n ** (k - 1 - i))


def argument_grid(n: int, k: int) -> np.ndarray:
    """Array of shape (k, n**k): row i holds coordinate i of every tuple."""
    if k == 0:
        return np.zeros((0, 1), dtype=np.int64)
    return np.stack([_coordinate(n, k, i).astype(np.int64) for i in range(k)])


def encode(n: int, args) -> np.ndarray:
    """Flat table index for a sequence of equal-shaped argument arrays."""
    code = np.zeros(np.shape(args[0]), dtype=np.int64)
    for a in args:
        code = code * n + np.asarray(a, dtype=np.int64)
    return code


# -- composition ----------------------------------------------------------


def compose(f: OpTable, gs: Sequence[OpTable]) -> OpTable:
    """The m-ary operation x -> f(g1(x), ..., gk(x))."""
    if len(gs) != f.k:
        raise ArityError(f"need {f.k} inner operations, got {len(gs)}")
    if not gs:
        raise ArityError("empty composition")
    m = gs[0].k
    for g in gs:
        if g.n != f.n or g.k != m:
            raise ArityError("inner operations must share domain and arity")
    code = encode(f.n, [g.values for g in gs])
    return OpTable(f.n, m, f.values[code])


def minor(f: OpTable, var_map: Sequence[int], m: int) -> OpTable:
    """Rename variables: result(x_0..x_{m-1}) = f(x_{var_map[0]}, ..., x_{var_map[k-1]})."""
    if len(var_map) != f.k:
        raise ArityError(f"variable map must have length {f.k}")
    if any(not 0 <= v < m for v in var_map):
        raise ArityError(f"variable map {list(var_map)} has an index outside 0..{m - 1}")
    grid = argument_grid(f.n, m)
    return OpTable(f.n, m, f.values[encode(f.n, [grid[v] for v in var_map])])


def apply_unary(g: OpTable | Sequence[int], f: OpTable) -> OpTable:
    """g o f for a unary g given as a table or an image sequence."""
    image = np.asarray(g.values if isinstance(g, OpTable) else g)
    return OpTable(f.n, f.k, image[f.values])


def permute_variables(f: OpTable, perm: Sequence[int]) -> OpTable:
    """f with argument i fed by variable perm[i]."""
    return minor(f, perm, f.k)


# -- dependence -------------------------------------------------------------


def depends_on(f: OpTable, i: int) -> bool:
    c = f.cube
    first = np.take(c, [0], axis=i)
    return not bool(np.all(c == first))


def essentially_unary(f: OpTable):
    """``(i, g)`` with f(x) = g(x_i), lowest such i; ``None`` if f is essential."""
    deps = [i for i in range(f.k) if depends_on(f, i)]
    if len(deps) > 1:
        return None
    i = deps[0] if deps else 0
    index = [0] * f.k
    index[i] = slice(None)
    return i, OpTable(f.n, 1, f.cube[tuple(index)])


def is_essential(f: OpTable) -> bool:
    return essentially_unary(f) is None


# -- identity predicates -----------------------------------------------------


def _need_arity(f: OpTable, k: int, what: str):
    if f.k != k:
        raise ArityError(f"{what} needs arity {k}, got {f.k}")


def _xy(n):
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return x.ravel(), y.ravel()


def diagonal(f: OpTable) -> np.ndarray:
    """The unary map x -> f(x, ..., x)."""
    return f.cube[(np.arange(f.n),) * f.k]


def is_idempotent(f: OpTable) -> bool:
    return bool(np.all(diagonal(f) == np.arange(f.n)))


def _all_equal(*arrays) -> bool:
    return all(bool(np.all(arrays[0] == a)) for a in arrays[1:])


def is_quasi_majority(f: OpTable) -> bool:
    """m(x,x,y) = m(x,y,x) = m(y,x,x) = m(x,x,x)."""
    _need_arity(f, 3, "quasi-majority")
    c = f.cube
    x, y = _xy(f.n)
    return _all_equal(c[x, x, y], c[x, y, x], c[y, x, x], c[x, x, x])


def is_quasi_minority(f: OpTable) -> bool:
    """m(y,x,x) = m(x,y,x) = m(x,x,y) = m(y,y,y)."""
    _need_arity(f, 3, "quasi-minority")
    c = f.cube
    x, y = _xy(f.n)
    return _all_equal(c[y, x, x], c[x, y, x], c[x, x, y], c[y, y, y])


def is_quasi_malcev(f: OpTable) -> bool:
    """M(x,y,y) = M(y,y,x) = M(x,x,x)."""
    _need_arity(f, 3, "quasi-Malcev")
    c = f.cube
    x, y = _xy(f.n)
    return _all_equal(c[x, y, y], c[y, y, x], c[x, x, x])


def non_injective_mask(n: int, k: int) -> np.ndarray:
    grid = argument_grid(n, k)
    mask = np.zeros(n ** k, dtype=bool)
    for i, j in itertools.combinations(range(k), 2):
        mask |= grid[i] == grid[j]
    return mask


def is_semiprojection(f: OpTable):
    """``(i, g)`` with f(a) = g(a_i) on every non-injective tuple, else ``None``.

    This is the quasi form: g may be any unary map.  Values of g at points
    that never occur as a_i of a non-injective tuple are taken from f's diagonal.
    """
    if f.k < 2:
        raise ArityError("semiprojection needs arity at least 2")
    grid = argument_grid(f.n, f.k)
    mask = non_injective_mask(f.n, f.k)
    vals = f.values[mask]
    for i in range(f.k):
        ai = grid[i][mask]
        g = diagonal(f).copy()
        g[ai] = vals  # last write wins; consistency checked below
        if np.all(g[ai] == vals):
            return i, OpTable(f.n, 1, g)
    return None


# -- group-relative predicates ------------------------------------------------


class Verdict:
    """Outcome of an exhaustive check: truthy on success.

    ``witness`` describes why the property holds, ``counterexample`` why it
    fails.
    """

    __slots__ = ("ok", "witness", "counterexample")

    def __init__(self, ok: bool, witness=None, counterexample=None):
        self.ok = bool(ok)
        self.witness = witness
        self.counterexample = counterexample

    def __bool__(self):
        return self.ok

    def __repr__(self):
        if self.ok:
            return f"Verdict(True, witness={self.witness!r})"
        return f"Verdict(False, counterexample={self.counterexample!r})"


def _check_domain(f: OpTable, action):
    if f.n != action.n:
        raise PreconditionError(f"operation on {f.n} points, action on {action.n}")


def _first_failure(arrays, labels):
    """Index of the first position where the arrays are not all equal."""
    bad = np.zeros(arrays[0].shape, dtype=bool)
    for a in arrays[1:]:
        bad |= a != arrays[0]
    hits = np.flatnonzero(bad)
    if hits.size == 0:
        return None
    return {name: int(np.ravel(v)[hits[0]]) for name, v in labels.items()}


def _twisted_xy(action):
    """x, y and the G-index for every (g, x, y), g slowest."""
    n, order = action.n, action.order
    g = np.repeat(np.arange(order), n * n)
    x = np.tile(np.repeat(np.arange(n), n), order)
    y = np.tile(np.arange(n), n * order)
    return g, x, y


def is_G_quasi_minority(f: OpTable, action) -> Verdict:
    """m(y,x,bx) = m(x,bx,y) = m(x,y,bx) = m(by,by,by) for all b in G."""
    _need_arity(f, 3, "G-quasi-minority")
    _check_domain(f, action)
    c = f.cube
    g, x, y = _twisted_xy(action)
    bx, by = action.perms[g, x], action.perms[g, y]
    bad = _first_failure(
        [c[y, x, bx], c[x, bx, y], c[x, y, bx], c[by, by, by]],
        {"beta": g, "x": x, "y": y},
    )
    return Verdict(bad is None, counterexample=bad)


def _odd_scope(f: OpTable, action, what: str):
    _need_arity(f, 3, what)
    _check_domain(f, action)
    if action.order != 2 or not action.is_free():
        raise PreconditionError(f"{what} is defined for Z_2 acting freely")


def is_odd_majority(f: OpTable, action) -> Verdict:
    """Quasi-majority with m(y,x,gx) = m(x,gx,y) = m(x,y,gx) = m(y,y,y), g != 1."""
    _odd_scope(f, action, "odd majority")
    if not is_quasi_majority(f):
        return Verdict(False, counterexample={"identity": "quasi-majority"})
    c = f.cube
    x, y = _xy(f.n)
    gx = action.perms[1, x]
    bad = _first_failure([c[y, x, gx], c[x, gx, y], c[x, y, gx], c[y, y, y]], {"x": x, "y": y})
    return Verdict(bad is None, counterexample=bad)


def is_odd_malcev(f: OpTable, action) -> Verdict:
    """Quasi-Malcev plus M(x,y,x) = M(x,x,x), M(y,gx,x) = M(x,gx,y) = M(x,x,x)
    and M(x,y,gx) = M(gy,gy,gy)."""
    _odd_scope(f, action, "odd Malcev")
    if not is_quasi_malcev(f):
        return Verdict(False, counterexample={"identity": "quasi-Malcev"})
    c = f.cube
    x, y = _xy(f.n)
    gx, gy = action.perms[1, x], action.perms[1, y]
    checks = [
        [c[x, y, x], c[x, x, x]],
        [c[y, gx, x], c[x, gx, y], c[x, x, x]],
        [c[x, y, gx], c[gy, gy, gy]],
    ]
    for arrays in checks:
        bad = _first_failure(arrays, {"x": x, "y": y})
        if bad is not None:
            return Verdict(False, counterexample=bad)
    return Verdict(True)


def orbit_collision_mask(action, k: int, i: int | None = None, j: int | None = None) -> np.ndarray:
    """Tuples in B^k with two entries in one orbit (or entries i, j if given)."""
    orb = action.orbit_of[argument_grid(action.n, k)]
    if i is not None:
        return orb[i] == orb[j]
    mask = np.zeros(action.n ** k, dtype=bool)
    for a, b in itertools.combinations(range(k), 2):
        mask |= orb[a] == orb[b]
    return mask


def _twisted_projection(f: OpTable, action, mask, grid):
    """Lowest (i, g) with f(a) = g a_i for every tuple in ``mask``."""
    vals = f.values[mask]
    for i in range(f.k):
        ai = grid[i][mask]
        for g in range(action.order):
            if np.array_equal(action.perms[g][ai], vals):
                return i, g
    return None


def is_orbit_semiprojection(f: OpTable, action) -> Verdict:
    """Exists i and g in G with f(a) = g a_i whenever two a_j share an orbit.

    The witness is ``(i, g)`` with g an index into ``action.elements``.
    """
    _check_domain(f, action)
    if f.k < 2:
        raise ArityError("orbit-semiprojection needs arity at least 2")
    w = _twisted_projection(f, action, orbit_collision_mask(action, f.k), argument_grid(f.n, f.k))
    return Verdict(w is not None, witness=w)


def is_weak_orbit_semiprojection(f: OpTable, action) -> Verdict:
    """For each pair i<j there are s and g with f(a) = g a_s whenever a_i ~ a_j.

    The witness maps (i, j) to (s, g).
    """
    _check_domain(f, action)
    if f.k < 2:
        raise ArityError("weak orbit-semiprojection needs arity at least 2")
    grid = argument_grid(f.n, f.k)
    witness = {}
    for i, j in itertools.combinations(range(f.k), 2):
        w = _twisted_projection(f, action, orbit_collision_mask(action, f.k, i, j), grid)
        if w is None:
            return Verdict(False, counterexample=(i, j))
        witness[(i, j)] = w
    return Verdict(True, witness=witness)


def in_group_part(f: OpTable, action):
    """``(i, g)`` if f = g(x_i) for some g in G, else ``None``."""
    eu = essentially_unary(f)
    if eu is None:
        return None
    i, u = eu
    g = action.index.get(tuple(int(v) for v in u.values))
    return None if g is None else (i, g)


def _is_permutation_of(f: OpTable, pred):
    """First variable permutation sigma with pred(f o sigma), or None."""
    for perm in itertools.permutations(range(f.k)):
        if pred(permute_variables(f, perm)):
            return perm
    return None


def rosenberg_type(f: OpTable, action, allow_trivial: bool = True) -> str:
    """Classification tag for an operation outside the unary part of <G>.

    With a nontrivial group the tags are ``unary``, ``binary``,
    ``G-quasi-minority``, ``odd-majority``, ``odd-malcev``,
    ``orbit-semiprojection`` or ``unclassified``.  For the trivial group the
    classical types ``majority``, ``minority``, ``malcev`` and
    ``semiprojection`` (prefixed ``quasi-`` when not idempotent) are used,
    unless ``allow_trivial`` is false, in which case the answer is
    ``unclassified``.
    """
    _check_domain(f, action)
    if in_group_part(f, action) is not None:
        raise PreconditionError("operation lies in the unary part of <G>")
    if f.k == 1:
        return "unary"
    if action.is_trivial():
        return _classical_type(f) if allow_trivial else "unclassified"
    if f.k == 3:
        boolean_free = action.is_boolean() and action.is_free()
        if boolean_free and is_G_quasi_minority(f, action):
            return "G-quasi-minority"
        if boolean_free and action.order == 2:
            if is_odd_majority(f, action):
                return "odd-majority"
            if _is_permutation_of(f, lambda h: is_odd_malcev(h, action)) is not None:
                return "odd-malcev"
    if is_essential(f) and is_orbit_semiprojection(f, action):
        return "orbit-semiprojection"
    return "binary" if f.k == 2 else "unclassified"


def _classical_type(f: OpTable) -> str:
    prefix = "" if is_idempotent(f) else "quasi-"
    if f.k == 2:
        return "binary"
    if f.k == 3:
        if is_quasi_majority(f):
            return prefix + "majority"
        if is_quasi_minority(f):
            return prefix + "minority"
        if _is_permutation_of(f, is_quasi_malcev) is not None:
            return prefix + "malcev"
    if is_semiprojection(f) is not None:
        return prefix + "semiprojection"
    return "unclassified"
