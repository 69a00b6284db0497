"""Arity-r slices of the clone generated by a permutation group and extra operations.

The slice is the set of r-ary term operations, computed as the subuniverse
of B^(B^r) generated by the r projections under G and the extra operations.
Closure is semi-naive: each round only composes argument tuples that
contain at least one table found in the previous round.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .optable import (OpTable, PreconditionError, argument_grid, essentially_unary,
                      in_group_part, minor)

DEFAULT_MAX_TABLES = 2_000_000
DEFAULT_MAX_EVALUATIONS = 100_000_000
_CHUNK_BYTES = 1 << 24


@dataclass(frozen=True)
class Budget:
    max_tables: int = DEFAULT_MAX_TABLES
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS


class _TableStore:
    """Deduplicated rows with hash lookup.

    Hashes index rows through two sorted arrays (a large settled one and a
    small recent one).  Rows whose hash collides with a different row are
    kept in a bytes-keyed dict so lookups stay exact.
    """

    def __init__(self, length: int, mult: np.ndarray):
        self.length = length
        self.mult = mult
        self.rows = np.empty((1024, length), dtype=np.uint8)
        self.count = 0
        self._main_h = np.empty(0, dtype=np.uint64)
        self._main_i = np.empty(0, dtype=np.int64)
        self._new_h = np.empty(0, dtype=np.uint64)
        self._new_i = np.empty(0, dtype=np.int64)
        self._collided: dict[bytes, int] = {}

    def matrix(self) -> np.ndarray:
        return self.rows[: self.count]

    def _append(self, rows: np.ndarray) -> np.ndarray:
        need = self.count + len(rows)
        if need > len(self.rows):
            cap = max(need, 2 * len(self.rows))
            grown = np.empty((cap, self.length), dtype=np.uint8)
            grown[: self.count] = self.rows[: self.count]
            self.rows = grown
        self.rows[self.count:need] = rows
        ids = np.arange(self.count, need, dtype=np.int64)
        self.count = need
        return ids

    def _index(self, hashes: np.ndarray, ids: np.ndarray):
        h = np.concatenate([self._new_h, hashes])
        i = np.concatenate([self._new_i, ids])
        order = np.argsort(h, kind="stable")
        self._new_h, self._new_i = h[order], i[order]
        if len(self._new_h) > max(1 << 16, len(self._main_h) // 8):
            h = np.concatenate([self._main_h, self._new_h])
            i = np.concatenate([self._main_i, self._new_i])
            order = np.argsort(h, kind="stable")
            self._main_h, self._main_i = h[order], i[order]
            self._new_h = np.empty(0, dtype=np.uint64)
            self._new_i = np.empty(0, dtype=np.int64)

    def _lookup(self, hashes: np.ndarray) -> np.ndarray:
        """Row id holding each hash, or -1."""
        out = np.full(len(hashes), -1, dtype=np.int64)
        for sh, si in ((self._main_h, self._main_i), (self._new_h, self._new_i)):
            if len(sh) == 0:
                continue
            pos = np.searchsorted(sh, hashes)
            pos[pos == len(sh)] = 0
            hit = (sh[pos] == hashes) & (out < 0)
            out[hit] = si[pos[hit]]
        return out

    def add(self, rows: np.ndarray, hashes: np.ndarray) -> np.ndarray:
        """Insert rows, returning the ids of the ones that were new."""
        if len(rows) == 0:
            return np.empty(0, dtype=np.int64)
        uh, first, inv = np.unique(hashes, return_index=True, return_inverse=True)
        inv = inv.reshape(-1)
        reps = rows[first]
        slow = np.flatnonzero(np.any(rows != reps[inv], axis=1))
        known = self._lookup(uh)
        found = known >= 0
        mismatch = np.zeros(len(uh), dtype=bool)
        if found.any():
            mismatch[found] = np.any(self.rows[known[found]] != reps[found], axis=1)
        fresh = ~found
        new_ids = self._append(reps[fresh]) if fresh.any() else np.empty(0, dtype=np.int64)
        if len(new_ids):
            self._index(uh[fresh], new_ids)
        extra = [self._add_slow(reps[j]) for j in np.flatnonzero(mismatch)]
        extra += [self._add_slow(rows[j]) for j in slow]
        extra = [e for e in extra if e is not None]
        if extra:
            new_ids = np.concatenate([new_ids, np.array(extra, dtype=np.int64)])
        return new_ids

    def _add_slow(self, row: np.ndarray):
        h = kernels.row_hashes(row[None, :], self.mult)
        rid = int(self._lookup(h)[0])
        if rid >= 0 and np.array_equal(self.rows[rid], row):
            return None
        key = row.tobytes()
        if key in self._collided:
            return None
        new = int(self._append(row[None, :])[0])
        if rid < 0:
            self._index(h, np.array([new], dtype=np.int64))
        else:
            self._collided[key] = new
        return new

    def contains(self, row: np.ndarray) -> bool:
        h = kernels.row_hashes(row[None, :], self.mult)
        rid = int(self._lookup(h)[0])
        if rid >= 0 and np.array_equal(self.rows[rid], row):
            return True
        return row.tobytes() in self._collided


@dataclass
class CloneSlice:
    """The r-ary part of a generated clone, canonically sorted."""

    n: int
    r: int
    tables: tuple
    saturated: bool
    generators: dict = field(default_factory=dict)
    evaluations: int = 0
    stopped_on: OpTable | None = None
    exhausted: str | None = None

    def __len__(self):
        return len(self.tables)

    def __iter__(self):
        return iter(self.tables)

    def __contains__(self, op: OpTable):
        return op in self._set

    @property
    def _set(self):
        s = self.__dict__.get("_cached_set")
        if s is None:
            s = self.__dict__["_cached_set"] = frozenset(self.tables)
        return s

    def essential(self) -> list[OpTable]:
        return [t for t in self.tables if essentially_unary(t) is None]

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for t in self.tables:
            h.update(t.values.tobytes())
        return h.hexdigest()


def group_unary_part(action, r: int) -> list[OpTable]:
    """The r-ary operations g(x_i) with g in G."""
    grid = argument_grid(action.n, r)
    return sorted({OpTable(action.n, r, action.perms[g][grid[i]])
                   for i in range(r) for g in range(action.order)})


def _tuple_blocks(k: int, done: int, total: int):
    """Semi-naive blocks: position p is the first one holding a new table."""
    for p in range(k):
        radices = [done] * p + [total - done] + [total] * (k - 1 - p)
        size = 1
        for rad in radices:
            size *= rad
        if size:
            yield p, radices, size


def _block_indices(radices, p, done, start, stop):
    t = np.arange(start, stop, dtype=np.int64)
    idx = np.empty((len(t), len(radices)), dtype=np.int64)
    for j in range(len(radices) - 1, -1, -1):
        idx[:, j] = t % radices[j]
        t //= radices[j]
    idx[:, p] += done
    return idx


def generate_slice(action, ops: Iterable[OpTable], r: int, budget: Budget | None = None,
                   watch: Callable[[np.ndarray], int | None] | None = None,
                   mult: np.ndarray | None = None) -> CloneSlice:
    """Close the r-ary projections under G and ``ops``.

    ``watch`` is called with each batch of newly found rows (after the
    G-unary seed); if it returns an index the run stops early and that row
    is reported as ``stopped_on``.  A stopped or budget-limited run has
    ``saturated=False``.
    """
    if r < 1:
        raise ValueError("slice arity must be at least 1")
    ops = sorted(set(ops))
    for f in ops:
        if f.n != action.n:
            raise PreconditionError("operation and action have different domain sizes")
    budget = budget or Budget()
    n = action.n
    length = n ** r
    if mult is None:
        mult = kernels.hash_multipliers(length)
    store = _TableStore(length, mult)
    perms = action.perms.astype(np.uint8)
    evaluations = 0
    stopped = None
    exhausted = None

    def insert(rows):
        rows = np.ascontiguousarray(rows, dtype=np.uint8)
        return store.add(rows, kernels.row_hashes(rows, mult))

    def report(new_ids):
        nonlocal stopped
        if watch is None or len(new_ids) == 0:
            return False
        hit = watch(store.rows[new_ids])
        if hit is not None:
            stopped = OpTable(n, r, store.rows[new_ids[hit]].copy())
            return True
        return False

    insert(np.stack([t.values for t in group_unary_part(action, r)]))
    seeds = [minor(f, vm, r).values for f in ops
             for vm in itertools.product(range(r), repeat=f.k)]
    halted = bool(seeds) and report(insert(np.stack(seeds)))

    done = 0
    saturated = False
    while not halted:
        total = store.count
        if total == done:
            saturated = True
            break
        if total > budget.max_tables:
            exhausted = "max_tables"
            break
        frontier = store.rows[done:total]
        unary = perms[1:][:, frontier].reshape(-1, length) if action.order > 1 else frontier[:0]
        evaluations += len(unary)
        if report(insert(unary)):
            break
        for f in ops:
            chunk = max(256, _CHUNK_BYTES // max(length, 1))
            for p, radices, size in _tuple_blocks(f.k, done, total):
                for start in range(0, size, chunk):
                    stop = min(size, start + chunk)
                    if evaluations + (stop - start) > budget.max_evaluations:
                        exhausted = "max_evaluations"
                        halted = True
                        break
                    idx = _block_indices(radices, p, done, start, stop)
                    rows, hashes = kernels.compose_batch(f.values, n, store.rows, idx, mult)
                    evaluations += stop - start
                    if report(store.add(rows, hashes)):
                        halted = True
                        break
                    if store.count > budget.max_tables:
                        exhausted = "max_tables"
                        halted = True
                        break
                if halted:
                    break
            if halted:
                break
        done = total

    tables = tuple(sorted(OpTable(n, r, row) for row in store.matrix()))
    return CloneSlice(
        n=n, r=r, tables=tables, saturated=saturated and stopped is None,
        generators={"action": action.name, "ops": [f.sort_key()[1].hex() for f in ops]},
        evaluations=evaluations, stopped_on=stopped, exhausted=exhausted,
    )


# -- minimality deciders ----------------------------------------------------------


@dataclass
class Decision:
    """A three-valued verdict: ``value`` is True, False or None (unknown)."""

    value: bool | None
    certificate: OpTable | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.value is True

    @property
    def label(self) -> str:
        return {True: "true", False: "false", None: "unknown"}[self.value]


def _require_outside_group(action, f: OpTable):
    if f.n != action.n:
        raise PreconditionError("operation and action have different domain sizes")
    if in_group_part(f, action) is not None:
        raise PreconditionError("operation already lies in <G>")


def _first_new(rows):
    return 0


def is_almost_minimal(action, f: OpTable, budget: Budget | None = None) -> Decision:
    """No operation of arity below f's arises from G and f beyond <G> itself."""
    _require_outside_group(action, f)
    sizes = {}
    for r in range(1, f.k):
        sl = generate_slice(action, [f], r, budget, watch=_first_new)
        sizes[r] = len(sl)
        if sl.stopped_on is not None:
            return Decision(False, sl.stopped_on, {"arity": r, "slice_sizes": sizes})
        if not sl.saturated:
            return Decision(None, None, {"arity": r, "reason": "budget", "budget": sl.exhausted,
                                         "slice_sizes": sizes})
    return Decision(True, None, {"slice_sizes": sizes})


def regenerates(action, h: OpTable, f: OpTable, budget: Budget | None = None) -> bool | None:
    """Whether f lies in <G u {h}>; None if the budget ran out first."""
    target = f.values.tobytes()

    def watch(rows):
        for j, row in enumerate(rows):
            if row.tobytes() == target:
                return j
        return None

    sl = generate_slice(action, [h], f.k, budget, watch=watch)
    if sl.stopped_on is not None:
        return True
    return False if sl.saturated else None


def symmetry_class(action, h: OpTable, max_variants: int = 20_000) -> set[bytes]:
    """Tables obtained from h by outer and inner G-elements and permuting variables.

    All of them generate the same clone together with G.  When the class
    would be too large to list, only h itself is returned.
    """
    n, k = h.n, h.k
    if action.order ** (k + 1) * math.factorial(k) > max_variants:
        return {h.values.tobytes()}
    grid = argument_grid(n, k)
    perms = action.perms
    out = set()
    for sigma in itertools.permutations(range(k)):
        for inner in itertools.product(range(action.order), repeat=k):
            args = [perms[inner[j]][grid[sigma[j]]] for j in range(k)]
            code = np.zeros(n ** k, dtype=np.int64)
            for a in args:
                code = code * n + a
            base = h.values[code]
            for g in range(action.order):
                out.add(perms[g][base].astype(np.uint8).tobytes())
    return out


def _regeneration_scan(action, f: OpTable, candidates, budget, hints=()):
    """First candidate that fails to regenerate f, with bookkeeping."""
    seen: set[bytes] = set()
    tested = 0
    unknown = False
    for h in list(hints) + list(candidates):
        key = h.values.tobytes()
        if key in seen:
            continue
        seen |= symmetry_class(action, h)
        tested += 1
        res = regenerates(action, h, f, budget)
        if res is False:
            return h, tested, unknown
        if res is None:
            unknown = True
    return None, tested, unknown


def is_strictly_almost_minimal(action, f: OpTable, budget: Budget | None = None,
                               hints: Sequence[OpTable] = ()) -> Decision:
    """Every essential operation of f's arity generated by G and f regenerates f.

    ``hints`` are tried first; each must lie in the slice.
    """
    am = is_almost_minimal(action, f, budget)
    if am.value is None:
        return Decision(None, None, {"reason": "almost minimality undecided"})
    if not am.value:
        raise PreconditionError("operation is not almost minimal")
    sl = generate_slice(action, [f], f.k, budget)
    if not sl.saturated:
        return Decision(None, None, {"reason": "budget", "budget": sl.exhausted,
                                     "slice_size": len(sl)})
    for h in hints:
        if h not in sl:
            raise PreconditionError("hint is not in the generated slice")
    ess = sl.essential()
    bad, tested, unknown = _regeneration_scan(action, f, ess, budget, hints)
    detail = {"slice_size": len(sl), "essential": len(ess), "classes_tested": tested}
    if bad is not None:
        return Decision(False, bad, detail)
    return Decision(None if unknown else True, None, detail)


def is_minimal_bounded(action, f: OpTable, arity_cap: int,
                       budget: Budget | None = None) -> Decision:
    """Minimality truncated at ``arity_cap``.

    True means: for every r up to the cap, each essential r-ary operation
    generated by G and f regenerates f.  It never certifies unbounded
    minimality.
    """
    if arity_cap < f.k:
        raise PreconditionError("arity cap below the operation's arity")
    am = is_almost_minimal(action, f, budget)
    if am.value is None:
        return Decision(None, None, {"reason": "almost minimality undecided"})
    if not am.value:
        raise PreconditionError("operation is not almost minimal")
    sizes = {}
    unknown = False
    for r in range(f.k, arity_cap + 1):
        sl = generate_slice(action, [f], r, budget)
        sizes[r] = len(sl)
        if not sl.saturated:
            return Decision(None, None, {"reason": "budget", "budget": sl.exhausted,
                                         "arity": r, "slice_sizes": sizes})
        bad, _, unk = _regeneration_scan(action, f, sl.essential(), budget)
        unknown |= unk
        if bad is not None:
            return Decision(False, bad, {"arity": r, "slice_sizes": sizes})
    return Decision(None if unknown else True, None, {"slice_sizes": sizes, "arity_cap": arity_cap})


# -- homomorphism onto projections ---------------------------------------------


def _restriction_variable(t: OpTable, points: np.ndarray):
    """Dependent variable of t restricted to points^r, or None if essential there."""
    sub = t.cube[np.ix_(*([points] * t.k))]
    deps = [i for i in range(t.k)
            if not np.all(sub == np.take(sub, [0], axis=i))]
    if len(deps) > 1:
        return None
    return deps[0] if deps else 0


def hom_to_projections(action, sl: CloneSlice, ops: Sequence[OpTable] = (),
                       max_checks: int = 2_000_000):
    """Map each slice table to the variable it follows on a two-point subset.

    The two points are the smallest members of the least nontrivial orbit.
    Returns ``None`` if some restriction is essential or the map fails to
    respect composition with G or with the given generators.
    """
    orbit = next((o for o in action.orbits if len(o) > 1), None)
    if orbit is None:
        raise PreconditionError("action has no nontrivial orbit")
    points = np.array(orbit[:2])
    assign = {}
    for t in sl.tables:
        v = _restriction_variable(t, points)
        if v is None:
            return None
        assign[t] = v
    tables = list(sl.tables)
    for t in tables:
        for g in range(action.order):
            u = OpTable(t.n, t.k, action.perms[g][t.values])
            if assign.get(u) != assign[t]:
                return None
    checks = 0
    for f in ops:
        i = _restriction_variable(f, points)
        if i is None:
            return None
        for combo in itertools.product(range(len(tables)), repeat=f.k):
            if checks >= max_checks:
                break
            checks += 1
            code = np.zeros(len(tables[0].values), dtype=np.int64)
            for c in combo:
                code = code * f.n + tables[c].values
            u = OpTable(f.n, sl.r, f.values[code])
            if assign.get(u) != assign[tables[combo[i]]]:
                return None
    return assign
