"""Explicit operations above a permutation group.

Every constructor returns a plain OpTable; the predicates in ``optable``
and the deciders in ``clone`` are used to check them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .optable import OpTable, PreconditionError, argument_grid, encode


def _require_boolean_free(action, what):
    if not (action.is_boolean() and action.is_free()):
        raise PreconditionError(f"{what} needs a Boolean group acting freely")


def _require_z2_free(action, what):
    if action.order != 2 or not action.is_free():
        raise PreconditionError(f"{what} needs Z_2 acting freely")


def _table(action, k, rule) -> OpTable:
    return OpTable(action.n, k, [rule(a) for a in itertools.product(range(action.n), repeat=k)])


def exmin_minority(action) -> OpTable:
    """Idempotent G-quasi-minority for a Boolean group acting freely.

    For a triple with two entries in one orbit, take the lexicographically
    first such pair (i, j), the element g with a_j = g a_i, and return g
    applied to the remaining entry.  Triples meeting three orbits go to the
    first argument.
    """
    _require_boolean_free(action, "exmin_minority")
    orb = action.orbit_of

    def rule(a):
        for i, j in ((0, 1), (0, 2), (1, 2)):
            if orb[a[i]] == orb[a[j]]:
                g = action.unique_transporter(a[i], a[j])
                (rest,) = {0, 1, 2} - {i, j}
                return action.perms[g][a[rest]]
        return a[0]

    return _table(action, 3, rule)


def boolean_sum(action, base: int = 0) -> OpTable:
    """x + y + z for a Boolean group acting regularly, with ``base`` as zero."""
    _require_boolean_free(action, "boolean_sum")
    if not action.is_transitive():
        raise PreconditionError("boolean_sum needs a regular action")
    elem = action.transporter[base]  # elem[x] sends base to x
    mult = action.mult

    def rule(a):
        g = mult[mult[elem[a[0]], elem[a[1]]], elem[a[2]]]
        return action.perms[g][base]

    return _table(action, 3, rule)


def rank_orbit_semiprojection(action, k: int) -> OpTable:
    """k-ary orbit-semiprojection onto the first argument.

    When all arguments lie in distinct orbits the value is the argument in
    the orbit with the largest id.
    """
    if not 2 <= k <= action.s:
        raise PreconditionError(f"arity must lie in 2..{action.s}")
    orb = action.orbit_of

    def rule(a):
        ids = [orb[x] for x in a]
        if len(set(ids)) < k:
            return a[0]
        return a[int(np.argmax(ids))]

    return _table(action, k, rule)


def odd_majority(action) -> OpTable:
    """Idempotent odd majority for Z_2 acting freely.

    Repeated entries win; a pair {x, gx} yields the third entry; triples
    meeting three orbits go to the first argument.
    """
    _require_z2_free(action, "odd_majority")
    flip = action.perms[1]

    def rule(a):
        x, y, z = a
        if x == y or x == z:
            return x
        if y == z:
            return y
        if flip[x] == y:
            return z
        if flip[x] == z:
            return y
        if flip[y] == z:
            return x
        return x

    return _table(action, 3, rule)


def odd_malcev(action, m: OpTable | None = None) -> OpTable:
    """M(x, y, z) = m(x, gy, z) for an odd majority m (built if not given)."""
    _require_z2_free(action, "odd_malcev")
    m = odd_majority(action) if m is None else m
    return twist_middle(action, m)


def twist_middle(action, f: OpTable) -> OpTable:
    """f(x, gy, z) with g the non-identity element of Z_2."""
    x, y, z = argument_grid(action.n, 3)
    return OpTable(action.n, 3, f.values[encode(action.n, [x, action.perms[1][y], z])])


def mstar(action, m: OpTable) -> OpTable:
    """m(x, g m(x,y,z), m(gx, y, z)) with g the non-identity element."""
    _require_z2_free(action, "mstar")
    flip = action.perms[1]
    x, y, z = argument_grid(action.n, 3)
    n = action.n
    inner = m.values[encode(n, [x, y, z])]
    shifted = m.values[encode(n, [flip[x], y, z])]
    return OpTable(n, 3, m.values[encode(n, [x, flip[inner], shifted])])


def binary_twist(action, alpha: int) -> OpTable:
    """f(x, y) = x if alpha x = y, else y."""
    if alpha == 0:
        raise PreconditionError("alpha must be a non-identity element")
    ax = action.perms[alpha]
    return _table(action, 2, lambda a: a[0] if ax[a[0]] == a[1] else a[1])


@dataclass(frozen=True)
class PalfyParams:
    """Parameters of the k-ary orbit-semiprojection with twists alpha, beta."""

    action: object
    k: int
    b: int
    alpha: int = 0
    beta: int = 0

    def __post_init__(self):
        a = self.action
        if not 2 <= self.k <= a.s:
            raise PreconditionError(f"arity must lie in 2..{a.s}")
        if not 0 <= self.b < a.n or len(a.orbits[a.orbit_of[self.b]]) < 2:
            raise PreconditionError("base point must lie in an orbit with more than one element")


def default_base_point(action) -> int:
    """Least element of the least orbit with more than one element."""
    for orbit in action.orbits:
        if len(orbit) > 1:
            return orbit[0]
    raise PreconditionError("action has no nontrivial orbit")


def palfy_op(p: PalfyParams) -> OpTable:
    """beta b if a_1 ~ b and all arguments lie in distinct orbits, else alpha a_1."""
    a = p.action
    grid = argument_grid(a.n, p.k)
    orb = a.orbit_of[grid]
    distinct = np.ones(a.n ** p.k, dtype=bool)
    for i, j in itertools.combinations(range(p.k), 2):
        distinct &= orb[i] != orb[j]
    special = distinct & (orb[0] == a.orbit_of[p.b])
    vals = a.perms[p.alpha][grid[0]]
    vals = np.where(special, a.perms[p.beta][p.b], vals)
    return OpTable(a.n, p.k, vals)


# -- identities of the orbit-semiprojection family ------------------------------


def _palfy_values(action, k: int, b: int, alpha: int, beta: int, args) -> np.ndarray:
    """f^(alpha, beta) evaluated on stacked argument arrays (last axis = points)."""
    orb = action.orbit_of
    distinct = np.ones(np.broadcast(*args).shape, dtype=bool)
    for i, j in itertools.combinations(range(k), 2):
        distinct &= orb[args[i]] != orb[args[j]]
    special = distinct & (orb[args[0]] == orb[b])
    return np.where(special, action.perms[beta][b], action.perms[alpha][args[0]])


def _forms(action, k: int, m: int, b: int):
    """All unary forms g x_t and all f^(g, d)(x_sigma) over m variables.

    Each entry is ``(description, leading variable, table over n^m)``.
    """
    grid = argument_grid(action.n, m)
    out = []
    for t in range(m):
        for g in range(action.order):
            out.append((("unary", g, t), t, action.perms[g][grid[t]]))
    for sigma in itertools.permutations(range(m), k):
        args = [grid[v] for v in sigma]
        for g in range(action.order):
            for d in range(action.order):
                out.append((("palfy", g, d, sigma), sigma[0], _palfy_values(action, k, b, g, d, args)))
    return out


def verify_palfy_identities(action, k: int, b: int | None = None, m: int | None = None,
                            stop_at_first: bool = True) -> dict:
    """Check the composition identities of f^(alpha, beta) exhaustively.

    The outer operation runs over all (alpha, beta); the first argument over
    g x_1 and f^(g, d)(x_1..x_k); every later argument over all unary and
    f-forms in ``m`` variables (default k).  Write l_i for the leading
    variable of argument i.

    * if some l_i is x_1 or two l_i coincide, the value is alpha times the
      first argument;
    * if the l_i are distinct, avoid x_1, and (for an f-form first argument)
      are exactly x_2..x_k, the value is f^(alpha g, beta)(x_1, x_l2, ...).

    Remaining combinations only occur when m > k and are counted as
    ``uncovered`` without a claim.
    """
    b = default_base_point(action) if b is None else b
    PalfyParams(action, k, b)
    m = k if m is None else m
    if m < k:
        raise PreconditionError("need at least k variables")
    n = action.n
    grid = argument_grid(n, m)
    firsts = [(("unary", g, 0), g, action.perms[g][grid[0]]) for g in range(action.order)]
    for g in range(action.order):
        for d in range(action.order):
            firsts.append((("palfy", g, d), g, _palfy_values(action, k, b, g, d, list(grid[:k]))))
    rest = _forms(action, k, m, b)
    rest_tables = np.stack([t for _, _, t in rest])
    lead = np.array([lv for _, lv, _ in rest])
    combos = np.array(list(itertools.product(range(len(rest)), repeat=k - 1)),
                      dtype=np.int64).reshape(-1, k - 1)
    leads = lead[combos]
    collide = np.any(leads == 0, axis=1)
    for i, j in itertools.combinations(range(k - 1), 2):
        collide |= leads[:, i] == leads[:, j]
    standard = np.all(np.sort(leads, axis=1) == np.arange(1, k), axis=1)
    # distinct leading variables: the result follows them
    lead_sets = {}
    for c in np.flatnonzero(~collide):
        lead_sets.setdefault(tuple(leads[c]), []).append(c)
    stats = {"eq1": 0, "eq2": 0, "eq3": 0, "eq4": 0, "uncovered": 0}
    failures = []
    mult = action.mult
    for alpha in range(action.order):
        for beta in range(action.order):
            for desc, g, t1 in firsts:
                unary = desc[0] == "unary"
                args = [np.broadcast_to(t1, (len(combos), t1.size))]
                args += [rest_tables[combos[:, i]] for i in range(k - 1)]
                lhs = _palfy_values(action, k, b, alpha, beta, args)
                rhs = np.broadcast_to(action.perms[alpha][t1], lhs.shape).copy()
                claimed = collide.copy()
                ag = int(mult[alpha, g])
                for ls, rows in lead_sets.items():
                    if not unary and not standard[rows[0]]:
                        continue
                    rhs[rows] = _palfy_values(action, k, b, ag, beta,
                                              [grid[0]] + [grid[v] for v in ls])
                    claimed[rows] = True
                stats["eq2" if unary else "eq4"] += int(collide.sum())
                stats["eq1" if unary else "eq3"] += int((claimed & ~collide).sum())
                stats["uncovered"] += int((~claimed).sum())
                bad = claimed & ~np.all(lhs == rhs, axis=1)
                if bad.any():
                    c = int(np.flatnonzero(bad)[0])
                    failures.append({"alpha": alpha, "beta": beta, "first": desc,
                                     "rest": [rest[j][0] for j in combos[c]]})
                    if stop_at_first:
                        return {"ok": False, "checked": stats, "failures": failures,
                                "k": k, "m": m, "b": b}
    return {"ok": not failures, "checked": stats, "failures": failures, "k": k, "m": m, "b": b}


def palfy_family(action, k: int, b: int) -> dict:
    """Every f^(alpha, beta) with its variables permuted, keyed by table bytes."""
    grid = argument_grid(action.n, k)
    out = {}
    for sigma in itertools.permutations(range(k)):
        args = [grid[v] for v in sigma]
        for alpha in range(action.order):
            for beta in range(action.order):
                t = _palfy_values(action, k, b, alpha, beta, args).astype(np.uint8)
                out.setdefault(t.tobytes(), (alpha, beta, sigma))
    return out


def verify_palfy_closure(action, k: int, b: int | None = None, budget=None) -> dict:
    """Minimality certificate for f = f^(1, 1) on a finite domain.

    Checks that f is almost minimal, that every essential k-ary member of
    <G u {f}> is some f^(alpha, beta) up to a permutation of variables, and
    that each of them regenerates f.
    """
    from .clone import generate_slice, is_almost_minimal, regenerates

    b = default_base_point(action) if b is None else b
    f = palfy_op(PalfyParams(action, k, b))
    am = is_almost_minimal(action, f, budget)
    sl = generate_slice(action, [f], k, budget)
    family = palfy_family(action, k, b)
    members = []
    strangers = []
    unknown = not sl.saturated or am.value is None
    all_regenerate = True
    for t in sl.essential():
        key = t.values.tobytes()
        if key not in family:
            strangers.append(t)
            continue
        back = regenerates(action, t, f, budget)
        if back is None:
            unknown = True
        elif not back:
            all_regenerate = False
        alpha, beta, sigma = family[key]
        members.append({"alpha": alpha, "beta": beta, "sigma": list(sigma), "regenerates": back})
    ok = bool(am.value) and sl.saturated and not strangers and all_regenerate and not unknown
    return {
        "certified": ok,
        "k": k,
        "b": b,
        "almost_minimal": am.label,
        "slice_size": len(sl),
        "essential": len(members) + len(strangers),
        "family_members_found": len(members),
        "strangers": [t.to_text() for t in strangers[:3]],
        "members": members,
        "saturated": sl.saturated,
    }
