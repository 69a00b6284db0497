"""G-invariant Steiner 3-quasigroups for a Boolean group acting freely.

Such a quasigroup q is determined by a Steiner 3-quasigroup on the orbits
and a group-valued weight f on its blocks:

    q(a, b, c) = (alpha beta gamma f(block)) x_d

where a = alpha x_a~ etc. for fixed orbit representatives x, d~ is the orbit
value on the orbit triple, and f is the identity on repeated orbits.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import designs
from .clone import Budget, generate_slice, regenerates, symmetry_class
from .optable import OpTable, PreconditionError, Verdict, argument_grid, encode, is_essential


class CertificateError(RuntimeError):
    """A structural claim about a certified quasigroup failed."""


def _require(action):
    if not (action.is_boolean() and action.is_free()):
        raise PreconditionError("needs a Boolean group acting freely")


@dataclass
class GWeightedSQ:
    """Orbit quasigroup plus block weights; ``f`` maps sorted orbit 4-tuples to
    group element indices.  Missing blocks weigh the identity."""

    action: object
    reps: tuple
    orbit_q: OpTable
    f: dict = field(default_factory=dict)

    def weight(self, a, b, c, d) -> int:
        if len({a, b, c, d}) < 4:
            return 0
        return self.f.get(tuple(sorted((a, b, c, d))), 0)


def orbit_quasigroup(sqs: designs.SQS) -> OpTable:
    """The Steiner 3-quasigroup of an SQS: minority on repeats, else the
    fourth block point."""
    s = sqs.point_count
    fourth = sqs.fourth()

    def rule(a, b, c):
        if a == b:
            return c
        if a == c:
            return b
        if b == c:
            return a
        return fourth[tuple(sorted((a, b, c)))]

    return OpTable.from_function(s, 3, rule)


def build_q(gw: GWeightedSQ) -> OpTable:
    action = gw.action
    _require(action)
    n = action.n
    reps = np.array(gw.reps)
    x, y, z = argument_grid(n, 3)
    ox, oy, oz = (action.orbit_of[v] for v in (x, y, z))
    ga, gb, gc = (action.transporter[reps[o], v] for o, v in ((ox, x), (oy, y), (oz, z)))
    od = gw.orbit_q.values[encode(gw.orbit_q.n, [ox, oy, oz])].astype(np.int64)
    s = gw.orbit_q.n
    wtab = np.zeros((s, s, s), dtype=np.int64)
    for a, b, c in itertools.product(range(s), repeat=3):
        wtab[a, b, c] = gw.weight(a, b, c, int(gw.orbit_q(a, b, c)))
    w = wtab[ox, oy, oz]
    m = action.mult
    g = m[m[m[ga, gb], gc], w]
    return OpTable(n, 3, action.perms[g, reps[od]])


def extract(action, q: OpTable, reps=None) -> GWeightedSQ:
    """Recover the orbit quasigroup and block weights of q."""
    _require(action)
    ok = check_ginv_steiner(action, q)
    if not ok:
        raise PreconditionError(f"not a G-invariant Steiner 3-quasigroup: {ok.counterexample}")
    reps = tuple(action.representatives if reps is None else reps)
    s = action.s
    vals = []
    f = {}
    for a, b, c in itertools.product(range(s), repeat=3):
        v = q(reps[a], reps[b], reps[c])
        d = int(action.orbit_of[v])
        vals.append(d)
        if len({a, b, c, d}) == 4:
            g = action.unique_transporter(reps[d], v)
            if g:
                f[tuple(sorted((a, b, c, d)))] = g
    return GWeightedSQ(action, reps, OpTable(s, 3, vals), f)


# -- identity checks ----------------------------------------------------------


def _first_bad(lhs, rhs, labels):
    bad = np.flatnonzero(np.asarray(lhs) != np.asarray(rhs))
    if bad.size == 0:
        return None
    return {k: int(np.ravel(v)[bad[0]]) for k, v in labels.items()}


def check_ginv_steiner(action, q: OpTable) -> Verdict:
    """Idempotent, symmetric, minority, q(x,y,q(x,y,z)) = z and
    q(ax, by, cz) = abc q(x,y,z)."""
    if q.k != 3 or q.n != action.n:
        raise PreconditionError("needs a ternary operation on the action's domain")
    c = q.cube
    n = q.n
    x, y, z = argument_grid(n, 3)
    v = c[x, y, z]
    checks = [
        ("idempotent", c[x, x, x], x),
        ("symmetric", c[y, x, z], v),
        ("symmetric", c[x, z, y], v),
        ("minority", c[x, x, y], y),
        ("minority", c[x, y, x], y),
        ("minority", c[y, x, x], y),
        ("steiner", c[x, y, v], z),
    ]
    for name, lhs, rhs in checks:
        bad = _first_bad(lhs, rhs, {"x": x, "y": y, "z": z})
        if bad is not None:
            return Verdict(False, counterexample=(name, bad))
    m, p = action.mult, action.perms
    for a, b, g in itertools.product(range(action.order), repeat=3):
        lhs = c[p[a][x], p[b][y], p[g][z]]
        rhs = p[m[m[a, b], g]][v]
        bad = _first_bad(lhs, rhs, {"x": x, "y": y, "z": z})
        if bad is not None:
            bad.update(alpha=a, beta=b, gamma=g)
            return Verdict(False, counterexample=("invariance", bad))
    return Verdict(True)


def check_boolean(action, q: OpTable) -> Verdict:
    """q(x, y, q(z, y, w)) = q(x, z, w)."""
    if q.k != 3 or q.n != action.n:
        raise PreconditionError("needs a ternary operation on the action's domain")
    c = q.cube
    x, y, z, w = argument_grid(q.n, 4)
    bad = _first_bad(c[x, y, c[z, y, w]], c[x, z, w], {"x": x, "y": y, "z": z, "w": w})
    return Verdict(bad is None, counterexample=None if bad is None else ("boolean", bad))


def weight_condition_violation(gw: GWeightedSQ):
    """First (a, b, c, d) breaking f(abc) f(abd) = f(c, d, abc, abd), or None."""
    q = gw.orbit_q
    m = gw.action.mult
    for a, b, c, d in itertools.product(range(q.n), repeat=4):
        e, h = q(a, b, c), q(a, b, d)
        lhs = m[gw.weight(a, b, c, e), gw.weight(a, b, d, h)]
        if lhs != gw.weight(c, d, e, h):
            return a, b, c, d
    return None


def is_boolean_weighted(gw: GWeightedSQ) -> bool:
    q = gw.orbit_q
    sqs_bool = all(q(x, y, q(z, y, w)) == q(x, z, w)
                   for x, y, z, w in itertools.product(range(q.n), repeat=4))
    return sqs_bool and weight_condition_violation(gw) is None


# -- enumeration ------------------------------------------------------------------


def _sqs_of(s: int):
    return [sq for sq in designs.enumerate_sqs(s) if designs.is_boolean_sqs(sq)]


def enumerate_ginv_boolean(action) -> list[OpTable]:
    """All G-invariant Boolean Steiner 3-quasigroups, built from Boolean SQS on
    the orbits and transparent block weightings."""
    _require(action)
    s = action.s
    if s > designs.SQS_CAP:
        raise PreconditionError(f"at most {designs.SQS_CAP} orbits supported")
    if s & (s - 1):
        return []
    _, elem = action.boolean_coordinates()
    rank = action.order.bit_length() - 1
    out = set()
    for sqs in _sqs_of(s):
        oq = orbit_quasigroup(sqs)
        for g in designs.transparent_weightings(sqs, rank):
            gw = GWeightedSQ(action, action.representatives, oq,
                             {blk: int(elem[v]) for blk, v in g.items() if v})
            if weight_condition_violation(gw) is not None:
                raise CertificateError("transparent weighting violates the weight condition")
            out.add(build_q(gw))
    return sorted(out)


def brute_force_ginv_boolean(action) -> list[OpTable]:
    """Independent search: choose q on each triple of distinct orbit
    representatives, extend by symmetry, minority and invariance, and keep
    what passes the identity checks."""
    _require(action)
    s, n = action.s, action.n
    if n > 8 or s > 4:
        raise PreconditionError("brute force is capped at 8 points and 4 orbits")
    reps = action.representatives
    x, y, z = argument_grid(n, 3)
    ox, oy, oz = (action.orbit_of[v] for v in (x, y, z))
    ga, gb, gc = (action.transporter[np.array(reps)[o], v] for o, v in ((ox, x), (oy, y), (oz, z)))
    m = action.mult
    shift = m[m[ga, gb], gc]
    subsets = list(itertools.combinations(range(s), 3))
    found = []
    for choice in itertools.product(range(n), repeat=len(subsets)):
        base = np.empty((s, s, s), dtype=np.int64)
        for i, j, k in itertools.product(range(s), repeat=3):
            if i == j:
                base[i, j, k] = reps[k]
            elif i == k:
                base[i, j, k] = reps[j]
            elif j == k:
                base[i, j, k] = reps[i]
            else:
                base[i, j, k] = choice[subsets.index(tuple(sorted((i, j, k))))]
        q = OpTable(n, 3, action.perms[shift, base[ox, oy, oz]])
        if check_ginv_steiner(action, q) and check_boolean(action, q):
            found.append(q)
    return sorted(set(found))


def pointwise_boolean_weighting(action, point_weights) -> GWeightedSQ:
    """XOR quasigroup on orbit ids with f(block) = sum of the point weights."""
    _require(action)
    s = action.s
    if s & (s - 1):
        raise PreconditionError("number of orbits must be a power of two")
    if len(point_weights) != s:
        raise PreconditionError("need one weight per orbit")
    vec, elem = action.boolean_coordinates()
    oq = OpTable.from_function(s, 3, lambda a, b, c: a ^ b ^ c)
    f = {}
    for a, b, c in itertools.combinations(range(s), 3):
        d = a ^ b ^ c
        if d in (a, b, c):
            continue
        v = 0
        for p in (a, b, c, d):
            v ^= int(vec[point_weights[p]])
        if v:
            f[tuple(sorted((a, b, c, d)))] = int(elem[v])
    return GWeightedSQ(action, action.representatives, oq, f)


# -- slice law and minimality certificate --------------------------------------------


def translates(action, q: OpTable) -> list[OpTable]:
    return sorted({OpTable(q.n, 3, action.perms[g][q.values]) for g in range(action.order)})


def steiner_slice_law(action, q: OpTable, budget: Budget | None = None) -> Verdict:
    """The essential ternary operations generated by G and q are exactly its
    G-translates."""
    sl = generate_slice(action, [q], 3, budget)
    if not sl.saturated:
        return Verdict(False, counterexample="budget")
    ess = sorted(sl.essential())
    expected = translates(action, q)
    if ess != expected:
        extra = [t for t in ess if t not in expected]
        return Verdict(False, counterexample=extra[0] if extra else "missing translate")
    return Verdict(True, witness=len(sl))


def c_operator(q: OpTable) -> OpTable:
    """C(x, y, z, w) = q(x, q(x, z, w), q(z, y, w))."""
    c = q.cube
    x, y, z, w = argument_grid(q.n, 4)
    return OpTable(q.n, 4, c[x, c[x, z, w], c[z, y, w]])


def boolean_sum_table(q: OpTable, e: int) -> np.ndarray:
    """a + b := q(a, b, e)."""
    return q.cube[:, :, e].astype(np.int64)


def certify_minimal_boolean(action, q: OpTable, e: int | None = None, arities=(3, 5),
                            max_entries: int = 1 << 16, budget: Budget | None = None) -> dict:
    """Structural certificate that q is minimal above <G>.

    Rebuilds the Boolean group (B, +) with zero ``e``, checks q = x + y + z,
    checks that every essential operation of each listed arity is g applied
    to a sum of an odd number of variables and generates q back, and checks
    the C-operator identity.  Arities whose tables exceed ``max_entries`` are
    skipped and reported.
    """
    _require(action)
    if not (check_ginv_steiner(action, q) and check_boolean(action, q)):
        raise PreconditionError("not a G-invariant Boolean Steiner 3-quasigroup")
    n = q.n
    e = action.representatives[0] if e is None else e
    plus = boolean_sum_table(q, e)
    pts = np.arange(n)
    if not np.array_equal(plus[e], pts) or not np.array_equal(plus, plus.T):
        raise CertificateError("+ is not commutative with identity e")
    if not np.all(plus[pts, pts] == e):
        raise CertificateError("+ has an element of order other than 2")
    x, y, z = argument_grid(n, 3)
    if not np.array_equal(plus[plus[x, y], z], plus[x, plus[y, z]]):
        raise CertificateError("+ is not associative")
    if not np.array_equal(q.values, plus[plus[x, y], z]):
        raise CertificateError("q differs from x + y + z")
    shapes = {}
    skipped = []
    for r in arities:
        if n ** r > max_entries:
            skipped.append(r)
            continue
        sl = generate_slice(action, [q], r, budget)
        if not sl.saturated:
            skipped.append(r)
            continue
        grid = argument_grid(n, r)
        count = 0
        tested: set = set()
        for t in sl.essential():
            deps = [i for i in range(r) if np.any(t.cube != np.take(t.cube, [0], axis=i))]
            if len(deps) % 2 == 0:
                raise CertificateError(f"essential {r}-ary operation depends on {len(deps)} variables")
            total = np.full(n ** r, e, dtype=np.int64)
            for i in deps:
                total = plus[total, grid[i]]
            g = action.transporter[total[0], t.values[0]]
            if g < 0 or not np.array_equal(action.perms[g][total], t.values):
                raise CertificateError(f"essential {r}-ary operation is not g applied to a sum")
            key = t.values.tobytes()
            if key not in tested:
                tested |= symmetry_class(action, t)
                if not regenerates(action, t, q, budget):
                    raise CertificateError(f"essential {r}-ary operation does not generate q")
            count += 1
        shapes[r] = {"slice_size": len(sl), "essential": count}
    if c_operator(q) != OpTable.projection(n, 4, 1):
        raise CertificateError("C-operator is not the second projection")
    return {"zero": int(e), "arities": shapes, "skipped_arities": skipped, "c_operator": "pi_2"}
