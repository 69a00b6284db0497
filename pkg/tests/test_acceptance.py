"""Acceptance gate: one test per criterion, each with its time limit.

Run directly (``python tests/test_acceptance.py``) or through pytest; both
print one PASS/FAIL line per criterion.
"""
import itertools
import math
import sys
import time

import numpy as np
import pytest

from minclones import canonical, clone, constructions, designs, group, oep, optable, quasigroups
from minclones.optable import OpTable, argument_grid

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # script mode
    ACCEPTANCE_LINES = []

pytestmark = pytest.mark.acceptance


def klein_mixed_action():
    """Klein four-group regular on 0..3 and fixing 4 and 5: three orbits, not free."""
    return group.FiniteAction(6, [[1, 0, 3, 2, 4, 5], [2, 3, 0, 1, 4, 5]], name="klein+2 fixed")


# -- criteria ---------------------------------------------------------------------------


def criterion_1():
    z2 = group.free_boolean_action(1, 1)
    allowed = {"G-quasi-minority", "odd-majority", "odd-malcev"}
    tags = {}
    problems = []
    for code in range(256):
        vals = [(code >> i) & 1 for i in range(8)]
        f = OpTable(2, 3, vals)
        if optable.in_group_part(f, z2) is not None:
            continue
        if not clone.is_almost_minimal(z2, f):
            continue
        tag = optable.rosenberg_type(f, z2)
        tags[tag] = tags.get(tag, 0) + 1
        if tag not in allowed or optable.is_orbit_semiprojection(f, z2):
            problems.append((vals, tag))
    ok = not problems and tags == {"G-quasi-minority": 2, "odd-majority": 2, "odd-malcev": 6}
    return ok, f"almost minimal by tag {tags}", 10


def criterion_2():
    rows = []
    ok = True
    for s in (1, 2, 3, 4):
        a = group.free_boolean_action(s, 1)
        enum = quasigroups.enumerate_ginv_boolean(a)
        brute = quasigroups.brute_force_ginv_boolean(a)
        ok &= enum == brute
        rows.append((s, len(enum), len(brute)))
    ok &= [r[1] for r in rows] == [1, 1, 0, 2]
    a8 = group.free_boolean_action(8, 1)
    n8 = len(quasigroups.enumerate_ginv_boolean(a8))
    formula = [designs.ginv_boolean_count(m, 2) for m in (0, 1, 2, 3)]
    ok &= formula == [1, 1, 2, 480] and n8 == formula[3]
    return ok, f"(s, enum, brute) {rows}; s=8 enum {n8}, formula {formula}", 120


def criterion_3():
    wds = [designs.wd(m) for m in (1, 2, 3)]
    built = [len(designs.weight_determining_set(m)) for m in (1, 2, 3)]
    fano = len(designs.brute_force_constant_on_planes(designs.pg_sts(2), 1))
    ok = wds == [1, 4, 11] and built == wds and fano == 16 == 2 ** designs.wd(2)
    return ok, f"wd {wds}, constructed {built}, Fano constant-on-planes weightings {fano}", 5


def criterion_4():
    systems = designs.enumerate_sqs(8)
    ok = (len(systems) == 30 == math.factorial(8) // (8 * 7 * 6 * 4)
          and all(designs.is_boolean_sqs(s) for s in systems)
          and all(s.is_valid() for s in systems))
    return ok, f"{len(systems)} labelled SQS(8), all Boolean", 120


def criterion_5():
    checked = 0
    ok = True
    for order_rank in (1, 2):
        for s in (1, 2, 4):
            a = group.free_boolean_action(s, order_rank)
            for q in quasigroups.enumerate_ginv_boolean(a):
                ok &= bool(quasigroups.steiner_slice_law(a, q))
                checked += 1
    return ok and checked > 0, f"slice law on {checked} quasigroups (Z2 and Klein, s = 1, 2, 4)", 300


def criterion_6():
    a = group.free_boolean_action(2, 1)
    m = constructions.odd_majority(a)
    ms = constructions.mstar(a, m)
    sl = clone.generate_slice(a, [ms], 3)
    strict = clone.is_strictly_almost_minimal(a, m, hints=[ms])
    ok = (bool(optable.is_odd_majority(m, a)) and bool(optable.is_G_quasi_minority(ms, a))
          and sl.saturated and m not in sl
          and strict.value is False and strict.certificate == ms)
    return ok, f"m* slice {len(sl)} tables without m; strict = {strict.label}", 60


def criterion_7():
    details = []
    ok = True
    for a in (group.free_boolean_action(3, 1), klein_mixed_action()):
        for k in (2, 3):
            r = constructions.verify_palfy_identities(a, k)
            ok &= r["ok"] and r["checked"]["uncovered"] == 0
            c = constructions.verify_palfy_closure(a, k)
            ok &= c["certified"]
            details.append(f"{a.name} k={k}: {sum(r['checked'].values())} identity cases, "
                           f"certificate {c['certified']}")
    c = constructions.verify_palfy_closure(group.regular_cyclic_action(3, 2), 2)
    ok &= c["certified"]
    details.append(f"Z3 free s=2 k=2: certificate {c['certified']}")
    return ok, "; ".join(details), 120


def criterion_8():
    s3 = oep.has_oep(oep.PRESETS["s3tilde"])
    s4 = oep.has_oep(oep.PRESETS["s4"])
    empty = oep.has_oep(frozenset())
    expected = {"→1": "L111", "←1": "L111", "→2": "L122", "←2": "L212"}
    got = {str(o): str(t) for o, (_, t) in s3.obstructions.items()}
    ok = (not s3.holds and str(s3.witness_pair) == "→1" and got == expected
          and not s4.holds and empty.holds and len(empty.good_orbitals) == 4)
    return ok, f"S3~ NO via {s3.witness_pair} {got}; S(4) NO; empty YES", 1


def criterion_9():
    w = canonical.Window()
    expected = canonical.family_orbital_table()
    members = canonical.members(w, 50, seed=2024)
    ok = True
    for m in members:
        rep = canonical.is_canonical_on_pairs(m)
        ok &= rep.canonical and canonical.OrbitalOp(2, rep.table) == expected
        ok &= canonical.refute_binary_injective(m)["verdict"] == "non-injective"
    ok &= canonical.check_absorption(expected) is None
    ok &= all(canonical.wnu_tower(expected, n)[1] is None for n in range(3, 7))
    return ok, f"{len(members)} members canonical with one shared table, WNU 3..6, collisions found", 60


def _weak_osp_skeletons(action):
    """All operations given by a rule (s, g) for each pair of positions, for
    actions where every triple has two entries in one orbit."""
    n = action.n
    x = argument_grid(n, 3)
    orb = action.orbit_of[x]
    masks = {(i, j): orb[i] == orb[j] for i, j in itertools.combinations(range(3), 2)}
    rules = list(itertools.product(range(3), range(action.order)))
    for choice in itertools.product(rules, repeat=3):
        vals = np.full(n ** 3, -1, dtype=np.int64)
        consistent = True
        for (pair, mask), (s, g) in zip(masks.items(), choice):
            v = action.perms[g][x[s]]
            clash = mask & (vals >= 0) & (vals != v)
            if clash.any():
                consistent = False
                break
            vals = np.where(mask, v, vals)
        if consistent and (vals >= 0).all():
            yield OpTable(n, 3, vals)


def _random_quasi_majority(action, rng):
    n = action.n
    x, y, z = argument_grid(n, 3)
    if rng.random() < 0.5:
        u = action.perms[rng.integers(action.order)]
    else:
        u = rng.integers(n, size=n)
    rep = np.where(x == y, x, np.where(x == z, x, np.where(y == z, y, -1)))
    vals = rng.integers(n, size=n ** 3)
    if rng.random() < 0.5:
        # distinct triples follow a twisted projection on a random share of inputs
        s, g = rng.integers(3), rng.integers(action.order)
        follow = rng.random(n ** 3) < rng.choice([0.5, 0.9, 1.0])
        vals = np.where(follow, action.perms[g][(x, y, z)[s]], vals)
    return OpTable(n, 3, np.where(rep >= 0, u[np.maximum(rep, 0)], vals))


def _random_quasi_semiprojection(action, rng):
    n = action.n
    grid = argument_grid(n, 3)
    i, g = rng.integers(3), rng.integers(action.order)
    base = action.perms[g][grid[i]]
    repeated = optable.non_injective_mask(n, 3)
    orb = action.orbit_of[grid]
    collide = (orb[0] == orb[1]) | (orb[0] == orb[2]) | (orb[1] == orb[2])
    keep = rng.choice([1.0, 1.0, 0.999, 0.99, 0.9])
    follow = repeated | (collide & (rng.random(n ** 3) < keep))
    vals = np.where(follow, base, rng.integers(n, size=n ** 3))
    return OpTable(n, 3, vals)


def criterion_10():
    rng = np.random.default_rng(20240601)
    # exhaustive: weak orbit-semiprojection rules on free Klein actions
    skeletons = 0
    majority_skeletons = 0
    for s in (1, 2):
        a = group.free_boolean_action(s, 2)
        for f in _weak_osp_skeletons(a):
            skeletons += 1
            if optable.is_quasi_majority(f):
                majority_skeletons += 1
    # randomized quasi-majorities above groups of order > 2
    actions_big = [group.free_boolean_action(1, 2), group.free_boolean_action(2, 2),
                   group.regular_cyclic_action(3, 1), group.regular_cyclic_action(4, 1)]
    maj_cases = maj_am = 0
    for t in range(5000):
        a = actions_big[t % len(actions_big)]
        f = _random_quasi_majority(a, rng)
        if optable.in_group_part(f, a) is not None:
            continue
        maj_cases += 1
        maj_am += clone.is_almost_minimal(a, f).value is not False
    # randomized quasi-semiprojections: almost minimal implies orbit-semiprojection
    actions_any = [group.trivial_action(3), group.trivial_action(4),
                   group.FiniteAction(4, [[1, 0, 2, 3]]), group.free_boolean_action(2, 1),
                   group.FiniteAction(5, [[1, 0, 3, 2, 4]]), group.regular_cyclic_action(3, 1)]
    sp_cases = sp_am = sp_bad = sp_deviating = 0
    for t in range(5000):
        a = actions_any[t % len(actions_any)]
        f = _random_quasi_semiprojection(a, rng)
        if optable.in_group_part(f, a) is not None or optable.is_semiprojection(f) is None:
            continue
        sp_cases += 1
        osp = bool(optable.is_orbit_semiprojection(f, a))
        sp_deviating += not osp
        if clone.is_almost_minimal(a, f):
            sp_am += 1
            sp_bad += not osp
    ok = majority_skeletons == 0 and maj_am == 0 and sp_bad == 0 and sp_am > 0 and sp_deviating > 0
    detail = (f"{skeletons} weak orbit-semiprojection skeletons, {majority_skeletons} quasi-majorities; "
              f"{maj_cases} random quasi-majorities, {maj_am} almost minimal; "
              f"{sp_cases} random quasi-semiprojections ({sp_deviating} not orbit-semiprojections), "
              f"{sp_am} almost minimal, "
              f"{sp_bad} not orbit-semiprojections")
    return ok, detail, 300


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def run_criterion(i):
    t0 = time.perf_counter()
    ok, detail, limit = CRITERIA[i]()
    elapsed = time.perf_counter() - t0
    passed = bool(ok) and elapsed < limit
    line = (f"criterion {i:2d}: {'PASS' if passed else 'FAIL'} "
            f"({elapsed:.2f}s, limit {limit}s) {detail}")
    return passed, line


@pytest.mark.parametrize("i", range(1, 11))
def test_criterion(i):
    passed, line = run_criterion(i)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


if __name__ == "__main__":
    results = [run_criterion(i) for i in range(1, 11)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(p for p, _ in results) else 1)
