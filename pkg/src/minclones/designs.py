"""Steiner systems and GF(2) geometry.

Points of PG(m, 2) are the nonzero bitmasks 1 .. 2**(m+1) - 1 and its lines
are the triples {a, b, a ^ b}.  Weights live in a Boolean group written as
bit vectors under XOR, so ``0`` is the identity and addition is ``^``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, factorial, prod
from typing import Mapping

SQS_CAP = 8
WD_CAP = 4

Block = tuple  # sorted 4-tuple of points
Line = tuple  # sorted 3-tuple of points


class DesignError(ValueError):
    pass


@dataclass(frozen=True)
class SQS:
    """A Steiner quadruple system on points 0..point_count-1."""

    point_count: int
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(sorted(tuple(sorted(b)) for b in self.blocks)))

    def fourth(self) -> dict:
        """Map each covered 3-subset (sorted tuple) to the remaining block point."""
        out = {}
        for b in self.blocks:
            for i in range(4):
                out[b[:i] + b[i + 1:]] = b[i]
        return out

    def is_valid(self) -> bool:
        s = self.point_count
        fourth = self.fourth()
        if len(self.blocks) * 4 != len(fourth):
            return False
        return all(t in fourth for t in itertools.combinations(range(s), 3))


@dataclass(frozen=True)
class STS:
    """A Steiner triple system; ``points`` need not be 0..n-1."""

    points: tuple
    lines: tuple

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(sorted(tuple(sorted(ln)) for ln in self.lines)))

    def third(self) -> dict:
        out = {}
        for a, b, c in self.lines:
            out[(a, b)] = out[(b, a)] = c
            out[(a, c)] = out[(c, a)] = b
            out[(b, c)] = out[(c, b)] = a
        return out

    def is_valid(self) -> bool:
        third = self.third()
        return all((a, b) in third for a, b in itertools.combinations(self.points, 2)) \
            and len(third) == 6 * len(self.lines)


# -- Steiner quadruple systems ----------------------------------------------------


def boolean_sqs(m: int) -> SQS:
    """Blocks {a, b, c, a^b^c} on the vectors of (Z_2)^m."""
    if m < 2:
        raise DesignError("need m >= 2")
    if m > 6:
        raise DesignError("size budget exceeded")
    size = 2 ** m
    blocks = set()
    for a, b, c in itertools.combinations(range(size), 3):
        d = a ^ b ^ c
        if d not in (a, b, c):
            blocks.add(tuple(sorted((a, b, c, d))))
    return SQS(size, tuple(blocks))


def enumerate_sqs(s: int) -> list[SQS]:
    """All labelled SQS on s points, in lexicographic order of choices.

    Backtracks on the smallest uncovered triple.  With fewer than three
    points there is nothing to cover and the empty system is returned; three
    points cannot be covered, so s = 3 gives nothing.
    """
    if s < 1 or s > SQS_CAP:
        raise DesignError(f"point count must lie in 1..{SQS_CAP}")
    if s < 3:
        return [SQS(s, ())]
    triples = list(itertools.combinations(range(s), 3))
    covered = set()
    blocks: list = []
    found = []

    def search(start):
        while start < len(triples) and triples[start] in covered:
            start += 1
        if start == len(triples):
            found.append(SQS(s, tuple(blocks)))
            return
        t = triples[start]
        for d in range(s):
            if d in t:
                continue
            blk = tuple(sorted(t + (d,)))
            subs = list(itertools.combinations(blk, 3))
            if any(u in covered for u in subs):
                continue
            covered.update(subs)
            blocks.append(blk)
            search(start + 1)
            blocks.pop()
            covered.difference_update(subs)

    search(0)
    return found


def is_boolean_sqs(sqs: SQS) -> bool:
    """Blocks meeting in two points have their symmetric difference as a block."""
    blockset = set(sqs.blocks)
    for b1, b2 in itertools.combinations(sqs.blocks, 2):
        common = set(b1) & set(b2)
        if len(common) == 2:
            if tuple(sorted(set(b1) ^ set(b2))) not in blockset:
                return False
    return True


def induced_sts(sqs: SQS, point: int) -> STS:
    """Blocks through ``point``, with the point removed."""
    if not 0 <= point < sqs.point_count:
        raise DesignError("point out of range")
    lines = [tuple(x for x in b if x != point) for b in sqs.blocks if point in b]
    return STS(tuple(x for x in range(sqs.point_count) if x != point), tuple(lines))


def sqs_count_formula(n: int) -> int:
    """Number of labelled Boolean SQS on 2**n points, for n >= 1."""
    s = 2 ** n
    return factorial(s) // (s * prod(s - 2 ** k for k in range(n)))


# -- projective geometry over GF(2) ---------------------------------------------


def pg_points(m: int) -> list[int]:
    return list(range(1, 2 ** (m + 1)))


def pg_lines(m: int) -> list[Line]:
    out = []
    for a, b in itertools.combinations(pg_points(m), 2):
        c = a ^ b
        if c > b:
            out.append((a, b, c))
    return out


def pg_sts(m: int) -> STS:
    return STS(tuple(pg_points(m)), tuple(pg_lines(m)))


def wd(m: int) -> int:
    """Size of a weight-determining line set of PG(m, 2)."""
    if m < 0:
        raise DesignError("m must be non-negative")
    return 2 ** (m + 1) - m - 2


def _line(*pts) -> Line:
    return tuple(sorted(pts))


def weight_determining_set(m: int) -> list[Line]:
    """A weight-determining set, built from the hyperplane of masks below 2**m
    together with every line through the point 2**m."""
    if m < 0 or m > WD_CAP:
        raise DesignError(f"m must lie in 0..{WD_CAP}")
    if m == 0:
        return []
    if m == 1:
        return [(1, 2, 3)]
    a = 1 << m
    through = [_line(a, x, a ^ x) for x in range(1, a)]
    return weight_determining_set(m - 1) + through


def extend_constant_on_planes(partial: Mapping[Line, int], m: int) -> dict:
    """The unique constant-on-planes extension of weights given on the
    weight-determining set of PG(m, 2)."""
    wdset = weight_determining_set(m)
    missing = [ln for ln in wdset if ln not in partial]
    if missing or len(partial) != len(wdset):
        raise DesignError("partial weighting must cover exactly the weight-determining set")
    return _extend(dict(partial), m)


def _extend(h: dict, m: int) -> dict:
    if m <= 1:
        return dict(h)
    a = 1 << m
    lower = {ln: v for ln, v in h.items() if ln[2] < a}
    full = _extend(lower, m - 1)
    for ln, v in h.items():
        if a in ln:
            full[ln] = v
    for ln in pg_lines(m):
        if ln in full:
            continue
        # the line meets the hyperplane in one point p; the plane through a
        # and the line meets the hyperplane in the line {p, q, p^q}
        p = next(x for x in ln if x < a)
        q, r = (x ^ a for x in ln if x != p)
        full[ln] = (full[_line(p, q, r)] ^ full[_line(a, q, q ^ a)]
                    ^ full[_line(a, r, r ^ a)])
    return full


def planes(sts: STS) -> list[tuple]:
    """All Fano subplanes, each as a sorted 7-tuple of points."""
    third = sts.third()
    found = set()
    for b, c, d in itertools.combinations(sts.points, 3):
        if third.get((b, c)) == d:
            continue
        pts = {b, c, d, third[(b, c)], third[(b, d)], third[(c, d)]}
        pts.add(third[(third[(b, c)], d)])
        found.add(tuple(sorted(pts)))
    return sorted(found)


def plane_violation(h: Mapping[Line, int], sts: STS):
    """First plane on which line sums through its points differ, or None."""
    for plane in planes(sts):
        pset = set(plane)
        lines = [ln for ln in sts.lines if set(ln) <= pset]
        sums = set()
        for p in plane:
            acc = 0
            for ln in lines:
                if p in ln:
                    acc ^= h[ln]
            sums.add(acc)
        if len(sums) > 1:
            return plane
    return None


def is_constant_on_planes(h: Mapping[Line, int], sts: STS) -> bool:
    return plane_violation(h, sts) is None


# -- transparent block weightings ---------------------------------------------


def boolean_coordinates(sqs: SQS, base: int) -> dict:
    """Vector coordinates of the points of a Boolean SQS with ``base`` as zero.

    Addition is x + y = the fourth point of the block through {x, y, base}.
    Basis vectors are picked greedily in increasing point order.
    """
    fourth = sqs.fourth()

    def add(x, y):
        if x == base:
            return y
        if y == base:
            return x
        if x == y:
            return base
        return fourth[tuple(sorted((x, y, base)))]

    span = {base: 0}
    for p in range(sqs.point_count):
        if p in span:
            continue
        bit = 1 << (len(span).bit_length() - 1)
        for x, v in list(span.items()):
            span[add(x, p)] = v | bit
    if len(span) != sqs.point_count:
        raise DesignError("SQS is not Boolean")
    return span


def lift_to_transparent(sqs: SQS, base: int, h: Mapping[Line, int]) -> dict:
    """Block weighting: blocks through ``base`` take the weight of their line,
    other blocks {b, c, d, e} take h({b, c, f}) + h({d, e, f}) where
    {base, b, c, f} is a block."""
    sts = induced_sts(sqs, base)
    if not is_constant_on_planes(h, sts):
        raise DesignError("line weighting is not constant on planes")
    fourth = sqs.fourth()
    g = {}
    for blk in sqs.blocks:
        if base in blk:
            g[blk] = h[tuple(x for x in blk if x != base)]
        else:
            b, c, d, e = blk
            f = fourth[tuple(sorted((base, b, c)))]
            g[blk] = h[_line(b, c, f)] ^ h[_line(d, e, f)]
    return g


def restrict_to_lines(sqs: SQS, base: int, g: Mapping[Block, int]) -> dict:
    """Inverse of the lift: h(line) = g(line + base)."""
    return {tuple(x for x in blk if x != base): v for blk, v in g.items() if base in blk}


def transparency_violation(sqs: SQS, g: Mapping[Block, int]):
    """Blocks (H1, H2) meeting in two points with g(H1)+g(H2) != g(H1 ^ H2)."""
    for b1, b2 in itertools.combinations(sqs.blocks, 2):
        if len(set(b1) & set(b2)) == 2:
            b3 = tuple(sorted(set(b1) ^ set(b2)))
            if b3 not in g or g[b1] ^ g[b2] != g[b3]:
                return b1, b2
    return None


def check_transparent(sqs: SQS, g: Mapping[Block, int]) -> bool:
    return transparency_violation(sqs, g) is None


def transparent_weightings(sqs: SQS, group_rank: int, base: int = 0) -> list[dict]:
    """Every transparent weighting of a Boolean SQS with values in (Z_2)^group_rank.

    Enumerated as lifts of constant-on-planes line weightings, which in turn
    are the extensions of arbitrary values on a weight-determining set.
    """
    s = sqs.point_count
    if s < 4:
        return [{}]
    n = s.bit_length() - 1
    coords = boolean_coordinates(sqs, base)
    point_of = {v: p for p, v in coords.items()}
    wdset = weight_determining_set(n - 1)
    out = []
    for values in itertools.product(range(2 ** group_rank), repeat=len(wdset)):
        hpg = extend_constant_on_planes(dict(zip(wdset, values)), n - 1)
        h = {_line(*(point_of[v] for v in ln)): w for ln, w in hpg.items()}
        out.append(lift_to_transparent(sqs, base, h))
    return out


def brute_force_constant_on_planes(sts: STS, group_rank: int) -> list[dict]:
    """All constant-on-planes maps found by scanning every line weighting."""
    lines = sts.lines
    found = []
    for values in itertools.product(range(2 ** group_rank), repeat=len(lines)):
        h = dict(zip(lines, values))
        if is_constant_on_planes(h, sts):
            found.append(h)
    return found


def ginv_boolean_count(n: int, group_order: int) -> int:
    """Closed-form count of G-invariant Boolean Steiner 3-quasigroups with
    2**n orbits."""
    if n == 0:
        return 1
    s = 2 ** n
    return factorial(s - 1) * group_order ** (s - n - 1) // prod(s - 2 ** k for k in range(n))


def block_count(s: int) -> int:
    return comb(s, 3) // 4
