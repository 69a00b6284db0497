"""Orbital extension property for 3-constrained homogeneous 2-multitournaments.

A 2-multitournament puts exactly one coloured arc between any two points.
Its automorphism group has four orbitals on pairs of distinct points,
one per edge label.  In a Fraisse class given by forbidden triangles, a
point z with (u, z) and (v, z) in an orbital O exists exactly when the
triangle on {u, v, z} avoids the bounds; this module assumes that
extension property and works at the level of triangles.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True, order=True)
class EdgeLabel:
    """Arc of colour ``color`` from the first point to the second (forward) or back."""

    color: int
    forward: bool = True

    def __post_init__(self):
        if self.color not in (1, 2):
            raise ValueError("colour must be 1 or 2")

    def __str__(self):
        return ("→" if self.forward else "←") + str(self.color)

    def swapped(self) -> "EdgeLabel":
        return EdgeLabel(3 - self.color, self.forward)


EDGE_LABELS = (EdgeLabel(1, True), EdgeLabel(1, False), EdgeLabel(2, True), EdgeLabel(2, False))


def parse_label(text: str) -> EdgeLabel:
    t = text.strip().replace("->", "→").replace("<-", "←")
    if len(t) != 2 or t[0] not in "→←" or t[1] not in "12":
        raise ValueError(f"bad edge label {text!r}")
    return EdgeLabel(int(t[1]), t[0] == "→")


@dataclass(frozen=True, order=True)
class TriangleSpec:
    """C(i,j,k): a -i-> b -j-> c -k-> a.  L(i,j,k): a -i-> b -j-> c and a -k-> c."""

    kind: str
    colors: tuple

    def __post_init__(self):
        if self.kind not in ("C", "L") or len(self.colors) != 3 or set(self.colors) - {1, 2}:
            raise ValueError(f"bad triangle {self.kind}{self.colors}")
        if self.kind == "C":
            c = tuple(self.colors)
            object.__setattr__(self, "colors", min(c[i:] + c[:i] for i in range(3)))

    def __str__(self):
        return self.kind + "".join(map(str, self.colors))

    def swapped(self) -> "TriangleSpec":
        return TriangleSpec(self.kind, tuple(3 - c for c in self.colors))


def parse_triangle(text: str) -> TriangleSpec:
    t = text.strip()
    if len(t) != 4:
        raise ValueError(f"bad triangle {text!r}")
    return TriangleSpec(t[0].upper(), tuple(int(ch) for ch in t[1:]))


def classify_triangle(arcs: dict) -> TriangleSpec:
    """Triangle type from ``{(x, y): colour}`` with one arc per pair of 3 points."""
    pts = sorted({p for arc in arcs for p in arc})
    out = {p: [y for (x, y) in arcs if x == p] for p in pts}
    degree = {p: len(v) for p, v in out.items()}
    if sorted(degree.values()) == [1, 1, 1]:
        a = pts[0]
        b = out[a][0]
        c = out[b][0]
        return TriangleSpec("C", (arcs[(a, b)], arcs[(b, c)], arcs[(c, a)]))
    a = next(p for p in pts if degree[p] == 2)
    b = next(p for p in pts if degree[p] == 1)
    c = next(p for p in pts if degree[p] == 0)
    return TriangleSpec("L", (arcs[(a, b)], arcs[(b, c)], arcs[(a, c)]))


def triangle_of(pair_label: EdgeLabel, orbital: EdgeLabel) -> TriangleSpec:
    """Triangle on u, v, z with u-v labelled ``pair_label`` and both (u, z) and
    (v, z) in ``orbital``."""
    u, v, z = "u", "v", "z"
    arcs = {}

    def put(x, y, label):
        if label.forward:
            arcs[(x, y)] = label.color
        else:
            arcs[(y, x)] = label.color

    put(u, v, pair_label)
    put(u, z, orbital)
    put(v, z, orbital)
    return classify_triangle(arcs)


BoundSet = frozenset

PRESETS = {
    "s3tilde": frozenset(map(parse_triangle, ["C111", "C222", "L111", "L122", "L212"])),
    "s4": frozenset(map(parse_triangle, ["C111", "C112", "L121", "L211", "L221", "L222"])),
}


def parse_bounds(text: str) -> frozenset:
    """One triangle per line, e.g. ``C111`` or ``L212``; ``#`` starts a comment."""
    out = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.add(parse_triangle(line))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return frozenset(out)


@dataclass
class OEPVerdict:
    """``holds`` is the verdict; ``table[O][rho]`` is the triangle forced by
    orbital O on a pair labelled rho, marked when it is a bound."""

    holds: bool
    witness_pair: EdgeLabel | None
    good_orbitals: list
    obstructions: dict
    table: dict

    def as_dict(self) -> dict:
        return {
            "verdict": "YES" if self.holds else "NO",
            "witness_pair": None if self.witness_pair is None else str(self.witness_pair),
            "good_orbitals": [str(o) for o in self.good_orbitals],
            "obstructions": {str(o): {"pair": str(p), "triangle": str(t)}
                             for o, (p, t) in self.obstructions.items()},
        }


def has_oep(bounds: Iterable[TriangleSpec]) -> OEPVerdict:
    """Whether some orbital O serves every pair: for each pair label rho the
    triangle forced by rho and O is allowed.

    When no orbital works, each orbital is paired with the first label that
    blocks it, and ``witness_pair`` is a single label blocking all four
    orbitals if there is one.
    """
    bounds = frozenset(bounds)
    table = {o: {p: triangle_of(p, o) for p in EDGE_LABELS} for o in EDGE_LABELS}
    obstructions = {}
    good = []
    for o in EDGE_LABELS:
        blocking = [p for p in EDGE_LABELS if table[o][p] in bounds]
        if blocking:
            obstructions[o] = (blocking[0], table[o][blocking[0]])
        else:
            good.append(o)
    witness = None
    if not good:
        witness = next((p for p in EDGE_LABELS
                        if all(table[o][p] in bounds for o in EDGE_LABELS)), None)
        if witness is not None:
            obstructions = {o: (witness, table[o][witness]) for o in EDGE_LABELS}
    return OEPVerdict(bool(good), witness, good, obstructions, table)
