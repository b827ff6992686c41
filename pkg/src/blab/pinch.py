"""Pinching the circle along a finite elamination.

Walk counterclockwise along an arc between consecutive tips.  On arriving at
tip σ_i of a leaf with cyclically ordered tips σ_0 < ... < σ_m, continue from
σ_{i-1 mod m+1}.  The closed walks are the components of S¹ mod Λ.  For a
chord σ_{i-1} = σ_{i+1}; for more tips only σ_{i-1} closes the region cut
off by the edge σ_{i-1}σ_i.
"""

from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .core import ONE, Leaf, arc_length, fmt
from .errors import CrossingLeaves, DegenerateParameter, HeightCollision, NonConformingLength


def arc_cycles(n: int, succ: Sequence[int]) -> list:
    """Cycles of the arc permutation for ``n`` sorted tips.

    Arc i runs from tip i to tip i+1.  ``succ[g]`` is the global index of the
    tip where the walk resumes after arriving at tip g (the previous tip of
    the same leaf).  Returns lists of arc indices.
    """
    seen = bytearray(n)
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = 1
            cyc.append(i)
            i = succ[(i + 1) % n]
        cycles.append(cyc)
    return cycles


@dataclass(frozen=True)
class Component:
    id: int
    arcs: tuple          # ((start, end), ...) in traversal order
    length: Fraction
    adjacency: tuple     # ((leaf id, tip index), ...) reached at each arc end

    def to_json(self) -> dict:
        return {"id": self.id, "length": fmt(self.length),
                "arcs": [[fmt(a), fmt(b)] for a, b in self.arcs]}


class PinchedCircle:
    """S¹ mod Λ for a finite, non-crossing leaf list with distinct tips."""

    def __init__(self, leaves: Sequence[Leaf]):
        self.leaves = tuple(leaves)
        owner = []
        for i, leaf in enumerate(self.leaves):
            for k, x in enumerate(leaf.tips):
                owner.append((x, i, k))
        owner.sort()
        self.tips = [x for x, _, _ in owner]
        for a, b in zip(self.tips, self.tips[1:]):
            if a == b:
                raise DegenerateParameter(f"coincident tips at {fmt(a)}")
        self.tip_index = {x: (i, k) for x, i, k in owner}
        n = len(owner)
        if n == 0:
            self.components = [Component(0, ((Fraction(0), Fraction(0)),), ONE, ())]
            self._arc_comp = []
            return
        pos = {(i, k): g for g, (_, i, k) in enumerate(owner)}
        succ = [pos[(i, (k - 1) % len(self.leaves[i].tips))] for _, i, k in owner]
        cycles = arc_cycles(n, succ)
        if len(cycles) != 1 + sum(leaf.multiplicity for leaf in self.leaves):
            raise CrossingLeaves("component count disagrees with multiplicities: leaves cross")
        # canonical start: the arc with the smallest start angle
        cycles = [c[c.index(min(c)):] + c[:c.index(min(c))] for c in cycles]
        cycles.sort(key=min)
        self._arc_comp = [0] * n
        comps = []
        for cid, cyc in enumerate(cycles):
            arcs = []
            adj = []
            for a in cyc:
                b = (a + 1) % n
                arcs.append((self.tips[a], self.tips[b]))
                adj.append(owner[b][1:])
                self._arc_comp[a] = cid
            length = sum((arc_length(s, e) for s, e in arcs), Fraction(0))
            comps.append(Component(cid, tuple(arcs), length, tuple(adj)))
        self.components = comps

    def __len__(self):
        return len(self.components)

    def lengths(self) -> list:
        return [c.length for c in self.components]

    def component_of(self, x) -> int:
        """Id of the component whose arcs contain the (non-tip) angle ``x``."""
        if not self.tips:
            return 0
        x = Fraction(x) % 1
        j = bisect.bisect_left(self.tips, x)
        if j < len(self.tips) and self.tips[j] == x:
            raise DegenerateParameter(f"angle {fmt(x)} coincides with a pinch tip")
        return self._arc_comp[(j - 1) % len(self.tips)]

    def to_json(self) -> list:
        return [c.to_json() for c in self.components]


def pinch_circle(leaves: Sequence[Leaf]) -> PinchedCircle:
    return PinchedCircle(list(leaves))


def level_components(leaves: Sequence[Leaf], h) -> PinchedCircle:
    """Pinch along the leaves strictly taller than ``h``."""
    h = Fraction(h)
    if any(leaf.height == h for leaf in leaves):
        raise HeightCollision(f"level {fmt(h)} equals a leaf height")
    return PinchedCircle([leaf for leaf in leaves if leaf.height > h])


@dataclass(frozen=True)
class Census:
    """Histogram of component lengths ℓ/3^n at depth n."""

    depth: int
    entries: tuple  # sorted ((ell, count), ...)

    @property
    def counts(self) -> dict:
        return dict(self.entries)

    def row(self) -> list:
        """Counts at ℓ = 1, 2, 4, ..., 2^n, as laid out in the published table."""
        c = self.counts
        return [c.get(2 ** k, 0) for k in range(self.depth + 1)]

    def total(self) -> int:
        return sum(c for _, c in self.entries)

    def weighted_total(self) -> int:
        return sum(ell * c for ell, c in self.entries)

    def csv_rows(self) -> list:
        return [(self.depth, ell, c) for ell, c in self.entries]


def census_of_lengths(lengths, n: int, base: int = 3) -> Census:
    scale = base ** n
    hist = Counter()
    for length in lengths:
        ell = Fraction(length) * scale
        if ell.denominator != 1:
            raise NonConformingLength(f"length {fmt(length)} is not a multiple of 1/{scale}")
        hist[int(ell)] += 1
    return Census(n, tuple(sorted(hist.items())))


def census(p: PinchedCircle, n: int) -> Census:
    return census_of_lengths(p.lengths(), n)


class PantsRecord(NamedTuple):
    component: int       # id at the upper level t2
    cuffs: int           # components at the lower level t1 inside it
    waist: Fraction      # its length
    saddle_multiplicity_sum: int

    @property
    def ok(self) -> bool:
        return self.cuffs == 1 + self.saddle_multiplicity_sum


def monkey_pants_check(leaves: Sequence[Leaf], t1, t2) -> list:
    """Euler bookkeeping for the height band (t1, t2).

    Each component at level t2 splits into #cuffs components at level t1, and
    #cuffs must be 1 + the total multiplicity of band leaves inside it.
    """
    t1, t2 = Fraction(t1), Fraction(t2)
    if not t1 < t2:
        raise ValueError("need t1 < t2")
    low = level_components(leaves, t1)
    high = level_components(leaves, t2)
    cuffs = Counter()
    for comp in low.components:
        a, b = comp.arcs[0]
        mid = a + arc_length(a, b) / 2
        cuffs[high.component_of(mid)] += 1
    saddles = Counter()
    for leaf in leaves:
        if t1 < leaf.height < t2:
            homes = {high.component_of(x) for x in leaf.tips}
            if len(homes) != 1:
                raise CrossingLeaves(f"{leaf!r} straddles components at level {fmt(t2)}")
            saddles[homes.pop()] += leaf.multiplicity
    return [PantsRecord(c.id, cuffs[c.id], c.length, saddles[c.id]) for c in high.components]


__all__ = [
    "Component", "PinchedCircle", "Census", "PantsRecord", "arc_cycles", "pinch_circle",
    "level_components", "census", "census_of_lengths", "monkey_pants_check",
]
