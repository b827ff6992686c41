"""Exact circle arithmetic and the elamination data model.

Angles are measured in turns and stored as ``Fraction`` reduced into [0, 1).
Heights are positive fractions.  They are abstract labels; nothing here ever
exponentiates them.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import CriticalCollapse, DomainError, SharedTip

ONE = Fraction(1)


def angle(x) -> Fraction:
    """Coerce ``x`` (int, Fraction, or "p/q" string) to an angle in [0, 1)."""
    if isinstance(x, str):
        x = parse_rational(x)
    return Fraction(x) % 1


def height(x) -> Fraction:
    if isinstance(x, str):
        x = parse_rational(x)
    h = Fraction(x)
    if h <= 0:
        raise DomainError(f"height must be positive, got {h}")
    return h


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        p, q = text.split("/")
        p, q = int(p), int(q)
        if q <= 0:
            raise DomainError(f"bad denominator in {text!r}")
        return Fraction(p, q)
    return Fraction(int(text))


def fmt(q: Fraction) -> str:
    """Lowest-terms "p/q" string; integers are written "p/1"."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def arc_length(a: Fraction, b: Fraction) -> Fraction:
    """Counterclockwise length from a to b, in (0, 1]."""
    d = (b - a) % 1
    return d if d else ONE


def in_open_arc(x, a, b) -> bool:
    """True iff x lies in the open counterclockwise arc (a, b)."""
    return 0 < (x - a) % 1 < (b - a) % 1 or (a == b and x != a)


@dataclass(frozen=True)
class Leaf:
    """A vein with tips at distinct angles, all at one height.

    ``depth`` and ``origin`` are optional labels and take no part in equality.
    """

    tips: tuple
    height: Fraction
    depth: int | None = field(default=None, compare=False)
    origin: int | None = field(default=None, compare=False)

    def __post_init__(self):
        tips = tuple(sorted(angle(x) for x in self.tips))
        if len(tips) < 2:
            raise DomainError("a leaf needs at least two tips")
        if len(set(tips)) != len(tips):
            raise DomainError(f"leaf tips not distinct: {[fmt(x) for x in tips]}")
        object.__setattr__(self, "tips", tips)
        object.__setattr__(self, "height", height(self.height))

    @property
    def multiplicity(self) -> int:
        return len(self.tips) - 1

    def with_height(self, h) -> "Leaf":
        return Leaf(self.tips, h, self.depth, self.origin)

    def to_json(self) -> dict:
        out = {"tips": [fmt(x) for x in self.tips], "height": fmt(self.height)}
        if self.depth is not None:
            out["depth"] = self.depth
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Leaf":
        return cls(tuple(angle(x) for x in obj["tips"]), height(obj["height"]),
                   depth=obj.get("depth"))

    def __repr__(self):
        tips = ",".join(fmt(x) for x in self.tips)
        return f"Leaf({{{tips}}}@{fmt(self.height)})"


def chords_cross(a: Leaf, b: Leaf) -> bool:
    """True iff some pair of tips of ``a`` separates some pair of tips of ``b``."""
    if set(a.tips) & set(b.tips):
        raise SharedTip(f"{a!r} and {b!r} share a tip")
    # b is unlinked from a iff all its tips sit in one complementary arc of a
    slots = {bisect.bisect(a.tips, x) % len(a.tips) for x in b.tips}
    return len(slots) > 1


def _links(a: Leaf, b: Leaf) -> bool:
    # crossing test tolerant of shared tips: shared points never separate
    for i, x in enumerate(a.tips):
        for y in a.tips[i + 1:]:
            inside = outside = False
            for u in b.tips:
                if u == x or u == y:
                    continue
                if x < u < y:
                    inside = True
                else:
                    outside = True
            if inside and outside:
                return True
    return False


def leaf_image(p: Leaf, d: int) -> Leaf:
    """Image of a leaf under angle multiplication by ``d``; heights scale by d."""
    tips = sorted({(d * x) % 1 for x in p.tips})
    if len(tips) < 2:
        raise CriticalCollapse(f"{p!r} collapses under multiplication by {d}")
    depth = p.depth - 1 if p.depth else None
    return Leaf(tuple(tips), p.height * d, depth, p.origin)


class Violation(NamedTuple):
    kind: str          # "crossing", "duplicate-vein" or "saturation"
    leaves: tuple
    detail: str
    warning: bool = False


@dataclass(frozen=True)
class Elamination:
    leaves: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "leaves", tuple(self.leaves))

    def __len__(self):
        return len(self.leaves)

    def __iter__(self):
        return iter(self.leaves)

    def validate(self) -> list:
        return validate_elamination(self.leaves)

    def to_json(self) -> list:
        return [leaf.to_json() for leaf in self.leaves]

    @classmethod
    def from_json(cls, data: list) -> "Elamination":
        return cls(tuple(Leaf.from_json(x) for x in data))


def _noncrossing_fast(leaves: Sequence[Leaf]) -> bool:
    """Stack check for leaves with pairwise distinct tips, O(n log n)."""
    events = sorted((x, i) for i, leaf in enumerate(leaves) for x in leaf.tips)
    seen = [0] * len(leaves)
    stack = []
    for _, i in events:
        if seen[i] == 0:
            stack.append(i)
        elif not stack or stack[-1] != i:
            return False
        seen[i] += 1
        if seen[i] == len(leaves[i].tips):
            stack.pop()
    return True


def validate_elamination(leaves: Iterable[Leaf] | Elamination) -> list:
    """Return every violation; an empty list means the leaves form an elamination.

    Saturation failures are reported with ``warning=True``: finite truncations
    are not required to be saturated.
    """
    leaves = list(leaves)
    out = []
    by_tips = {}
    for i, leaf in enumerate(leaves):
        by_tips.setdefault(leaf.tips, []).append(i)
    for tips, idx in by_tips.items():
        if len(idx) > 1:
            out.append(Violation("duplicate-vein", tuple(idx),
                                 "leaves share the vein " + ",".join(fmt(x) for x in tips)))
    owners = {}
    for i, leaf in enumerate(leaves):
        for x in leaf.tips:
            owners.setdefault(x, []).append(i)
    shared = {x: idx for x, idx in owners.items() if len(idx) > 1}

    if not shared and _noncrossing_fast(leaves):
        return out
    for i in range(len(leaves)):
        for j in range(i + 1, len(leaves)):
            if leaves[i].tips != leaves[j].tips and _links(leaves[i], leaves[j]):
                out.append(Violation("crossing", (i, j), f"{leaves[i]!r} crosses {leaves[j]!r}"))
    if shared:
        out.extend(_saturation(leaves, shared))
    return out


def _saturation(leaves, shared) -> list:
    out = []
    involved = sorted({i for idx in shared.values() for i in idx})
    for i in involved:
        leaf = leaves[i]
        h = leaf.height
        m = len(leaf.tips)
        for k in range(m):
            p, q = leaf.tips[k], leaf.tips[(k + 1) % m]
            span = arc_length(p, q)

            def pos(x):
                return (x - p) % 1

            side = [j for j, other in enumerate(leaves)
                    if j != i and other.height >= h and other.tips != leaf.tips
                    and all(pos(x) <= span for x in other.tips if x != p)]
            at_p = [j for j in side if p in leaves[j].tips]
            at_q = [j for j in side if q in leaves[j].tips]
            if not at_p and not at_q:
                continue
            # the closest sibling to the edge pq reaches furthest along the arc
            near_p = max(at_p, key=lambda j: max(pos(x) for x in leaves[j].tips), default=None)
            near_q = min(at_q, key=lambda j: min(pos(x) if x != p else span
                                                 for x in leaves[j].tips), default=None)
            edge = f"edge {fmt(p)}-{fmt(q)} of {leaf!r}"
            if near_p is None or near_q is None or near_p != near_q:
                out.append(Violation("saturation", (i,), f"{edge}: elder siblings at the two ends differ", True))
                continue
            if leaves[near_p].height <= h:
                out.append(Violation("saturation", (i, near_p),
                                     f"{edge}: elder sibling is not strictly taller", True))
    return out
