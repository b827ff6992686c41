"""Critical sets and the dynamical elaminations they generate.

A leaf is pulled back by distributing the preimages (θ + k)/d of its tips over
the d components of S¹ mod C; each component receives exactly one preimage of
every tip.  Heights never influence the pairing, they are carried along.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Leaf, fmt, validate_elamination
from .errors import DegenerateParameter, InternalAssertion, InvalidCriticalSet, NonGenericHeights
from .pinch import PinchedCircle


def exact_log(r: Fraction, d: int) -> int | None:
    """The integer n with d**n == r, or None."""
    r = Fraction(r)
    if r <= 0:
        return None
    if r.denominator == 1:
        m, sign = r.numerator, 1
    elif r.numerator == 1:
        m, sign = r.denominator, -1
    else:
        return None
    n = 0
    while m % d == 0:
        m //= d
        n += 1
    return sign * n if m == 1 else None


def critical_multiplicities(leaves: Sequence[Leaf]) -> list:
    """Ordinary multiplicity, minus one per taller leaf sharing two ideal points."""
    out = []
    for leaf in leaves:
        m = leaf.multiplicity
        for other in leaves:
            if other.height > leaf.height and len(set(other.tips) & set(leaf.tips)) >= 2:
                m -= 1
        out.append(m)
    return out


def validate_critical_set(leaves: Sequence[Leaf], d: int) -> list:
    """List of human-readable violations; empty means valid."""
    leaves = list(leaves)
    out = []
    step = Fraction(1, d)
    for i, leaf in enumerate(leaves):
        if any((x - leaf.tips[0]) % step for x in leaf.tips):
            out.append(f"leaf {i} {leaf!r}: tips not congruent mod 1/{d}")
    total = sum(critical_multiplicities(leaves))
    if total != d - 1:
        out.append(f"critical multiplicities sum to {total}, expected {d - 1}")
    for v in validate_elamination(leaves):
        if not v.warning:
            out.append(f"{v.kind}: {v.detail}")
    tips = [x for leaf in leaves for x in leaf.tips]
    if len(set(tips)) != len(tips):
        out.append("critical leaves share tips; only general position is supported")
    elif not out:
        lengths = PinchedCircle(leaves).lengths()
        if len(lengths) != d or any(x != step for x in lengths):
            out.append(f"S¹ mod C has lengths {[fmt(x) for x in lengths]}, expected {d} of 1/{d}")
    return out


class CriticalSet:
    """Degree-d critical leaves in general position."""

    def __init__(self, leaves: Sequence[Leaf], d: int):
        if d < 2:
            raise InvalidCriticalSet("degree must be at least 2")
        self.degree = d
        self.leaves = tuple(Leaf(leaf.tips, leaf.height, 0, j) for j, leaf in enumerate(leaves))
        problems = validate_critical_set(self.leaves, d)
        if problems:
            raise InvalidCriticalSet("; ".join(problems))
        self.multiplicities = tuple(critical_multiplicities(self.leaves))
        self.pinched = PinchedCircle(self.leaves)

    def __repr__(self):
        return f"CriticalSet(d={self.degree}, {list(self.leaves)})"

    def __eq__(self, other):
        if not isinstance(other, CriticalSet):
            return NotImplemented
        return self.degree == other.degree and self.leaves == other.leaves

    def __hash__(self):
        return hash((self.degree, self.leaves))


def pullback_leaf(p: Leaf, c: CriticalSet) -> list:
    """The d preimage leaves of ``p``, ordered by component of S¹ mod C."""
    d = c.degree
    slots = [[] for _ in range(d)]
    for x in p.tips:
        for k in range(d):
            y = (x + k) / d
            try:
                slots[c.pinched.component_of(y)].append(y)
            except DegenerateParameter:
                raise DegenerateParameter(
                    f"preimage {fmt(y)} of tip {fmt(x)} hits a critical tip") from None
    m = len(p.tips)
    depth = (p.depth or 0) + 1
    out = []
    for tips in slots:
        if len(tips) != m:
            raise InternalAssertion(f"component received {len(tips)} preimages of {p!r}")
        out.append(Leaf(tuple(tips), p.height / d, depth, p.origin))
    return out


@dataclass(frozen=True)
class DynamicalElamination:
    critical: CriticalSet
    precritical: tuple
    max_depth: int

    @property
    def leaves(self) -> tuple:
        return self.critical.leaves + self.precritical

    def at_depth(self, k: int) -> list:
        if k == 0:
            return list(self.critical.leaves)
        return [leaf for leaf in self.precritical if leaf.depth == k]

    def to_json(self) -> dict:
        return {"degree": self.critical.degree, "max_depth": self.max_depth,
                "leaves": [leaf.to_json() | {"origin": leaf.origin} for leaf in self.leaves]}


def generate(c: CriticalSet, depth: int, order: str = "bfs") -> DynamicalElamination:
    """All preimages of the critical leaves up to ``depth``."""
    seen = {}

    def record(leaf):
        for x in leaf.tips:
            if x in seen:
                raise DegenerateParameter(
                    f"depth-{leaf.depth} tip {fmt(x)} coincides with a depth-{seen[x]} tip")
            seen[x] = leaf.depth

    for leaf in c.leaves:
        record(leaf)
    out = []
    if order == "bfs":
        frontier = list(c.leaves)
        for _ in range(depth):
            nxt = []
            for leaf in frontier:
                nxt.extend(pullback_leaf(leaf, c))
            for leaf in nxt:
                record(leaf)
            out.extend(nxt)
            frontier = nxt
    elif order == "dfs":
        def walk(leaf):
            if leaf.depth == depth:
                return
            for child in pullback_leaf(leaf, c):
                record(child)
                out.append(child)
                walk(child)
        for leaf in c.leaves:
            walk(leaf)
        out.sort(key=lambda leaf: leaf.depth)
    else:
        raise ValueError(f"unknown order {order!r}")
    return DynamicalElamination(c, tuple(out), depth)


def _check_generic(heights, d):
    for i in range(len(heights)):
        for j in range(i + 1, len(heights)):
            if exact_log(heights[i] / heights[j], d) is not None:
                raise NonGenericHeights(
                    f"heights {fmt(heights[i])} and {fmt(heights[j])} differ by a power of {d}")


def _base_key(pc: PinchedCircle, cid: int, keys: list):
    comp = pc.components[cid]
    if not pc.tips:
        return None, 0
    starts = [pc.tip_index[a] for a, _ in comp.arcs]
    i = min(range(len(starts)), key=lambda k: (keys[starts[k][0]], starts[k][1]))
    return (keys[starts[i][0]], starts[i][1]), i


def _find_component(pc: PinchedCircle, key, keys: list) -> tuple:
    for comp in pc.components:
        k, i = _base_key(pc, comp.id, keys)
        if k == key:
            return comp, i
    raise InternalAssertion(f"no component with base {key}")


def _rotated_arcs(comp, i):
    return comp.arcs[i:] + comp.arcs[:i]


def _coordinate(pc, x, keys):
    """(component base key, arclength of x from the base along its component)."""
    if not pc.tips:
        return None, x
    cid = pc.component_of(x)
    key, i = _base_key(pc, cid, keys)
    u = Fraction(0)
    for a, b in _rotated_arcs(pc.components[cid], i):
        span = (b - a) % 1 or Fraction(1)
        off = (x - a) % 1
        if off < span:
            return key, u + off
        u += span
    raise InternalAssertion(f"angle {fmt(x)} not on its own component")


def _place(pc, key, v, keys):
    if not pc.tips:
        return v % 1
    comp, i = _find_component(pc, key, keys)
    v %= comp.length
    u = Fraction(0)
    for a, b in _rotated_arcs(comp, i):
        span = (b - a) % 1 or Fraction(1)
        if v == u:
            raise DegenerateParameter(f"flowed tip lands on the pinch tip {fmt(a)}")
        if v < u + span:
            return (a + v - u) % 1
        u += span
    raise InternalAssertion("placement ran off the component")


def rotate_flow(L: DynamicalElamination, s: Sequence) -> DynamicalElamination:
    """Flow each critical leaf C_j by arclength h_j·s_j.

    C_j moves inside its component of S¹ pinched along the strictly taller
    critical leaves, jumping across pinch points.  Its position is recorded
    relative to a base tip of that component, so shorter leaves are carried
    along when taller ones move; this makes flows in distinct coordinates
    commute.  The result is regenerated from the new critical set.
    """
    crit = L.critical
    d = crit.degree
    leaves = crit.leaves
    if len(s) != len(leaves):
        raise ValueError(f"need {len(leaves)} flow coordinates, got {len(s)}")
    heights = [leaf.height for leaf in leaves]
    _check_generic(heights, d)
    order = sorted(range(len(leaves)), key=lambda j: -heights[j])
    moved = {}
    for rank, j in enumerate(order):
        taller = order[:rank]
        old = PinchedCircle([leaves[k] for k in taller])
        new = PinchedCircle([moved[k] for k in taller])
        keys = list(range(len(taller)))
        shift = heights[j] * Fraction(s[j])
        tips = []
        for x in leaves[j].tips:
            key, u = _coordinate(old, x, keys)
            tips.append(_place(new, key, u + shift, keys))
        moved[j] = Leaf(tuple(tips), heights[j])
    new_crit = CriticalSet([moved[j] for j in range(len(leaves))], d)
    return generate(new_crit, L.max_depth)


def squeeze(L: DynamicalElamination, lam) -> DynamicalElamination:
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("squeeze factor must be positive")
    crit = CriticalSet([leaf.with_height(leaf.height * lam) for leaf in L.critical.leaves],
                       L.critical.degree)
    pre = tuple(Leaf(leaf.tips, leaf.height * lam, leaf.depth, leaf.origin) for leaf in L.precritical)
    return DynamicalElamination(crit, pre, L.max_depth)


def weyl_coords(heights: Sequence, d: int) -> tuple:
    """Coordinates t_j = -log_d h_j and the walls t_i - t_j ∈ Z.

    Returns (ts, walls): ts[j] is an int when h_j is a power of d, else None;
    walls maps 1-based pairs (i, j), i < j, to the integer t_j - t_i when it
    is one, else None.
    """
    hs = [Fraction(h) for h in heights]
    if any(h <= 0 for h in hs):
        raise ValueError("heights must be positive")
    if any(a < b for a, b in zip(hs, hs[1:])):
        raise ValueError("heights must be sorted descending")
    ts = []
    for h in hs:
        n = exact_log(h, d)
        ts.append(None if n is None else -n)
    walls = {}
    for i in range(len(hs)):
        for j in range(i + 1, len(hs)):
            walls[(i + 1, j + 1)] = exact_log(hs[i] / hs[j], d)
    return ts, walls
