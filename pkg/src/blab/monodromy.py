"""Monodromy of S¹ mod Λ_{T,≤N}(t) as t runs once around the circle.

Tips carry labels (depth n, type, j) whose angles (t + δ + j)/3^{n-1} move
continuously with t.  Between consecutive degenerate parameters the labelled
combinatorics is constant, so one sample per gap suffices.  Across a
degenerate parameter a taller leaf sweeps over tips of shorter ones and pushes
them to its other end; following those pushes identifies leaf sides, hence
components, at neighbouring samples.  At t0 + 1 the label j is the label
j + 1 at t0, which closes the loop.
"""

from __future__ import annotations

import bisect

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .core import Leaf, angle, fmt
from .errors import AmbiguousTracking, InternalAssertion, StructureViolation
from .pinch import PinchedCircle, arc_cycles
from .taut import THIRD, TautKernel, check_generic, degenerate_times, genericity_defect


class TipLabel(NamedTuple):
    depth: int
    typ: int   # 0 for type A (3^{n-1}x ≡ t), 1 for type B (≡ t + 1/3)
    j: int

    def angle(self, t) -> Fraction:
        return (Fraction(t) + self.typ * THIRD + self.j) / 3 ** (self.depth - 1) % 1

    def shifted(self, k: int = 1) -> "TipLabel":
        return TipLabel(self.depth, self.typ, (self.j + k) % 3 ** (self.depth - 1))

    def __str__(self):
        return f"{self.depth}{'AB'[self.typ]}{self.j}"


class Snapshot:
    """Labelled pinch of Λ_{T,≤N}(t) at one parameter value."""

    def __init__(self, t, N: int):
        self.t = Fraction(t)
        self.N = N
        k = TautKernel(self.t, N)
        self.D = k.D
        tips = []
        self.partner = {}
        for n in range(1, N + 1):
            for a, b in k.chords(n, both_sides=False):
                la, lb = TipLabel(n, 0, k.label(a, n, 0)), TipLabel(n, 1, k.label(b, n, 1))
                tips.append((a, la))
                tips.append((b, lb))
                self.partner[la] = lb
                self.partner[lb] = la
        tips.sort()
        self.pos = [x for x, _ in tips]
        self.labels = [lab for _, lab in tips]
        n = len(tips)
        # a component is recorded by the labels its arcs arrive at; each such
        # label names one side of one leaf
        self.sides = []
        self.lengths = []
        if n == 0:
            self.sides.append(frozenset())
            self.lengths.append(Fraction(1))
            return
        index = {lab: g for g, lab in enumerate(self.labels)}
        succ = [index[self.partner[lab]] for lab in self.labels]
        cycles = arc_cycles(n, succ)
        cycles.sort(key=min)
        for cyc in cycles:
            ends = set()
            total = 0
            for a in cyc:
                b = (a + 1) % n
                ends.add(self.labels[b])
                total += (self.pos[b] - self.pos[a]) % self.D
            self.sides.append(frozenset(ends))
            self.lengths.append(Fraction(total, self.D) or Fraction(1))

    def __len__(self):
        return len(self.sides)

    def side_map(self) -> dict:
        return {lab: cid for cid, ends in enumerate(self.sides) for lab in ends}


def all_labels(N: int) -> list:
    return [TipLabel(n, typ, j) for n in range(1, N + 1) for typ in (0, 1) for j in range(3 ** (n - 1))]


def push_map(te, partner: dict, N: int) -> tuple:
    """Where each physical tip goes across the degenerate parameter ``te``.

    A taller tip σ overtakes the shorter tips sitting on it, and those are
    pushed over σ's leaf: each reappears at the other tip of that leaf.  When
    several taller tips coincide, the nearest one in depth does the pushing,
    and its own displacement is applied first.  Returns (ρ, pushers) with ρ a
    dict on labels and pushers the labels whose leaves did some pushing.
    """
    te = Fraction(te)
    labs = all_labels(N)
    D = 3 ** (N + 1) * te.denominator
    T = te.numerator * (D // te.denominator)

    def at(lab):  # angle at te, in units of 1/D
        return (T + lab.typ * (D // 3) + lab.j * D) // 3 ** (lab.depth - 1) % D

    pos = {lab: at(lab) for lab in labs}
    where = {}
    for lab in labs:
        where.setdefault(pos[lab], []).append(lab)
    rho = {}
    pushers = set()
    for lab in labs:  # sorted by depth
        taller = [s for s in where[pos[lab]] if s.depth < lab.depth]
        if not taller:
            rho[lab] = lab
            continue
        s = max(taller, key=lambda m: m.depth)
        pushers.add(s)
        pushers.add(partner[s])
        land = [m for m in where[pos[rho[partner[s]]]] if m.depth == lab.depth]
        if len(land) != 1:
            raise InternalAssertion(f"no landing label for {lab} at t={fmt(te)}")
        rho[lab] = land[0]
    if len(set(rho.values())) != len(rho):
        raise InternalAssertion(f"push-over at t={fmt(te)} is not a bijection")
    return rho, pushers


def match(a: Snapshot, b: Snapshot, events=()) -> list:
    """Bijection from components of ``a`` to those of ``b``.

    ``events`` are the degenerate parameters between the two samples.  Tips
    are carried through them by ``push_map``; a leaf side survives unless its
    leaf pushed something, and components are matched through surviving sides.
    """
    if len(a) != len(b):
        raise InternalAssertion("component counts differ between samples")
    rho = {lab: lab for lab in a.partner}
    moved = set()
    partner = a.partner
    for te in events:
        step, pushers = push_map(te, partner, a.N)
        moved |= {lab for lab in rho if rho[lab] in pushers}
        rho = {lab: step[rho[lab]] for lab in rho}
        partner = {step[x]: step[y] for x, y in partner.items()}
    if any(b.partner[rho[x]] != rho[a.partner[x]] for x in a.partner):
        raise AmbiguousTracking(f"pushed leaves do not reproduce the chords at t={fmt(b.t)}")
    where = b.side_map()
    out = [None] * len(a)
    for cid, ends in enumerate(a.sides):
        hits = {where[rho[x]] for x in ends if x not in moved}
        if len(hits) > 1:
            raise AmbiguousTracking(f"component {cid} at t={fmt(a.t)} splits into {sorted(hits)}")
        if hits:
            out[cid] = hits.pop()
    free = [c for c in range(len(a)) if out[c] is None]
    taken = set(c for c in out if c is not None)
    if len(taken) != len(a) - len(free):
        raise AmbiguousTracking(f"components merge between t={fmt(a.t)} and t={fmt(b.t)}")
    spare = [c for c in range(len(b)) if c not in taken]
    if len(free) == 1 and len(spare) == 1:
        out[free[0]] = spare[0]
    elif free:
        raise AmbiguousTracking(
            f"{len(free)} components keep no leaf side between t={fmt(a.t)} and t={fmt(b.t)}")
    for c in range(len(a)):
        if a.lengths[c] != b.lengths[out[c]]:
            raise InternalAssertion(f"component {c} changes length across t={fmt(a.t)}..{fmt(b.t)}")
    return out


def close_loop(end: Snapshot, start: Snapshot) -> list:
    """Map components at t0 + 1 to components at t0 by relabelling j ↦ j + 1."""
    where = start.side_map()
    out = []
    for cid, ends in enumerate(end.sides):
        hits = {where.get(x.shifted()) for x in ends} if ends else {0}
        if len(hits) != 1 or None in hits:
            raise InternalAssertion(f"relabelling does not carry component {cid} onto one component")
        out.append(hits.pop())
    return out


def simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """Rational with the smallest denominator in the open interval (a, b)."""
    if a > b:
        a, b = b, a
    fl = a.numerator // a.denominator
    if Fraction(fl + 1) < b:
        return Fraction(fl + 1)
    # a and b share an integer part fl; recurse on reciprocals of fractional parts
    fa, fb = a - fl, b - fl
    if fa == 0:
        # interval (fl, b): 1/(k) style
        k = int(1 / fb) + 1
        return fl + Fraction(1, k)
    return fl + 1 / simplest_between(1 / fb, 1 / fa)


def event_samples(t0, N: int) -> list:
    """t0, one parameter between each pair of consecutive degenerate times, t0 + 1."""
    t0 = Fraction(t0)
    ev = degenerate_times(t0, t0 + 1, N)
    mids = [simplest_between(x, y) for x, y in zip(ev, ev[1:])]
    return [t0] + mids + [t0 + 1]


def _cycles(perm) -> list:
    seen = set()
    out = []
    for i in range(len(perm)):
        if i in seen:
            continue
        cyc = []
        j = i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        out.append(cyc)
    return out


def is_power_of_two(k: int) -> bool:
    return k > 0 and k & (k - 1) == 0


@dataclass
class MonodromyReport:
    """φ on the components of S¹ mod Λ_{T,≤N}(t0), ids as in ``PinchedCircle``."""

    t0: Fraction
    depth: int
    phi: tuple
    lengths: tuple
    steps: int = 0
    leaves: tuple = ()
    _levels: dict = field(default_factory=dict, repr=False)

    @property
    def components(self) -> int:
        return len(self.phi)

    def orbits(self) -> list:
        return _cycles(self.phi)

    def pinched(self, n: int | None = None) -> PinchedCircle:
        n = self.depth if n is None else n
        return PinchedCircle([leaf for leaf in self.leaves if leaf.depth <= n])

    def at_depth(self, n: int) -> "MonodromyReport":
        """Report for a shallower truncation, induced through component containment."""
        if n == self.depth:
            return self
        if not 0 <= n < self.depth:
            raise ValueError(f"depth {n} not available from a depth-{self.depth} track")
        if n in self._levels:
            return self._levels[n]
        fine = self.pinched()
        coarse = self.pinched(n)
        parent = [_parent(coarse, c) for c in fine.components]
        phi = [None] * len(coarse)
        for c in range(len(fine)):
            p, q = parent[c], parent[self.phi[c]]
            if phi[p] is None:
                phi[p] = q
            elif phi[p] != q:
                raise InternalAssertion(f"φ does not descend to depth {n}")
        rep = MonodromyReport(self.t0, n, tuple(phi), tuple(coarse.lengths()), self.steps,
                              tuple(leaf for leaf in self.leaves if leaf.depth <= n))
        self._levels[n] = rep
        return rep

    def to_json(self, rotations: Sequence | None = None) -> dict:
        """Report dict; ``rotations`` (from ``rotation_data`` one level deeper) adds "rot"."""
        rot = {}
        for r in rotations or ():
            rot[min(r.members)] = fmt(r.rotation)
        orbits = []
        for cyc in sorted(self.orbits(), key=min):
            orbits.append({"size": len(cyc), "m": len(cyc), "rot": rot.get(min(cyc)),
                           "members": sorted(cyc)})
        return {"depth": self.depth, "components": self.components, "orbits": orbits,
                "powers_of_two": all(is_power_of_two(len(c)) for c in self.orbits())}


def _parent(coarse: PinchedCircle, comp) -> int:
    a, b = comp.arcs[0]
    span = (b - a) % 1 or Fraction(1)
    return coarse.component_of(a + span / 2)


def track(t0, N: int, step=None, floor=None) -> MonodromyReport:
    """Follow components of S¹ mod Λ_{T,≤N}(t) from t0 to t0 + 1.

    With ``step`` None the samples are placed one per gap between degenerate
    parameters.  Otherwise the sweep is adaptive: try t + h, halve h when the
    step spans more than one degenerate parameter, and give up below ``floor``.
    """
    t0 = angle(t0)
    check_generic(t0, N)
    start = Snapshot(t0, N)
    leaves = _leaves_at(t0, N)
    if N == 0:
        return MonodromyReport(t0, 0, (0,), (Fraction(1),), 0, ())
    perm = list(range(len(start)))
    steps = 0
    if step is None:
        samples = event_samples(t0, N)
        prev = start
        for t, te in zip(samples[1:], degenerate_times(t0, t0 + 1, N) + [None]):
            cur = Snapshot(t, N)
            m = match(prev, cur, [te] if te is not None else [])
            perm = [m[p] for p in perm]
            prev = cur
            steps += 1
    else:
        step = Fraction(step)
        floor = Fraction(floor) if floor is not None else step / 2 ** 20
        t, h, prev = t0, step, start
        end = t0 + 1
        while t < end:
            nxt = min(t + h, end)
            ev = degenerate_times(t, nxt, N)
            if nxt != end and genericity_defect(nxt, N) is not None:
                ev = ev + [nxt]
                nxt = simplest_between(nxt, min(end, nxt + h / 4, *degenerate_times(nxt, end, N)[:1]))
            if len(ev) > 1:
                h /= 2
                if h < floor:
                    raise AmbiguousTracking(f"step fell below {fmt(floor)} at t={fmt(t)}")
                continue
            cur = Snapshot(nxt, N)
            m = match(prev, cur, ev)
            perm = [m[p] for p in perm]
            t, prev = nxt, cur
            steps += 1
            h = min(step, 2 * h)
    back = close_loop(prev, start)
    phi = [back[p] for p in perm]
    if sorted(phi) != list(range(len(phi))):
        raise InternalAssertion("closing the loop did not produce a permutation")
    pc = PinchedCircle(leaves)
    # Snapshot ids and PinchedCircle ids are both ordered by the smallest arc start
    _check_ids(start, pc)
    rep = MonodromyReport(t0, N, tuple(phi), tuple(pc.lengths()), steps, tuple(leaves))
    for c in range(len(phi)):
        if rep.lengths[c] != rep.lengths[phi[c]]:
            raise InternalAssertion("φ does not preserve component length")
    return rep


def _leaves_at(t, N) -> list:
    k = TautKernel(Fraction(t), N)
    out = []
    for n in range(1, N + 1):
        for a, b in k.chords(n, both_sides=False):
            out.append(Leaf((Fraction(a, k.D), Fraction(b, k.D)), Fraction(1, 3 ** (n - 1)), depth=n))
    return out


def _check_ids(snap: Snapshot, pc: PinchedCircle):
    if [fmt(x) for x in snap.lengths] != [fmt(x) for x in pc.lengths()]:
        raise InternalAssertion("snapshot and pinch disagree on component order")


def orbits(report: MonodromyReport) -> tuple:
    """(orbit partition, every orbit size is a power of 2)."""
    cyc = sorted(report.orbits(), key=min)
    return cyc, all(is_power_of_two(len(c)) for c in cyc)


class OrbitRotation(NamedTuple):
    members: tuple
    m: int
    rotation: Fraction          # cyclic shift / word length, up to sign
    word: tuple                 # child ids of the pieces along the first member
    fixed_children: tuple
    child_orbit_sizes: tuple    # sizes of φ^m-orbits of the non-fixed children
    ok: bool
    detail: str


def _pieces(comp, fine: PinchedCircle, cuts: set) -> list:
    """Child ids and lengths of the pieces of ``comp`` between consecutive cut tips."""
    marks = []  # (position along comp, child of the stretch starting there)
    u = Fraction(0)
    tips = fine.tips
    for a, b in comp.arcs:
        span = (b - a) % 1 or Fraction(1)
        inner = []
        i = bisect.bisect_right(tips, a)
        # a full-circle arc has a == b, so stop after one lap of the tips
        for _ in range(len(tips)):
            x = tips[i % len(tips)]
            if (x - a) % 1 == 0 or (x - a) % 1 >= span or (x == b and span < 1):
                break
            inner.append(x)
            i += 1
        for x in inner:
            if x in cuts:
                marks.append(u + (x - a) % 1)
        u += span
    total = u
    if not marks:
        a, b = comp.arcs[0]
        mid = a + ((b - a) % 1 or Fraction(1)) / 2
        return [(fine.component_of(mid), total)]
    out = []
    for i, start in enumerate(marks):
        end = marks[(i + 1) % len(marks)] + (total if i + 1 == len(marks) else 0)
        out.append((_child_at(comp, fine, start), end - start))
    return out


def _child_at(comp, fine: PinchedCircle, pos) -> int:
    """Child component just after arclength ``pos`` along ``comp``."""
    u = Fraction(0)
    for a, b in comp.arcs:
        span = (b - a) % 1 or Fraction(1)
        if pos < u + span:
            x = a + (pos - u)
            # step inside the first fine arc that starts at x
            j = fine.tips.index(x % 1) if (x % 1) in fine.tip_index else None
            if j is None:
                return fine.component_of(x)
            nxt = fine.tips[(j + 1) % len(fine.tips)]
            return fine.component_of(x + ((nxt - x) % 1) / 2)
        u += span
    raise InternalAssertion("position beyond component")


def rotation_data(report: MonodromyReport, n: int, strict: bool = False) -> list:
    """Rotation numbers and the cable check for each depth-n orbit.

    Needs a report of depth ≥ n + 1.  For an orbit with return time m, φ^m
    maps a member γ to itself; its depth-(n+1) children must consist of one
    φ^m-fixed child plus orbits of one common size q.  When q = 1 every child
    is fixed.
    """
    lo = report.at_depth(n)
    hi = report.at_depth(n + 1)
    coarse = lo.pinched()
    fine = hi.pinched()
    parent = [_parent(coarse, c) for c in fine.components]
    cut_tips = {x for leaf in hi.leaves if leaf.depth == n + 1 for x in leaf.tips}
    out = []
    for cyc in sorted(lo.orbits(), key=min):
        m = len(cyc)
        gamma = cyc[0]
        pm = list(range(len(hi.phi)))
        for _ in range(m):
            pm = [hi.phi[x] for x in pm]
        kids = [c for c in range(len(fine)) if parent[c] == gamma]
        if any(parent[pm[c]] != gamma for c in kids):
            raise InternalAssertion("φ^m does not preserve the children of a returning component")
        fixed = tuple(c for c in kids if pm[c] == c)
        sizes = []
        seen = set()
        for c in kids:
            if c in seen or pm[c] == c:
                continue
            size = 0
            x = c
            while x not in seen:
                seen.add(x)
                x = pm[x]
                size += 1
            sizes.append(size)
        pieces = _pieces(coarse.components[gamma], fine, cut_tips)
        word = [p[0] for p in pieces]
        lens = [p[1] for p in pieces]
        L = len(word)
        shifts = [k for k in range(L)
                  if all(pm[word[i]] == word[(i + k) % L] and lens[i] == lens[(i + k) % L]
                         for i in range(L))]
        problems = []
        if not shifts:
            problems.append("φ^m does not act on the piece word by a cyclic shift")
            rot = Fraction(0)
        else:
            rot = Fraction(shifts[0], L)
            if len(shifts) > 1:
                rot = min((Fraction(k, L) for k in shifts), key=lambda r: (r.denominator, r))
        # a rotation of order q > 1 fixes only the central child; the identity fixes all
        if sizes and len(fixed) != 1:
            problems.append(f"{len(fixed)} φ^m-fixed children next to moving ones")
        if len(set(sizes)) > 1:
            problems.append(f"child orbit sizes {sorted(sizes)} not all equal")
        q = sizes[0] if sizes else 1
        if not is_power_of_two(q):
            problems.append(f"child orbit size {q} is not a power of 2")
        if shifts and rot.denominator != q:
            problems.append(f"rotation {rot} has denominator {rot.denominator}, child orbits have size {q}")
        rec = OrbitRotation(tuple(cyc), m, rot, tuple(word), fixed, tuple(sorted(sizes)),
                            not problems, "; ".join(problems))
        if strict and problems:
            raise StructureViolation(f"depth-{n} orbit {cyc}: {rec.detail}")
        out.append(rec)
    return out

