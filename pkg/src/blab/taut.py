"""The degree-3 tautological elamination Λ_T(t).

C_1 = {t, t+1/3} sits at height 1 and C_2 = {s, s+1/3} sweeps the arc
(t+1/3, t+2/3).  Whenever 3^n s ≡ t or t+1/3 the leaf C_2 collides with a
depth-n preimage P of C_1, and the chord P³ (a leaf of height 3^{1-n}) is
recorded.  To find P we perturb s to s0 ∓ ε and follow the pullback chain of
C_1 that ends at s0.  Depth-n leaves are labelled by their collision depth n.

Two interchangeable companion routines are provided: ``companion_full``
generates the whole perturbed dynamical elamination, ``companion`` walks only
the chain of ancestors of the leaf through s0.  ``TautKernel`` is an integer
version of the chain walk used for deep rows and for monodromy tracking.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .core import Leaf, angle, fmt, validate_elamination
from .dynlam import CriticalSet, generate
from .errors import DegenerateParameter, InternalAssertion
from .pinch import Census, PinchedCircle, arc_cycles, census, census_of_lengths

THIRD = Fraction(1, 3)


def genericity_defect(t, N: int):
    """First (k, δ) with k ≤ N and (3^k - 1)t ≡ δ ∈ {0, 1/3} (mod 1), or None.

    Such a k means t itself is a depth-k preimage of a critical tip, so
    structural angles of different depths coincide.  Otherwise t is generic.
    """
    t = Fraction(t)
    for k in range(1, N + 1):
        r = ((3 ** k - 1) * t) % 1
        if r in (0, THIRD):
            return k, r
    return None


def check_generic(t, N: int):
    hit = genericity_defect(t, N)
    if hit is not None:
        k, r = hit
        raise DegenerateParameter(
            f"t={fmt(Fraction(t) % 1)} is degenerate at depth {k}: 3^{k}·t ≡ t+{fmt(r)}, so the "
            f"critical tip {fmt(Fraction(t) % 1)} is also a depth-{k} preimage of "
            f"{fmt((Fraction(t) + r) % 1)} and depth-{k} tips collide with the depth-1 chord tips")


def degenerate_times(lo, hi, N: int) -> list:
    """Sorted t in the open interval (lo, hi) that fail genericity at depth ≤ N."""
    lo, hi = Fraction(lo), Fraction(hi)
    out = set()
    for k in range(1, N + 1):
        den = 3 ** k - 1
        for delta in (0, THIRD):
            m = int((lo * den - delta) // 1)
            while True:
                x = (Fraction(m) + delta) / den
                if x >= hi:
                    break
                if x > lo:
                    out.add(x)
                m += 1
    return sorted(out)


def collision_params(t, n: int, strict: bool = True) -> list:
    """All (s, type) with s in the open arc (t+1/3, t+2/3) and 3^n s ≡ t or t+1/3.

    Solutions on the arc boundary raise DegenerateParameter when ``strict``;
    otherwise they are dropped.
    """
    t = angle(t)
    out = []
    m = 3 ** n
    for typ, delta in (("A", Fraction(0)), ("B", THIRD)):
        for j in range(m):
            s = (t + delta + j) / m % 1
            off = (s - t) % 1
            if off in (THIRD, 2 * THIRD):
                if strict:
                    raise DegenerateParameter(
                        f"collision parameter {fmt(s)} (type {typ}, depth {n}) lies on the "
                        f"boundary of the arc ({fmt((t + THIRD) % 1)}, {fmt((t + 2 * THIRD) % 1)})")
                continue
            if THIRD < off < 2 * THIRD:
                out.append((s, typ))
    out.sort()
    return out


def structural_angles(t, n: int) -> list:
    """Sorted angles x with 3^k x ≡ t or t+1/3 for some 0 ≤ k ≤ n."""
    t = angle(t)
    xs = set()
    for k in range(n + 1):
        m = 3 ** k
        for delta in (0, THIRD):
            for j in range(m):
                xs.add((t + delta + j) / m % 1)
    return sorted(xs)


@lru_cache(maxsize=64)
def structural_gap(t, n: int) -> Fraction:
    xs = structural_angles(t, n)
    gaps = [b - a for a, b in zip(xs, xs[1:])] + [xs[0] + 1 - xs[-1]]
    return min(gaps)


def default_eps(t, n: int) -> Fraction:
    return structural_gap(angle(t), n) / 4


def _side_sign(side) -> int:
    if side in ("below", -1):
        return -1
    if side in ("above", 1):
        return 1
    raise ValueError(f"side must be 'below' or 'above', got {side!r}")


def _check_param(t, s0, n):
    if (s0, "A") not in collision_params(t, n, strict=False) and \
            (s0, "B") not in collision_params(t, n, strict=False):
        raise DegenerateParameter(f"{fmt(s0)} is not a depth-{n} collision parameter for t={fmt(t)}")


def companion(t, s0, n: int, side="below", eps=None) -> Fraction:
    """Other tip of the depth-n preimage of C_1 through s0, with C_2 at s0 ∓ ε.

    Walks the chain a_k = 3^{n-k} s0: the depth-k ancestor of the wanted leaf
    is the preimage of the depth-(k-1) ancestor lying in the component of
    S¹ mod C that contains a_k.  Only these ancestors are ever computed, so the
    walk also works at parameters where the full build is degenerate (t = 0).
    """
    t, s0 = angle(t), angle(s0)
    _check_param(t, s0, n)
    if eps is None:
        eps = default_eps(t, n)
    eps = Fraction(eps)
    if not 0 < eps < structural_gap(t, n):
        raise ValueError("ε must be smaller than the structural gap")
    return _walk(t, s0, n, s0 + _side_sign(side) * eps)


def _walk(t, s0, n, s):
    def comp(x):
        u = (x - t) % 1
        if u == 0 or u == THIRD:
            raise DegenerateParameter(f"angle {fmt(x)} coincides with a tip of C_1")
        if u < THIRD:
            return 0
        if 0 < (x - s) % 1 < THIRD:
            return 1
        return 2

    chain = [(3 ** (n - k) * s0) % 1 for k in range(n + 1)]
    if chain[0] == t:
        other = (t + THIRD) % 1
    elif chain[0] == (t + THIRD) % 1:
        other = t
    else:
        raise InternalAssertion(f"3^{n}·{fmt(s0)} is not a tip of C_1")
    for k in range(1, n + 1):
        c = comp(chain[k])
        hits = []
        for i in range(3):
            y = (other + i) / 3
            if comp(y) == c:
                hits.append(y)
        if len(hits) != 1:
            raise InternalAssertion(f"{len(hits)} preimages of {fmt(other)} in one component")
        other = hits[0]
    return other


def companion_full(t, s0, n: int, side="below", eps=None) -> Fraction:
    """Same as ``companion`` but by generating the whole perturbed elamination."""
    t, s0 = angle(t), angle(s0)
    _check_param(t, s0, n)
    if eps is None:
        eps = default_eps(t, n)
    s = (s0 + _side_sign(side) * Fraction(eps)) % 1
    h2 = Fraction(2, 3 ** n)  # any height in (3^-n, 3^(1-n)); bookkeeping only
    crit = CriticalSet([Leaf((t, t + THIRD), 1), Leaf((s, s + THIRD), h2)], 3)
    L = generate(crit, n)
    owners = [leaf for leaf in L.at_depth(n) if leaf.origin == 0 and s0 in leaf.tips]
    if len(owners) != 1:
        raise InternalAssertion(f"{len(owners)} depth-{n} preimages of C_1 own {fmt(s0)}")
    (a, b) = owners[0].tips
    return b if a == s0 else a


@dataclass(frozen=True)
class TautLeaf:
    depth: int
    chord: tuple          # (type A tip, type B tip)
    params: tuple         # (type A collision parameter, type B collision parameter)

    @property
    def height(self) -> Fraction:
        return Fraction(1, 3 ** (self.depth - 1))

    def as_leaf(self) -> Leaf:
        return Leaf(self.chord, self.height, depth=self.depth)

    def to_json(self) -> dict:
        return {"depth": self.depth, "tips": [fmt(x) for x in sorted(self.chord)],
                "height": fmt(self.height), "params": [fmt(x) for x in self.params]}


@dataclass(frozen=True)
class TautLamination:
    t: Fraction
    leaves: tuple
    max_depth: int

    def at_depth(self, n: int) -> list:
        return [x for x in self.leaves if x.depth == n]

    def as_leaves(self, max_depth: int | None = None) -> list:
        if max_depth is None:
            max_depth = self.max_depth
        return [x.as_leaf() for x in self.leaves if x.depth <= max_depth]

    def to_json(self) -> dict:
        return {"t": fmt(self.t), "max_depth": self.max_depth,
                "leaves": [x.to_json() for x in self.leaves]}


def _companion_batch(t, n, params, eps):
    out = []
    for s0, typ in params:
        below = _walk(t, s0, n, s0 - eps)
        above = _walk(t, s0, n, s0 + eps)
        out.append((s0, typ, below, above))
    return out


def _workers(workers) -> int:
    if workers is None:
        workers = int(os.environ.get("BLAB_THREADS", "1") or 1)
    return max(1, int(workers))


def taut_leaves(t, N: int, eps=None, workers=None) -> TautLamination:
    """Λ_T(t) truncated at depth N, with every consistency check enforced."""
    t = angle(t)
    check_generic(t, N)
    workers = _workers(workers)
    leaves = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for n in range(1, N + 1):
            params = collision_params(t, n)
            e = default_eps(t, n) if eps is None else Fraction(eps)
            if pool is None:
                results = _companion_batch(t, n, params, e)
            else:
                size = -(-len(params) // workers)
                chunks = [params[i:i + size] for i in range(0, len(params), size)]
                results = [r for part in pool.map(_companion_batch, [t] * len(chunks),
                                                  [n] * len(chunks), chunks, [e] * len(chunks))
                           for r in part]
            leaves.extend(_assemble(t, n, results))
    finally:
        if pool is not None:
            pool.shutdown()
    lam = TautLamination(t, tuple(leaves), N)
    bad = [v for v in validate_elamination(lam.as_leaves()) if not v.warning]
    if bad:
        raise InternalAssertion(f"Λ_T({fmt(t)}) is not an elamination: {bad[0].detail}")
    return lam


def _assemble(t, n, results) -> list:
    found = {}
    for s0, typ, below, above in results:
        chord = frozenset({(3 * s0) % 1, (3 * below) % 1})
        if chord != frozenset({(3 * s0) % 1, (3 * above) % 1}):
            raise InternalAssertion(
                f"side dependence at s0={fmt(s0)}: companions {fmt(below)} and {fmt(above)} "
                f"give different chords")
        found.setdefault(chord, []).append((typ, s0))
    if len(found) != 3 ** (n - 1):
        raise InternalAssertion(f"depth {n}: {len(found)} chords, expected {3 ** (n - 1)}")
    out = []
    for chord, hits in found.items():
        if sorted(typ for typ, _ in hits) != ["A", "B"]:
            raise InternalAssertion(f"depth {n}: chord found by {hits}, expected one of each type")
        sa = next(s for typ, s in hits if typ == "A")
        sb = next(s for typ, s in hits if typ == "B")
        ta, tb = (3 * sa) % 1, (3 * sb) % 1
        if chord != {ta, tb}:
            raise InternalAssertion(f"depth {n}: chord {chord} is not {{3s_A, 3s_B}}")
        m = 3 ** (n - 1)
        if (m * ta - t) % 1 or (m * tb - t - THIRD) % 1:
            raise InternalAssertion(f"depth {n}: chord does not map to C_1 under 3^{n - 1}")
        out.append(TautLeaf(n, (ta, tb), (sa, sb)))
    out.sort(key=lambda x: sorted(x.chord))
    return out


class TautKernel:
    """Integer chain walk for Λ_T(t) to depth N.

    Every structural angle is an integer multiple of 1/D with D = 3^{N+1}·q,
    q the denominator of t.  The perturbation ε is infinitesimal: x = s0 counts
    as just above s* = s0 - ε (side -1) or just below s* = s0 + ε (side +1).
    ``t`` may exceed 1; label indices use the unreduced value, which keeps
    them continuous in t.
    """

    def __init__(self, t, N: int):
        self.t = Fraction(t)
        self.N = N
        q = self.t.denominator
        self.D = 3 ** (N + 1) * q
        self.third = self.D // 3
        self.T_raw = self.t.numerator * (self.D // q)
        self.T = self.T_raw % self.D

    def params(self, n: int) -> list:
        """(s0, type) for depth n, as integers; raises on boundary hits."""
        D, T, third = self.D, self.T, self.third
        step = D // 3 ** n
        out = []
        for typ, delta in ((0, 0), (1, third)):
            base = (T + delta) // 3 ** n  # exact, since 3^N divides both
            for j in range(3 ** n):
                s = (base + j * step) % D
                off = (s - T) % D
                if off == third or off == 2 * third:
                    raise DegenerateParameter(f"collision parameter {fmt(Fraction(s, D))} on the arc boundary")
                if third < off < 2 * third:
                    out.append((s, typ))
        return out

    def companion(self, s0: int, n: int, side: int = -1) -> int:
        D, T, third = self.D, self.T, self.third
        a = [(pow(3, n - k) * s0) % D for k in range(n + 1)]
        if a[0] == T:
            other = (T + third) % D
        elif a[0] == (T + third) % D:
            other = T
        else:
            raise InternalAssertion("chain does not start on C_1")
        for k in range(1, n + 1):
            c = self._comp(a[k], s0, side)
            hit = None
            for i in range(3):
                y = (other + i * D) // 3
                if self._comp(y, s0, side) == c:
                    if hit is not None:
                        raise InternalAssertion("two preimages in one component")
                    hit = y
            if hit is None:
                raise InternalAssertion("no preimage in the component")
            other = hit
        return other

    def _comp(self, x, s0, side):
        u = (x - self.T) % self.D
        if u == 0 or u == self.third:
            raise DegenerateParameter(f"angle {fmt(Fraction(x, self.D))} coincides with a tip of C_1")
        if u < self.third:
            return 0
        v = (x - s0) % self.D
        if side < 0:
            return 1 if v < self.third else 2
        return 1 if 0 < v <= self.third else 2

    def chords(self, n: int, both_sides: bool = True) -> list:
        """Depth-n chords as (type A tip, type B tip) integer pairs."""
        D = self.D
        found = {}
        for s0, typ in self.params(n):
            other = self.companion(s0, n, -1)
            chord = ((3 * s0) % D, (3 * other) % D)
            if both_sides:
                alt = ((3 * s0) % D, (3 * self.companion(s0, n, 1)) % D)
                if set(alt) != set(chord):
                    raise InternalAssertion(f"side dependence at s0={fmt(Fraction(s0, D))}")
            if typ == 1:
                chord = chord[::-1]
            found.setdefault(chord, []).append(typ)
        if len(found) != 3 ** (n - 1) or any(sorted(v) != [0, 1] for v in found.values()):
            raise InternalAssertion(f"depth {n}: chord bookkeeping failed")
        return sorted(found)

    def label(self, x: int, n: int, typ: int) -> int:
        """Index j with x ≡ (t + δ + j)/3^{n-1}, using the unreduced t."""
        m = 3 ** (n - 1)
        num = m * x - self.T_raw - typ * self.third
        if num % self.D:
            raise InternalAssertion("tip is not on its label lattice")
        return (num // self.D) % m

    def all_chords(self, both_sides: bool = True) -> dict:
        return {n: self.chords(n, both_sides) for n in range(1, self.N + 1)}


def kernel_census(t, N: int, both_sides: bool = True) -> list:
    """Census rows 0..N from the integer kernel."""
    t = Fraction(t)
    check_generic(t, N)
    k = TautKernel(t, N)
    D = k.D
    tips = []  # (position, chord id)
    rows = [census_of_lengths([1], 0)]
    nchords = 0
    for n in range(1, N + 1):
        for a, b in k.chords(n, both_sides):
            tips.append((a, nchords))
            tips.append((b, nchords))
            nchords += 1
        tips.sort()
        first = {}
        succ = [0] * len(tips)
        for g, (_, c) in enumerate(tips):
            if c in first:
                succ[g] = first[c]
                succ[first[c]] = g
            else:
                first[c] = g
        lengths = []
        pos = [x for x, _ in tips]
        for cyc in arc_cycles(len(pos), succ):
            total = 0
            for i in cyc:
                total += (pos[(i + 1) % len(pos)] - pos[i]) % D
            lengths.append(Fraction(total, D))
        rows.append(census_of_lengths(lengths, n))
    return rows


def taut_census(t, N: int, method: str = "auto", workers=None) -> list:
    """Census rows 0..N of S¹ mod Λ_T(t), depths ≤ n for row n.

    ``method`` is "exact" (Fraction companions), "kernel" (integer chain walk)
    or "auto": exact up to depth 8, kernel beyond.
    """
    if method == "auto":
        method = "exact" if N <= 8 else "kernel"
    if method == "kernel":
        return kernel_census(t, N)
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    lam = taut_leaves(t, N, workers=workers)
    rows = [census(PinchedCircle([]), 0)]
    for n in range(1, N + 1):
        rows.append(census(PinchedCircle(lam.as_leaves(n)), n))
    return rows


@dataclass(frozen=True)
class CheckReport:
    checks: tuple  # ((name, ok, detail), ...)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c[1]]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in self.checks]}


def rains_check(censuses: Sequence[Census]) -> CheckReport:
    """Row identities, the ℓ=1 recurrences, and the unique largest component."""
    rows = {c.depth: c.counts for c in censuses}
    checks = []
    for n, counts in sorted(rows.items()):
        total = sum(counts.values())
        weighted = sum(ell * c for ell, c in counts.items())
        checks.append((f"row {n}: count sum", total == (3 ** n + 1) // 2, f"{total} vs {(3 ** n + 1) // 2}"))
        checks.append((f"row {n}: length sum", weighted == 3 ** n, f"{weighted} vs {3 ** n}"))
        top = max(counts)
        checks.append((f"row {n}: unique component of length 2^{n}",
                       top == 2 ** n and counts[top] == 1, f"max ell {top} x{counts[top]}"))

    def n1(n):
        return rows[n].get(1, 0)

    for n in sorted(rows):
        if n >= 2 and n % 2 == 0 and n - 1 in rows:
            ok = n1(n) == 3 * n1(n - 1)
            checks.append((f"N({n},1) = 3N({n - 1},1)", ok, f"{n1(n)} vs {3 * n1(n - 1)}"))
        if n >= 3 and n % 2 == 1 and n - 1 in rows and (n - 1) // 2 in rows:
            h = (n - 1) // 2
            want = 3 * n1(n - 1) - 2 * n1(h)
            checks.append((f"N({n},1) = 3N({n - 1},1) - 2N({h},1)", n1(n) == want, f"{n1(n)} vs {want}"))
    return CheckReport(tuple(checks))


def compare_censuses(table: dict) -> CheckReport:
    """Compare census lists keyed by a label; all must agree row by row."""
    labels = list(table)
    checks = []
    if not labels:
        return CheckReport(())
    ref = labels[0]
    for other in labels[1:]:
        for a, b in zip(table[ref], table[other]):
            checks.append((f"row {a.depth}: {ref} vs {other}", a.entries == b.entries,
                           f"{dict(a.entries)} vs {dict(b.entries)}"))
        if len(table[ref]) != len(table[other]):
            checks.append((f"{ref} vs {other}: row count", False, ""))
    return CheckReport(tuple(checks))


def t_invariance_check(ts: Sequence, N: int, method: str = "auto") -> CheckReport:
    table = {fmt(angle(t)): taut_census(t, N, method) for t in ts}
    return compare_censuses(table)
