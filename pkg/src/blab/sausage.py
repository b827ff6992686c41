"""Quadratic towers of marked points for degree-3 chain sausages.

Level 1 holds the two zeros c and -2c of the root polynomial (z-c)^2(z+2c).
Level k+1 is the full preimage of level k under z ↦ z^2 + c_k, where c_k is a
previously built point.  A parent equal to c_k contributes the single
critical preimage 0.  Points are continued numerically as c runs once around
the circle |c| = |c0|, and the endpoint matching gives the monodromy.
"""

from __future__ import annotations

import cmath
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ContinuationStall, MatchFailure, NumericalDegeneracy

ROOTS = ("c", "-2c")
COLLIDE = 1e-9
MATCH_TOL = 1e-6
DEFAULT_C0 = 0.7 + 0.1j


@dataclass(frozen=True)
class TowerPoint:
    id: str
    level: int
    value: complex          # at c0
    parent: str | None
    sign: int               # +1 or -1 for a square root branch, 0 for the critical child
    delta: int              # local degree of the level map at this point


@dataclass
class QuadraticTower:
    c0: complex
    chain: tuple            # ids of c_1, ..., c_{n-1}
    levels: list            # list of lists of TowerPoint

    @property
    def depth(self) -> int:
        return len(self.levels)

    def points(self) -> list:
        return [p for level in self.levels for p in level]

    def level_ids(self, k: int) -> list:
        return [p.id for p in self.levels[k - 1]]

    def by_id(self) -> dict:
        return {p.id: p for p in self.points()}


def _child_id(parent: str, sign: int) -> str:
    return f"{parent}/{'+-0'[(1 - sign) // 2 if sign else 2]}"


def _branch(u: complex) -> complex:
    """Principal square root, with a fixed tie-break on the negative axis."""
    return cmath.sqrt(u)


def tower_build(chain: Sequence[str], c0: complex = DEFAULT_C0, depth: int | None = None) -> QuadraticTower:
    """Build levels 1..depth; ``chain`` names c_1, ..., c_{depth-1} by point id.

    Ids: level-1 points are "c" and "-2c"; the children of a point w are
    "w/+" (principal root), "w/-" and, when w is c_k itself, "w/0".
    """
    c0 = complex(c0)
    if c0 == 0:
        raise NumericalDegeneracy("c0 must be nonzero")
    chain = tuple(chain)
    depth = len(chain) + 1 if depth is None else depth
    if depth < 1 or len(chain) < depth - 1:
        raise ValueError(f"depth {depth} needs {depth - 1} chain selections, got {len(chain)}")
    chain = chain[:depth - 1]
    levels = [[TowerPoint("c", 1, c0, None, 0, 2), TowerPoint("-2c", 1, -2 * c0, None, 0, 1)]]
    known = {p.id: p for p in levels[0]}
    for k, sel in enumerate(chain, start=1):
        if sel not in known:
            raise ValueError(f"chain entry {k} names unknown point {sel!r}")
        cj = known[sel].value
        nxt = []
        for w in levels[-1]:
            if w.id == sel:
                nxt.append(TowerPoint(_child_id(w.id, 0), k + 1, 0j, w.id, 0, 2))
                continue
            r = _branch(w.value - cj)
            nxt.append(TowerPoint(_child_id(w.id, 1), k + 1, r, w.id, 1, 1))
            nxt.append(TowerPoint(_child_id(w.id, -1), k + 1, -r, w.id, -1, 1))
        vals = np.array([p.value for p in nxt])
        if len(vals) > 1:
            gaps = np.abs(vals[:, None] - vals[None, :]) + np.eye(len(vals)) * 1e300
            if gaps.min() < COLLIDE:
                raise NumericalDegeneracy(f"two level-{k + 1} points collide at c0={c0}; choose another c0")
        levels.append(nxt)
        known.update((p.id, p) for p in nxt)
    return QuadraticTower(c0, chain, levels)


class _Plan:
    """Flat arrays describing how each point is recomputed from c."""

    def __init__(self, tower: QuadraticTower):
        pts = tower.points()
        self.ids = [p.id for p in pts]
        index = {pid: i for i, pid in enumerate(self.ids)}
        self.start = np.array([p.value for p in pts], dtype=complex)
        self.layers = []
        self.spans = []
        lo = 0
        for level in tower.levels:
            self.spans.append((lo, lo + len(level)))
            lo += len(level)
        self.chain = np.array([index[x] for x in tower.chain], dtype=int)
        for k, level in enumerate(tower.levels[1:], start=1):
            sel = index[tower.chain[k - 1]]
            rows = np.array([index[p.id] for p in level])
            parents = np.array([index[p.parent] for p in level])
            crit = np.array([p.sign == 0 for p in level])
            self.layers.append((rows, parents, sel, crit))


def _advance(plan: _Plan, old: np.ndarray, c: complex) -> tuple:
    """Values at c continuing ``old``; returns (new, worst ratio of move to branch distance)."""
    new = np.empty_like(old)
    new[0], new[1] = c, -2 * c
    worst = 0.0
    for rows, parents, sel, crit in plan.layers:
        u = new[parents] - new[sel]
        r = np.sqrt(u)
        prev = old[rows]
        flip = np.abs(r - prev) > np.abs(-r - prev)
        r = np.where(flip, -r, r)
        r = np.where(crit, 0, r)
        live = ~crit
        if live.any():
            move = np.abs(r[live] - prev[live])
            # the branch point of ±sqrt(u) sits at 0 in the z-plane
            worst = max(worst, float(np.max(move / np.abs(prev[live]))))
        new[rows] = r
    return new, worst


def continue_loop(tower: QuadraticTower, turns: int | None = None, step: float = 1 / 64,
                  floor: float = 1e-9) -> list:
    """Permutation of all tower points after c ↦ e^{2πiθ}c0, θ: 0 → turns.

    perm[i] = j means point i is carried to the starting position of point j.
    A step is accepted when every point moves less than 0.1 of its distance
    to the branch point of its defining square root.  The loop may move the
    chain selections themselves, in which case the tower only closes up after
    several turns; with ``turns`` None the loop is repeated until every c_k is
    back (see ``return_time``).
    """
    return _continue(tower, turns, step, floor)[0]


def _continue(tower, turns, step, floor):
    plan = _Plan(tower)
    c0 = tower.c0
    vals = plan.start.copy()
    done = 0
    limit = turns if turns is not None else 2 ** tower.depth
    while done < limit:
        theta, h = 0.0, step
        while theta < 1.0:
            nxt = min(theta + h, 1.0)
            cand, worst = _advance(plan, vals, c0 * cmath.exp(2j * cmath.pi * nxt))
            if worst >= 0.1:
                h /= 2
                if h < floor:
                    raise ContinuationStall(f"step fell below {floor} at θ={done + theta:.6g}")
                continue
            vals, theta = cand, nxt
            h = min(step, 2 * h)
        done += 1
        if turns is None and np.all(np.abs(vals[plan.chain] - plan.start[plan.chain]) < MATCH_TOL):
            break
    else:
        if turns is None:
            raise MatchFailure(f"chain selections do not return within {limit} turns")
    perm = [None] * len(vals)
    for lo, hi in plan.spans:
        ref = plan.start[lo:hi]
        for i in range(lo, hi):
            d = np.abs(ref - vals[i])
            j = int(np.argmin(d))
            if d[j] > MATCH_TOL:
                raise MatchFailure(f"point {plan.ids[i]} ends {d[j]:.3g} from every start point")
            perm[i] = lo + j
    if sorted(perm) != list(range(len(perm))):
        raise MatchFailure("endpoint matching is not a bijection")
    return perm, done


def return_time(tower: QuadraticTower) -> int:
    """Fewest turns of the c-loop after which every chain selection is back."""
    return _continue(tower, None, 1 / 64, 1e-9)[1]


def level_orbits(tower: QuadraticTower, perm: Sequence[int], k: int | None = None) -> list:
    """Orbits (lists of ids) of the permutation on level ``k`` (default: top)."""
    k = tower.depth if k is None else k
    ids = [p.id for p in tower.points()]
    wanted = set(tower.level_ids(k))
    seen = set()
    out = []
    for i, pid in enumerate(ids):
        if pid not in wanted or i in seen:
            continue
        cyc = []
        j = i
        while j not in seen:
            seen.add(j)
            cyc.append(ids[j])
            j = perm[j]
        out.append(cyc)
    return out


def marked_lengths(tower: QuadraticTower) -> dict:
    """λ per point: 2/3 at c, 1/3 at -2c, and λ(child) = λ(parent)·δ(child)/3."""
    lam = {"c": Fraction(2, 3), "-2c": Fraction(1, 3)}
    for level in tower.levels[1:]:
        for p in level:
            lam[p.id] = lam[p.parent] * p.delta / 3
    return lam


def hurwitz_dimension(d: int, branch_multiplicities: Sequence[int]) -> int:
    """d - 1 - Σ|σ(q)|, where |σ| is d minus the number of cycles of σ(q)."""
    if any(m < 0 for m in branch_multiplicities):
        raise ValueError("multiplicities must be non-negative")
    return d - 1 - sum(branch_multiplicities)


def fake_critical_chains(depth: int) -> list:
    """Every chain with c_k drawn from level k, so that 0 is a fake critical point."""
    if depth <= 1:
        return [()]
    out = []
    for prefix in fake_critical_chains(depth - 1):
        tower = tower_build(prefix, depth=depth - 1)
        for pid in tower.level_ids(depth - 1):
            out.append(prefix + (pid,))
    return out


def random_chain(depth: int, rng: random.Random) -> tuple:
    """A fake-critical chain with each c_k drawn uniformly from level k."""
    chain = ()
    ids = list(ROOTS)
    for k in range(1, depth):
        pick = rng.choice(ids)
        chain += (pick,)
        nxt = []
        for pid in ids:
            nxt.extend([f"{pid}/0"] if pid == pick else [f"{pid}/+", f"{pid}/-"])
        ids = nxt
    return chain


def _orbit_sizes(args) -> tuple:
    chain, c0 = args
    tower = tower_build(chain, c0)
    perm = continue_loop(tower)
    return chain, sorted(len(o) for o in level_orbits(tower, perm))


def chain_orbit_sizes(chains: Sequence[tuple], c0: complex = DEFAULT_C0, workers: int | None = None) -> list:
    """(chain, sorted top-level orbit sizes) for each chain, optionally in parallel."""
    jobs = [(tuple(ch), complex(c0)) for ch in chains]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_orbit_sizes, jobs, chunksize=8))
    return [_orbit_sizes(j) for j in jobs]


def parse_chain(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


__all__ = [
    "QuadraticTower", "TowerPoint", "tower_build", "continue_loop", "return_time", "level_orbits",
    "marked_lengths", "hurwitz_dimension", "fake_critical_chains", "random_chain",
    "chain_orbit_sizes", "parse_chain",
]
