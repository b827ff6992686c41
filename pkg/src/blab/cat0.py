"""A one-vertex Euclidean presentation complex for Y_n and its vertex link.

Generators are the 3n chords of the regular 3n-gon whose endpoint ratio is
a cube root of unity; they form n equilateral triangles.  Each triangle
carries a Garside piece ⟨a,b,c,d | ab = bc = ca = d⟩ realised by three right
isosceles triangles (legs 1, hypotenuse d of length √2), and each pair of
geometrically disjoint chords from distinct triangles spans a unit square.
Angles are stored as integers in units of π/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx

from .errors import MultiVertex

RIGHT = 2    # π/2
EIGHTH = 1   # π/4
FULL = 8     # 2π


@dataclass(frozen=True)
class Cell:
    word: tuple      # ((generator, ±1), ...) read cyclically
    angles: tuple    # angles[i] sits between word[i] and word[i+1]

    def sides(self) -> int:
        return len(self.word)


@dataclass
class MetricComplex:
    generators: dict                   # name -> "1" or "sqrt2"
    cells: list = field(default_factory=list)
    vertices: int = 1
    pieces: int = 0
    squares: int = 0

    def check_angles(self) -> list:
        """Cells whose corner sum differs from (sides - 2)·π."""
        return [c for c in self.cells if sum(c.angles) != (c.sides() - 2) * 4]


def chords(n: int) -> list:
    """(triangle k, side s, endpoints) for the 3n chords; side s joins k+sn and k+(s+1)n."""
    out = []
    for k in range(n):
        for s in range(3):
            out.append((k, s, ((k + s * n) % (3 * n), (k + (s + 1) * n) % (3 * n))))
    return out


def _separated(p, q, m) -> bool:
    """Do chords p, q of the regular m-gon share no point (endpoints included)?"""
    if set(p) & set(q):
        return False
    a, b = sorted(p)
    inside = [a < x < b for x in q]
    return inside[0] == inside[1]


def _name(k: int, s: int) -> str:
    return f"{'abc'[s]}{k}"


def disjoint_pairs(n: int) -> list:
    """Pairs of generator names of geometrically disjoint chords from distinct triangles."""
    cs = chords(n)
    out = []
    for (k, s, p), (l, t, q) in combinations(cs, 2):
        if k != l and _separated(p, q, 3 * n):
            out.append((_name(k, s), _name(l, t)))
    return out


def naive_pairs(n: int) -> list:
    """Negative control: pair a with a, b with b, c with c, ignoring the holonomy."""
    return [(_name(k, s), _name(l, s)) for k, l in combinations(range(n), 2) for s in range(3)]


def build_complex(n: int, rule="geometric") -> MetricComplex:
    """Garside pieces for n triangles plus one square per commuting pair.

    ``rule`` is "geometric" (disjoint chords), "naive" (a control that ignores
    the twist between triangles) or an explicit list of generator-name pairs.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    gens = {}
    cells = []
    for k in range(n):
        a, b, c, d = (_name(k, 0), _name(k, 1), _name(k, 2), f"d{k}")
        gens.update({a: "1", b: "1", c: "1", d: "sqrt2"})
        for x, y in ((a, b), (b, c), (c, a)):
            # legs x, y meet at the right angle; the hypotenuse closes the cell
            cells.append(Cell(((x, 1), (y, 1), (d, -1)), (RIGHT, EIGHTH, EIGHTH)))
    if rule == "geometric":
        pairs = disjoint_pairs(n)
    elif rule == "naive":
        pairs = naive_pairs(n)
    else:
        pairs = list(rule)      # explicit commuting pairs of generator names
    for x, y in pairs:
        cells.append(Cell(((x, 1), (y, 1), (x, -1), (y, -1)), (RIGHT,) * 4))
    return MetricComplex(gens, cells, 1, n, len(pairs))


def _germ(letter, arriving: bool) -> tuple:
    g, e = letter
    # arriving along g lands at its end; arriving along g⁻¹ lands at its start
    return (g, "in") if (e > 0) == arriving else (g, "out")


@dataclass
class LinkGraph:
    graph: nx.MultiGraph

    def degrees(self) -> dict:
        return dict(self.graph.degree())

    def short_points(self) -> list:
        return [v for v in self.graph if not v[0].startswith("d")]


def vertex_link(cx: MetricComplex) -> LinkGraph:
    if cx.vertices != 1:
        raise MultiVertex(f"presentation has {cx.vertices} vertices")
    g = nx.MultiGraph()
    for name in cx.generators:
        g.add_node((name, "in"))
        g.add_node((name, "out"))
    for cell in cx.cells:
        w = cell.word
        for i, ang in enumerate(cell.angles):
            u = _germ(w[i], arriving=True)
            v = _germ(w[(i + 1) % len(w)], arriving=False)
            g.add_edge(u, v, weight=ang)
    return LinkGraph(g)


def girth(link: LinkGraph) -> int | None:
    """Length of the shortest cycle, in units of π/4 (None for a forest)."""
    g = link.graph
    best = None
    for u, v, key, data in list(g.edges(keys=True, data=True)):
        w = data["weight"]
        if u == v:
            best = w if best is None else min(best, w)
            continue
        g.remove_edge(u, v, key)
        try:
            rest = nx.dijkstra_path_length(g, u, v, weight=_min_weight)
        except nx.NetworkXNoPath:
            rest = None
        g.add_edge(u, v, key, **data)
        if rest is not None and (best is None or w + rest < best):
            best = w + rest
    return best


def _min_weight(u, v, d):
    # MultiGraph hands over every parallel edge's data
    return min(x["weight"] for x in d.values())


def crossing_radii(n: int, digits: int = 12) -> list:
    """Sorted distinct |x| with 2|x|^{3/2} = |ζ^j - ζ^k|, ζ a primitive n-th root."""
    if n < 2:
        raise ValueError("n must be at least 2")
    seen = {}
    for k in range(1, n):
        dist = abs(1 - complex(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)))
        r = (dist / 2) ** (2 / 3)
        seen.setdefault(round(r, digits), r)
    return sorted(seen.values())


def cat0_report(n: int, rule: str = "geometric") -> dict:
    link = vertex_link(build_complex(n, rule))
    g = girth(link)
    return {"n": n, "girth_units_pi4": g, "cat0": g is not None and g >= FULL}


__all__ = [
    "Cell", "MetricComplex", "LinkGraph", "build_complex", "vertex_link", "girth",
    "crossing_radii", "disjoint_pairs", "naive_pairs", "chords", "cat0_report",
]
