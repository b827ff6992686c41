"""SVG pictures of elaminations and schematic pinched disks.

Output is deterministic: coordinates are written with three decimals and
elements appear in input order, so identical input gives identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import Leaf, fmt
from .pinch import PinchedCircle

PALETTE = ("#1f3a93", "#2e7d32", "#ef6c00", "#6a1b9a", "#00838f", "#795548", "#546e7a", "#9e9d24")


@dataclass(frozen=True)
class RenderSpec:
    size: int = 600
    depth: int | None = None        # leaves deeper than this are skipped
    scale: float = 0.35             # radius = exp(min(h, cap)·scale)
    cap: float = 1.0
    palette: tuple = PALETTE
    vein_width: float = 0.8
    tip_width: float = 0.6
    critical_color: str = "red"

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("size must be positive")
        if self.cap <= 0:
            raise ValueError("cap must be positive")


def _n(x: float) -> str:
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def _header(spec: RenderSpec, extra: str = "") -> list:
    s = spec.size
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" '
        f'viewBox="0 0 {s} {s}">',
        *([extra] if extra else []),
    ]


def _circle_path(cx: float, cy: float, r: float, cls: str, stroke="black", fill="none") -> str:
    # two half arcs, so the circle is a single path element
    return (f'<path class="{cls}" d="M {_n(cx + r)} {_n(cy)} A {_n(r)} {_n(r)} 0 1 0 {_n(cx - r)} {_n(cy)} '
            f'A {_n(r)} {_n(r)} 0 1 0 {_n(cx + r)} {_n(cy)} Z" fill="{fill}" stroke="{stroke}"/>')


class _Frame:
    def __init__(self, spec: RenderSpec):
        self.c = spec.size / 2
        self.unit = 0.95 * self.c / math.exp(spec.cap * spec.scale)

    def point(self, theta, r: float = 1.0) -> tuple:
        a = 2 * math.pi * float(theta)
        return self.c + self.unit * r * math.cos(a), self.c - self.unit * r * math.sin(a)


def _geodesic(frame: _Frame, a: Fraction, b: Fraction) -> str:
    """Path segment from tip a to tip b along the hyperbolic geodesic."""
    x2, y2 = frame.point(b)
    gap = float((b - a) % 1)
    if abs(gap - 0.5) < 1e-12:
        return f"L {_n(x2)} {_n(y2)}"
    short = min(gap, 1 - gap)
    r = frame.unit * math.tan(math.pi * short)
    sweep = 1 if gap < 0.5 else 0
    return f"A {_n(r)} {_n(r)} 0 0 {sweep} {_n(x2)} {_n(y2)}"


def render_elamination(leaves: Iterable[Leaf], spec: RenderSpec = RenderSpec(),
                       critical: Iterable[Leaf] = ()) -> str:
    """Unit circle, each vein as a geodesic polygon and each tip as a radial segment.

    Leaves of depth 0 or listed in ``critical`` get class ``critical`` and are
    drawn in red.
    """
    frame = _Frame(spec)
    crit = set(critical)
    out = _header(spec)
    out.append(_circle_path(frame.c, frame.c, frame.unit, "boundary"))
    for leaf in leaves:
        if spec.depth is not None and leaf.depth is not None and leaf.depth > spec.depth:
            continue
        is_crit = leaf in crit or leaf.depth == 0
        color = spec.critical_color if is_crit else spec.palette[(leaf.depth or 0) % len(spec.palette)]
        cls = "critical" if is_crit else f"leaf depth-{leaf.depth if leaf.depth is not None else 'x'}"
        tips = leaf.tips
        x0, y0 = frame.point(tips[0])
        d = [f"M {_n(x0)} {_n(y0)}"]
        ring = tips if len(tips) > 2 else tips[:2]
        for i in range(1, len(ring)):
            d.append(_geodesic(frame, ring[i - 1], ring[i]))
        if len(ring) > 2:
            d.append(_geodesic(frame, ring[-1], ring[0]))
        r = math.exp(min(float(leaf.height), spec.cap) * spec.scale)
        title = ",".join(fmt(x) for x in tips)
        out.append(f'<g class="{cls}" stroke="{color}" fill="none" data-tips="{title}">')
        out.append(f'<path class="vein" d="{" ".join(d)}" stroke-width="{spec.vein_width}"/>')
        for x in tips:
            (ax, ay), (bx, by) = frame.point(x), frame.point(x, r)
            out.append(f'<path class="tip" d="M {_n(ax)} {_n(ay)} L {_n(bx)} {_n(by)}" '
                       f'stroke-width="{spec.tip_width}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _mean_angle(comp) -> float:
    sx = sy = 0.0
    for a, b in comp.arcs:
        span = float((b - a) % 1 or 1)
        mid = 2 * math.pi * (float(a) + span / 2)
        sx += span * math.cos(mid)
        sy += span * math.sin(mid)
    if sx == 0 and sy == 0:
        return 0.0
    return math.atan2(sy, sx)


def _parent_of(coarse: PinchedCircle, comp) -> int:
    a, b = comp.arcs[0]
    span = (b - a) % 1 or Fraction(1)
    return coarse.component_of(a + span / 2)


def render_pinched_disk(leaves: Iterable[Leaf], spec: RenderSpec = RenderSpec()) -> str:
    """Schematic, non-conformal picture of the disk pinched along the leaves.

    Leaves are pinched a height level at a time, tallest first.  When a
    component splits, its longest piece keeps the parent's disk and every
    other piece gets a new disk, tangent to the parent at the piece's mean
    angle.  Radii are the final component lengths.
    """
    leaves = [x for x in leaves if spec.depth is None or x.depth is None or x.depth <= spec.depth]
    levels = sorted({x.height for x in leaves}, reverse=True)
    stages = [PinchedCircle([])]
    for h in levels:
        stages.append(PinchedCircle([x for x in leaves if x.height >= h]))
    # first pass: the tree of disks, as (parent disk, direction, length)
    owner = {0: 0}               # component id at the current stage -> disk index
    tree = [[None, 0.0, 1.0]]
    for k in range(1, len(stages)):
        coarse, fine = stages[k - 1], stages[k]
        kids = {}
        for comp in fine.components:
            kids.setdefault(_parent_of(coarse, comp), []).append(comp)
        nxt = {}
        for pid, group in sorted(kids.items()):
            group.sort(key=lambda cp: (-cp.length, cp.id))
            keep = group[0]
            nxt[keep.id] = owner[pid]
            tree[owner[pid]][2] = float(keep.length)
            for comp in group[1:]:
                nxt[comp.id] = len(tree)
                tree.append([owner[pid], _mean_angle(comp), float(comp.length)])
        owner = nxt
    # second pass: each disk tangent to its parent at final radii
    disks = []
    for parent, a, r in tree:
        if parent is None:
            disks.append((0.0, 0.0, r))
            continue
        px, py, pr = disks[parent]
        disks.append((px + (pr + r) * math.cos(a), py + (pr + r) * math.sin(a), r))
    lo_x = min(x - r for x, _, r in disks)
    hi_x = max(x + r for x, _, r in disks)
    lo_y = min(y - r for _, y, r in disks)
    hi_y = max(y + r for _, y, r in disks)
    scale = 0.9 * spec.size / max(hi_x - lo_x, hi_y - lo_y)
    mx, my = (lo_x + hi_x) / 2, (lo_y + hi_y) / 2
    c = spec.size / 2
    out = _header(spec, "<desc>schematic pinched disk; radii follow component length, not conformal</desc>")
    for i, (x, y, r) in enumerate(disks):
        out.append(f'<g class="component" data-index="{i}">')
        out.append(_circle_path(c + scale * (x - mx), c - scale * (y - my), scale * r, "disk",
                                stroke=spec.palette[0], fill="#e3eaf5"))
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def final_disks(svg: str) -> list:
    """Radii of the disks in a pinched-disk SVG, in drawing order."""
    out = []
    lines = svg.splitlines()
    for i, line in enumerate(lines):
        if line.startswith('<g class="component"'):
            d = lines[i + 1].split('d="')[1].split()
            out.append(float(d[4]))
    return out


__all__ = ["RenderSpec", "render_elamination", "render_pinched_disk", "final_disks"]
