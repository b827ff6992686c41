"""Floating-point dynamics of polynomials in normal form.

Escape tests, the Green's function h, external angles of Böttcher
coordinates and the critical data (heights and landing angles) that the
butcher map records.  Double precision throughout; every answer is guarded
by a residual check instead of an error bound.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BelowCriticalHeight, RayTraceFailure, Undecided, ZeroLeading

BIG = 1e8           # |w| past which log|w| is used for the potential
ROOT_RESIDUAL = 1e-12


@dataclass(frozen=True)
class Poly:
    """z^d + a_2 z^{d-2} + ... + a_d, stored as ``a = (a_2, ..., a_d)``."""
    d: int
    a: tuple

    def coeffs(self) -> list:
        """Highest degree first."""
        return [1, 0, *self.a]

    def __call__(self, z):
        w = 1
        for c in self.coeffs()[1:]:
            w = w * z + c
        return w

    def with_derivative(self, z):
        w, dw = 1, 0
        for c in self.coeffs()[1:]:
            dw = dw * z + w
            w = w * z + c
        return w, dw

    def escape_radius(self) -> float:
        return max(2.0, 1.0 + max((abs(c) for c in self.a), default=0.0))


def normalize_poly(raw: Sequence[complex]) -> Poly:
    """Conjugate b_0 z^d + b_1 z^{d-1} + ... into normal form.

    With z ↦ αz + β the new leading coefficient is α^{d-1} b_0, so α is the
    principal (d-1)-st root of 1/b_0 and β = -b_1/(d b_0).
    """
    raw = [complex(c) for c in raw]
    while raw and raw[0] == 0:
        raw = raw[1:]
        if not raw:
            break
    if not raw:
        raise ZeroLeading("all coefficients vanish")
    d = len(raw) - 1
    if d < 2:
        raise ZeroLeading(f"degree {d} has no normal form")
    b0, b1 = raw[0], raw[1]
    alpha = (1 / b0) ** (1 / (d - 1))
    beta = -b1 / (d * b0)
    f = np.polynomial.Polynomial(raw[::-1])
    inner = np.polynomial.Polynomial([beta, alpha])
    g = (f(inner) - beta) / alpha
    c = g.coef[::-1]
    if abs(c[0] - 1) > 1e-9 * max(1.0, abs(b0)) or abs(c[1]) > 1e-9 * max(1.0, abs(b1), abs(b0)):
        raise ZeroLeading("normalization residual too large")
    return Poly(d, tuple(complex(x) for x in c[2:]))


def parse_coeffs(text: str) -> list:
    return [complex(x.strip().replace("i", "j")) for x in text.split(",") if x.strip()]


def critical_points(p: Poly) -> list:
    """(location, multiplicity) for the roots of f'."""
    deriv = [p.d * 1.0] + [0.0] + [(p.d - k) * c for k, c in enumerate(p.a, start=2)][: p.d - 2]
    roots = np.roots(deriv) if p.d > 2 else np.array([0j])
    polished = []
    for r in roots:
        z = complex(r)
        for _ in range(50):
            # Newton on f' with f'' for the derivative
            _, d1, d2 = _derivs(p, z)
            if d2 == 0:
                break
            step = d1 / d2
            z -= step
            if abs(step) < 1e-16 * max(1.0, abs(z)):
                break
        polished.append(z)
    out = []
    for z in polished:
        for i, (w, m) in enumerate(out):
            if abs(w - z) < 1e-6:
                out[i] = (w, m + 1)
                break
        else:
            out.append((z, 1))
    # a multiple root of f' polishes only to about sqrt(eps), so restore the exact mean
    merged = []
    for w, m in out:
        near = [z for z in polished if abs(z - w) < 1e-6]
        merged.append((sum(near) / len(near), m))
    for z, m in merged:
        if m == 1 and abs(_derivs(p, z)[1]) > ROOT_RESIDUAL * max(1.0, abs(z)) ** (p.d - 1) * p.d:
            raise RayTraceFailure(f"critical point {z} has residual {abs(_derivs(p, z)[1]):.3g}")
    return merged


def _derivs(p: Poly, z):
    w, d1, d2 = 1, 0, 0
    for c in p.coeffs()[1:]:
        d2 = d2 * z + 2 * d1
        d1 = d1 * z + w
        w = w * z + c
    return w, d1, d2


@dataclass
class Membership:
    member: bool
    escape_times: list      # per critical point; None if it never escapes


def _escape_time(p: Poly, z: complex, R: float, maxiter: int):
    """Iterations until |f^n z| > R, or None if the orbit visibly settles into a cycle."""
    hist = []
    for n in range(maxiter + 1):
        if abs(z) > R:
            return n
        for w in hist[-64:]:
            if abs(z - w) < 1e-12 * max(1.0, abs(z)):
                return None
        hist.append(z)
        z = p(z)
    raise Undecided(f"orbit neither escapes nor cycles within {maxiter} iterations")


def shift_member(p: Poly, R: float | None = None, maxiter: int = 10_000) -> Membership:
    R = p.escape_radius() if R is None else R
    times = []
    for c, m in critical_points(p):
        times.extend([_escape_time(p, c, R, maxiter)] * m)
    return Membership(all(t is not None for t in times), times)


def green(p: Poly, z: complex, maxiter: int = 10_000) -> float:
    """h(z) = lim d^{-n} log|f^n z|, truncated once |f^n z| > 1e8; 0 if bounded."""
    z = complex(z)
    for n in range(maxiter + 1):
        az = abs(z)
        if az > BIG:
            return math.log(az) / p.d ** n
        z = p(z)
    return 0.0


def _far_angle(p: Poly, w: complex) -> float:
    """arg φ(w)/2π for |w| large, by the product φ(w) = w·Π (f(w_k)/w_k^d)^{1/d^{k+1}}."""
    total = cmath.phase(w)
    scale = 1.0
    for _ in range(60):
        fw = p(w)
        scale /= p.d
        total += scale * cmath.phase(fw / w ** p.d)
        w = fw
        if abs(w) > 1e100 or scale < 1e-18:
            break
    return (total / (2 * math.pi)) % 1.0


def ray_point(p: Poly, theta: float, h: float, start: complex | None = None, steps: int = 16,
              ceiling: float = 40.0) -> complex:
    """Point with φ = e^{h + 2πiθ}, reached by walking down the ray from high potential.

    Each stage solves f^n(x) = exp(d^n(h' + 2πiθ)) by Newton from the previous
    point, with n chosen so that the right-hand side has modulus beyond 1e8.
    """
    d = p.d
    hi = max(h, math.log(p.escape_radius()) + 3.0)
    x = cmath.exp(complex(hi, 2 * math.pi * theta)) if start is None else start
    hs = [h] if hi <= h else list(np.geomspace(hi, h, max(2, int(steps * math.log2(hi / h)) + 1)))
    for hk in hs:
        n = 0
        while d ** n * hk < math.log(BIG) and n < 200:
            n += 1
        if d ** n * hk > ceiling * math.log(10):
            n = max(0, n - 1)
        ang = (d ** n * theta) % 1.0
        target = cmath.exp(complex(d ** n * hk, 2 * math.pi * ang))
        for _ in range(60):
            w, dw = x, 1
            for _ in range(n):
                fw, df = p.with_derivative(w)
                w, dw = fw, dw * df
            if dw == 0:
                raise RayTraceFailure(f"ray {theta} hit a critical point")
            step = (w - target) / dw
            x -= step
            if abs(step) < 1e-14 * max(1.0, abs(x)):
                break
        else:
            raise RayTraceFailure(f"Newton stalled on ray {theta} at potential {hk:.4g}")
    return x


def _critical_heights(p: Poly) -> list:
    return [green(p, c) for c, _ in critical_points(p)]


def external_angle(p: Poly, z: complex, top: float | None = None) -> float:
    """θ(z) in turns for z above every critical height.

    Climbs to a far iterate f^N z, reads its angle off the convergent product,
    then pulls back one step at a time: of the d candidates (θ + j)/d the one
    whose traced ray reaches f^k z is kept.
    """
    z = complex(z)
    top = max(_critical_heights(p), default=0.0) if top is None else top
    hz = green(p, z)
    if hz <= top:
        raise BelowCriticalHeight(f"h(z)={hz:.6g} is not above the critical height {top:.6g}")
    orbit = [z]
    while abs(orbit[-1]) < 1e4 * p.escape_radius():
        orbit.append(p(orbit[-1]))
    theta = _far_angle(p, orbit[-1])
    for k in range(len(orbit) - 2, -1, -1):
        w = orbit[k]
        hw = hz * p.d ** k
        dists = []
        for j in range(p.d):
            cand = (theta + j) / p.d
            try:
                dists.append((abs(ray_point(p, cand, hw) - w), cand))
            except RayTraceFailure:
                continue
        dists.sort()
        if not dists or (len(dists) > 1 and dists[1][0] < 1e3 * dists[0][0]) or dists[0][0] > 1e-6 * max(1.0, abs(w)):
            raise RayTraceFailure(f"no unique ray reaches {w}")
        theta = dists[0][1]
    # functional equation as a runtime check
    if len(orbit) > 1:
        back = (theta * p.d ** (len(orbit) - 1)) % 1.0
        far = _far_angle(p, orbit[-1])
        if min(abs(back - far), 1 - abs(back - far)) > 1e-6:
            raise RayTraceFailure("pulled-back angle fails θ∘f = dθ")
    return theta


@dataclass
class CriticalPoint:
    z: complex
    multiplicity: int
    height: float
    angles: list
    escape_time: int


@dataclass
class CriticalData:
    poly: Poly
    points: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "degree": self.poly.d,
            "critical": [
                {"re": c.z.real, "im": c.z.imag, "multiplicity": c.multiplicity, "height": c.height,
                 "angles": c.angles, "escape_time": c.escape_time}
                for c in self.points
            ],
        }


def critical_data(p: Poly, rel: float = 1e-3, jitter: int = 3) -> CriticalData:
    """Heights and landing angles of every critical point.

    For critical c, the first iterate f^m c above all critical heights gets
    its angle θ from ``external_angle``; the candidates (θ + j)/d^m are traced
    down to h(c)(1 + rel), and those ending near c are its angles.  "Near"
    means within a tenth of the injectivity radius, estimated as the distance
    from c to the nearest other critical point or preimage of f(c).
    """
    member = shift_member(p)
    if not member.member:
        raise Undecided("critical data needs a shift-locus polynomial")
    crit = critical_points(p)
    heights = [green(p, c) for c, _ in crit]
    top = max(heights)
    out = []
    for (c, m), hc, t in zip(crit, heights, _expand_times(crit, member.escape_times)):
        k = 1
        while hc * p.d ** k <= top:
            k += 1
        w = c
        for _ in range(k):
            w = p(w)
        base = external_angle(p, w, top)
        others = [abs(c - e) for e, _ in crit if e != c]
        fc = p(c)
        pre = [complex(r) for r in np.roots([1, 0, *p.a[:-1], p.a[-1] - fc]) if abs(r - c) > 1e-6]
        inj = min(others + [abs(c - r) for r in pre] + [1.0])
        for attempt in range(jitter):
            level = hc * (1 + rel * (1 + 0.37 * attempt))
            try:
                ends = [((base + j) / p.d ** k, ray_point(p, (base + j) / p.d ** k, level))
                        for j in range(p.d ** k)]
            except RayTraceFailure:
                continue
            hit = sorted(th % 1.0 for th, x in ends if abs(x - c) < 0.1 * inj)
            if len(hit) == m + 1:
                break
        else:
            raise RayTraceFailure(f"rays to critical point {c} are ambiguous")
        out.append(CriticalPoint(c, m, hc, hit, t))
    return CriticalData(p, out)


def _expand_times(crit, times):
    it = iter(times)
    out = []
    for _, m in crit:
        ts = [next(it) for _ in range(m)]
        out.append(ts[0])
    return out


__all__ = [
    "Poly", "normalize_poly", "parse_coeffs", "critical_points", "shift_member", "Membership",
    "green", "external_angle", "ray_point", "critical_data", "CriticalData", "CriticalPoint",
]
