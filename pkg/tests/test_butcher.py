import cmath
import math
import random

import pytest

from blab.butcher import (Poly, critical_data, critical_points, external_angle, green, normalize_poly,
                          parse_coeffs, ray_point, shift_member)
from blab.errors import BelowCriticalHeight, Undecided, ZeroLeading

F = Poly(3, (3, 3 ** -0.5))


def turn_dist(a, b):
    x = abs(a - b) % 1.0
    return min(x, 1 - x)


def test_critical_points():
    pts = critical_points(F)
    assert sorted((round(z.imag), m) for z, m in pts) == [(-1, 1), (1, 1)]
    for z, _ in pts:
        assert abs(3 * z * z + 3) < 1e-10


def test_second_iterate_of_i():
    assert F(F(1j)) == pytest.approx(-4.42635, abs=1e-4)


def test_bottcher_modulus():
    assert math.exp(green(F, 1j)) == pytest.approx(1.18, abs=0.01)


def test_angles_of_iterates():
    assert turn_dist(external_angle(F, F(1j)), 1 / 6) < 1e-6
    assert turn_dist(external_angle(F, F(F(1j))), 1 / 2) < 1e-6


def test_critical_angles():
    data = critical_data(F)
    by_sign = {round(c.z.imag): c for c in data.points}
    assert by_sign[1].angles == pytest.approx([1 / 18, 7 / 18], abs=1e-6)
    assert by_sign[-1].angles == pytest.approx([11 / 18, 17 / 18], abs=1e-6)
    for c in data.points:
        a, b = c.angles
        assert (b - a) * 3 == pytest.approx(round((b - a) * 3), abs=1e-6)


def test_angle_below_critical_height():
    with pytest.raises(BelowCriticalHeight):
        external_angle(F, 1j)


def test_cubic_family_at_ten():
    # α z (z-1)^2 with α = 10
    p = normalize_poly([10, -20, 10, 0])
    assert shift_member(p).member is False


def test_large_cubic_is_in_the_shift_locus():
    assert shift_member(normalize_poly([100, 0, -100, 0])).member


def test_pure_power_is_not():
    assert not shift_member(Poly(3, (0, 0))).member


def test_normal_form():
    # 2z^2 conjugates to z^2 with α = 1/2
    p = normalize_poly([2, 0, 0])
    assert p.d == 2 and abs(p.a[0]) < 1e-12
    q = normalize_poly(parse_coeffs("1,3,0,1"))
    assert q.d == 3 and len(q.a) == 2
    with pytest.raises(ZeroLeading):
        normalize_poly([0, 0, 0])
    with pytest.raises(ZeroLeading):
        normalize_poly([0, 1, 5])


def test_membership_is_stable_under_more_iterations():
    rng = random.Random(3)
    for _ in range(20):
        a = (complex(rng.uniform(-4, 4), rng.uniform(-4, 4)), complex(rng.uniform(-4, 4), rng.uniform(-4, 4)))
        p = Poly(3, a)
        try:
            one = shift_member(p, maxiter=2000).member
            two = shift_member(p, maxiter=4000).member
        except Undecided:  # allowed; flipping is not
            continue
        assert one == two


def test_green_of_pure_power():
    p = Poly(3, (0, 0))
    for z in (2, 1.5j, -3 + 1j):
        assert green(p, z) == pytest.approx(math.log(abs(z)), abs=1e-12)
        assert turn_dist(external_angle(p, z), cmath.phase(z) / (2 * math.pi)) < 1e-9


def test_green_functional_equation():
    rng = random.Random(11)
    for _ in range(1000):
        z = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
        assert green(F, F(z)) == pytest.approx(3 * green(F, z), rel=1e-9, abs=1e-12)


def test_angle_functional_equation():
    rng = random.Random(5)
    top = max(green(F, c) for c, _ in critical_points(F))
    for _ in range(60):
        theta = rng.random()
        h = top * rng.uniform(1.05, 4)
        z = ray_point(F, theta, h)
        assert green(F, z) == pytest.approx(h, rel=1e-8)
        a, b = external_angle(F, z), external_angle(F, F(z))
        assert turn_dist(a, theta) < 1e-8
        assert turn_dist(3 * a, b) < 1e-8
