"""One test per acceptance criterion; each prints a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the terminal summary.  Criterion 5 asks for 11 orbits at depth 3 where the
tracker (and an independent push-over simulation) finds 12, so that test is
an expected failure and reports FAIL.
"""

import random
import time
from fractions import Fraction as F

import pytest

import conftest
import test_core
import test_dynlam
import test_pinch
import test_taut
from _pushsim import simulated_phi
from _table import TABLE
from blab.butcher import Poly, critical_data, critical_points, external_angle, green, normalize_poly, shift_member
from blab.cat0 import cat0_report
from blab.core import Leaf, leaf_image
from blab.monodromy import is_power_of_two, rotation_data, track
from blab.sausage import chain_orbit_sizes, continue_loop, fake_critical_chains, level_orbits, random_chain, tower_build
from blab.taut import companion, kernel_census, rains_check, t_invariance_check, taut_census

T = F(1, 12)


def record(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    conftest.ACCEPTANCE.append(line)
    return ok


@pytest.fixture(scope="module")
def exact_rows():
    t0 = time.perf_counter()
    rows = taut_census(T, 8, method="exact", workers=1)
    return rows, time.perf_counter() - t0


@pytest.fixture(scope="module")
def kernel_rows():
    return kernel_census(T, 12)


@pytest.fixture(scope="module")
def deep_track():
    t0 = time.perf_counter()
    rep = track(T, 6)
    return rep, time.perf_counter() - t0


def test_criterion_1_table(exact_rows, kernel_rows):
    rows, secs = exact_rows
    exact_ok = [r.row() for r in rows] == [TABLE[n] for n in range(9)]
    agree = [r.entries for r in rows] == [r.entries for r in kernel_rows[:9]]
    stretch = [r.row() for r in kernel_rows] == [TABLE[n] for n in range(13)]
    ok = exact_ok and agree and secs <= 600
    assert record(1, ok, f"rows 0-8 exact={exact_ok} in {secs:.1f}s single-threaded; "
                         f"kernel agrees on 0-8={agree}; stretch rows 9-12={stretch}")


def test_criterion_2_row_identities(exact_rows, kernel_rows):
    rows = list(exact_rows[0]) + list(kernel_rows)
    ok = all(sum(r.counts.values()) == (3 ** r.depth + 1) // 2 and
             sum(ell * c for ell, c in r.counts.items()) == 3 ** r.depth for r in rows)
    assert record(2, ok, f"count and length sums on {len(rows)} rows")


def test_criterion_3_recurrence(exact_rows, kernel_rows):
    a, b = rains_check(exact_rows[0]), rains_check(kernel_rows)
    ok = a.ok and b.ok
    assert record(3, ok, f"{len(a.checks) + len(b.checks)} checks, failures {a.failures() + b.failures()}")


def test_criterion_4_worked_example():
    other = companion(0, F(5, 9), 2)
    chord = leaf_image(Leaf((F(5, 9), other), F(1, 9)), 3).tips
    ok = other == F(16, 27) and chord == (F(2, 3), F(7, 9))
    assert record(4, ok, f"companion {other}, chord {{{chord[0]}, {chord[1]}}}")


@pytest.mark.xfail(strict=True, reason="depth 3 has 12 orbits (10 fixed, 2 swapped pairs), not 11; "
                                       "confirmed by the push-over simulation; see the decisions ledger")
def test_criterion_5_orbit_counts(deep_track):
    rep, secs = deep_track
    counts = [len(rep.at_depth(n).orbits()) for n in range(4)]
    powers = all(is_power_of_two(len(c)) for n in range(7) for c in rep.at_depth(n).orbits())
    sim = simulated_phi(T, 3) == list(rep.at_depth(3).phi)
    ok = counts == [1, 2, 5, 11] and powers and secs <= 900
    record(5, ok, f"orbit counts {counts} (want [1, 2, 5, 11]); powers of 2 through depth 6={powers} "
                  f"in {secs:.0f}s; simulation agrees at depth 3={sim}")
    assert powers and sim
    assert counts == [1, 2, 5, 11]


def test_criterion_6_cables(deep_track):
    rep = deep_track[0]
    bad = [(n, r.members, r.detail) for n in range(5) for r in rotation_data(rep, n) if not r.ok]
    total = sum(len(rep.at_depth(n).orbits()) for n in range(5))
    assert record(6, not bad, f"{total} orbits at depths 0-4, violations {bad}")


def test_criterion_7_invariance():
    rep = t_invariance_check([T, F(5, 6), F(1, 7), F(3, 17)], 5)
    assert record(7, rep.ok, f"{len(rep.checks)} row comparisons, failures {rep.failures()}")


def test_criterion_8_bottcher():
    f = Poly(3, (3, 3 ** -0.5))
    t0 = time.perf_counter()
    crit = critical_points(f)
    residual = max(abs(3 * z * z + 3) for z, _ in crit)
    at_i = min(crit, key=lambda c: abs(c[0] - 1j))[0]
    f2 = f(f(at_i))
    mod = green(f, at_i)
    th1 = external_angle(f, f(at_i))
    th2 = external_angle(f, f2)
    data = critical_data(f)
    angles = next(c.angles for c in data.points if abs(c.z - 1j) < 1e-6)

    def near(a, b):
        x = abs(a - b) % 1
        return min(x, 1 - x) < 1e-6

    import math
    checks = {
        "critical points ±i": residual < 1e-10 and sorted(round(z.imag) for z, _ in crit) == [-1, 1],
        "f²(i)": abs(f2 - (-4.42635)) < 1e-4,
        "|φ(i)|": abs(math.exp(mod) - 1.18) < 0.01,
        "θ(f(i))": near(th1, 1 / 6),
        "θ(f²(i))": near(th2, 1 / 2),
        "angles of i": len(angles) == 2 and near(angles[0], 1 / 18) and near(angles[1], 7 / 18),
    }
    secs = time.perf_counter() - t0
    ok = all(checks.values())
    assert record(8, ok, f"{checks} f²(i)={f2.real:.6f} |φ(i)|={math.exp(mod):.5f} in {secs:.1f}s")


def test_criterion_9_membership():
    got = (shift_member(normalize_poly([10, -20, 10, 0])).member,
           shift_member(normalize_poly([100, 0, -100, 0])).member,
           shift_member(Poly(3, (0, 0))).member)
    assert record(9, got == (False, True, False), f"(10z(z-1)², 100(z³-z), z³) -> {got}")


def test_criterion_10_cat0():
    t0 = time.perf_counter()
    girths = [cat0_report(n)["girth_units_pi4"] for n in range(1, 7)]
    secs = time.perf_counter() - t0
    ok = all(g >= 8 for g in girths) and girths[0] == 8 and secs < 1
    assert record(10, ok, f"girths {girths} (units π/4) in {secs:.2f}s")


def test_criterion_11_sausages():
    t0 = time.perf_counter()
    chains = [c for d in range(1, 6) for c in fake_critical_chains(d)]
    rng = random.Random(20240601)
    chains += [random_chain(d, rng) for d in (6, 7, 8) for _ in range(6)]
    results = chain_orbit_sizes(chains)
    powers = all(is_power_of_two(s) for _, sizes in results for s in sizes)
    tower = tower_build(("c",))
    example = sorted(len(o) for o in level_orbits(tower, continue_loop(tower), 2))
    secs = time.perf_counter() - t0
    ok = powers and example == [1, 2] and secs < 60
    assert record(11, ok, f"{len(results)} chains (all of depth ≤ 5, 18 random of depth 6-8) powers of 2={powers}; "
                          f"chain c gives {example}; {secs:.0f}s")


def test_criterion_12_properties():
    suites = [test_pinch.test_length_and_count_conservation, test_core.test_generated_systems_validate,
              test_dynlam.test_generator_counts_and_validity, test_taut.test_recorded_chord_ignores_side_and_eps]
    for suite in suites:
        suite()
    assert record(12, True, "pinch conservation, validator, generator counts, companion side/ε "
                            "independence on 10³ examples each")
