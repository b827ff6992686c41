from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blab.core import (Elamination, Leaf, angle, chords_cross, fmt, leaf_image, parse_rational,
                       validate_elamination)
from blab.errors import CriticalCollapse, DomainError, SharedTip

from _strategies import angles, noncrossing_leaves


def L(*tips, h=1):
    return Leaf(tuple(F(x) for x in tips), h)


def test_angle_normalises_into_unit_interval():
    assert angle(F(5, 4)) == F(1, 4)
    assert angle(F(-1, 3)) == F(2, 3)
    assert angle("7/6") == F(1, 6)


def test_parse_and_format():
    assert parse_rational("6/8") == F(3, 4)
    assert fmt(F(0)) == "0/1"
    with pytest.raises(DomainError):
        parse_rational("1/0")


@given(angles())
def test_format_roundtrip(x):
    assert parse_rational(fmt(x)) == x


def test_linked_diameters_cross():
    assert chords_cross(L(0, F(1, 2)), L(F(1, 4), F(3, 4)))


def test_worked_example_chords_do_not_cross_critical_leaf():
    c1 = L(0, F(1, 3))
    assert not chords_cross(c1, L(F(5, 9), F(16, 27)))
    assert not chords_cross(c1, L(F(2, 3), F(7, 9)))


def test_shared_tip_is_rejected():
    with pytest.raises(SharedTip):
        chords_cross(L(0, F(1, 2)), L(0, F(1, 4)))


@given(angles(), angles(), angles(), angles())
def test_crossing_is_symmetric(a, b, c, d):
    if len({a, b, c, d}) < 4:
        return
    p, q = L(a, b), L(c, d)
    assert chords_cross(p, q) == chords_cross(q, p)


def test_leaf_image_of_worked_example():
    img = leaf_image(L(F(5, 9), F(16, 27), h=F(1, 3)), 3)
    assert img.tips == (F(2, 3), F(7, 9))
    assert img.height == 1


def test_critical_leaf_collapses():
    with pytest.raises(CriticalCollapse):
        leaf_image(L(F(1, 12), F(5, 12)), 3)


def test_leaf_image_merges_tips():
    img = leaf_image(L(F(1, 4), F(5, 12), F(3, 4)), 3)
    assert img.tips == (F(1, 4), F(3, 4))
    assert img.multiplicity == 1


@given(angles(), angles(), st.integers(2, 5))
def test_image_iterates_like_power_map(a, b, d):
    if a == b:
        return
    p = L(a, b)
    try:
        once = leaf_image(leaf_image(p, d), d)
    except CriticalCollapse:
        return
    assert set(once.tips) == {(d * d * x) % 1 for x in p.tips}
    assert once.height == d * d


def test_empty_elamination_is_valid():
    assert validate_elamination([]) == []
    assert Elamination().validate() == []


def test_crossing_pair_reported():
    v = validate_elamination([L(0, F(1, 2)), L(F(1, 4), F(3, 4), h=F(1, 2))])
    assert [x.kind for x in v] == ["crossing"]


def test_duplicate_vein_reported():
    v = validate_elamination([L(0, F(1, 2)), L(0, F(1, 2), h=F(1, 2))])
    assert "duplicate-vein" in [x.kind for x in v]


def test_json_roundtrip():
    leaf = Leaf((F(1, 3), F(2, 3)), F(1, 9), depth=3)
    back = Leaf.from_json(leaf.to_json())
    assert back == leaf and back.depth == 3
    e = Elamination([leaf, L(0, F(1, 7))])
    assert Elamination.from_json(e.to_json()) == e


@settings(max_examples=1000)
@given(noncrossing_leaves())
def test_generated_systems_validate(leaves):
    assert validate_elamination(leaves) == []
