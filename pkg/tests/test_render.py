from fractions import Fraction as F

from blab.core import Leaf
from blab.render import RenderSpec, final_disks, render_elamination, render_pinched_disk
from blab.taut import taut_leaves

import pytest


def test_empty_elamination_is_just_the_circle():
    svg = render_elamination([])
    assert svg.count("<path") == 1
    assert svg.startswith("<?xml")


def test_one_group_per_leaf():
    leaves = taut_leaves(F(1, 12), 4).as_leaves()
    svg = render_elamination(leaves)
    assert svg.count("<g ") == 40


def test_depth_cut():
    leaves = taut_leaves(F(1, 12), 4).as_leaves()
    svg = render_elamination(leaves, RenderSpec(depth=2))
    assert svg.count("<g ") == 4


def test_critical_leaves_are_red():
    c = Leaf((F(1, 12), F(5, 12)), 1, depth=0)
    other = Leaf((F(1, 2), F(2, 3)), F(1, 3), depth=1)
    svg = render_elamination([c, other])
    assert svg.count('class="critical"') == 1
    assert 'stroke="red"' in svg
    tagged = render_elamination([other], critical=[other])
    assert 'class="critical"' in tagged


def test_output_is_deterministic():
    leaves = taut_leaves(F(1, 12), 3).as_leaves()
    assert render_elamination(leaves) == render_elamination(list(leaves))
    assert render_pinched_disk(leaves) == render_pinched_disk(list(leaves))


def test_pinched_radii_follow_lengths():
    svg = render_pinched_disk([Leaf((F(1, 4), F(5, 12)), 1)])
    big, small = final_disks(svg)
    assert big / small == pytest.approx(5, rel=1e-3)


def test_pinched_disk_without_leaves():
    svg = render_pinched_disk([])
    assert len(final_disks(svg)) == 1
    assert "<desc>" in svg


def test_pinched_disk_counts_components():
    leaves = taut_leaves(F(1, 12), 3).as_leaves()
    assert len(final_disks(render_pinched_disk(leaves))) == 14


def test_bad_spec():
    with pytest.raises(ValueError):
        RenderSpec(size=0)
