from itertools import product

import pytest

from blab.cat0 import (FULL, MetricComplex, build_complex, cat0_report, crossing_radii, disjoint_pairs, girth,
                       naive_pairs, vertex_link)
from blab.errors import MultiVertex


def test_cell_counts():
    assert [build_complex(n).squares for n in range(1, 7)] == [0, 3, 9, 18, 30, 45]
    cx = build_complex(3)
    assert cx.pieces == 3 and len(cx.generators) == 12
    assert len(cx.cells) == 9 + 9


def test_corner_sums_are_euclidean():
    for n in range(1, 5):
        assert build_complex(n).check_angles() == []


def test_single_piece_link():
    link = vertex_link(build_complex(1))
    g = link.graph
    assert g.number_of_nodes() == 8 and g.number_of_edges() == 9
    # the d germs carry the three π/4 corners of each side
    assert g.degree(("d0", "in")) == 3 and g.degree(("d0", "out")) == 3
    assert girth(link) == FULL


def test_a_lone_square_has_link_girth_two_pi():
    square = build_complex(2, rule=[("a0", "a1")]).cells[-1]
    cx = MetricComplex({"a0": "1", "a1": "1"}, [square])
    assert girth(vertex_link(cx)) == FULL


def test_two_pieces():
    cx = build_complex(2)
    assert sorted(disjoint_pairs(2)) == sorted(cx_pairs(cx))
    assert len(disjoint_pairs(2)) == 3


def cx_pairs(cx):
    return [(c.word[0][0], c.word[1][0]) for c in cx.cells if len(c.word) == 4]


def test_three_pieces_pairs():
    assert disjoint_pairs(3) == [("a0", "b1"), ("a0", "b2"), ("b0", "c1"), ("b0", "c2"), ("c0", "a1"),
                                 ("c0", "a2"), ("a1", "b2"), ("b1", "c2"), ("c1", "a2")]


def test_pairs_agree_with_published_triple_up_to_relabelling():
    # Garside triples (a,b,c), (n,m,o), (x,y,z) and their commuting pairs
    published = [("a", "n"), ("b", "m"), ("c", "o"), ("n", "x"), ("m", "y"), ("o", "z"),
                 ("x", "b"), ("y", "c"), ("z", "a")]
    slot = {g: (k, i) for k, triple in enumerate(("abc", "nmo", "xyz")) for i, g in enumerate(triple)}
    ours = {frozenset(p) for p in disjoint_pairs(3)}
    hits = []
    for shift in product(range(3), repeat=3):
        def rename(g):
            k, i = slot[g]
            return f"{'abc'[(i + shift[k]) % 3]}{k}"
        if {frozenset((rename(x), rename(y))) for x, y in published} == ours:
            hits.append(shift)
    assert hits


@pytest.mark.parametrize("n", range(1, 7))
def test_link_condition(n):
    link = vertex_link(build_complex(n))
    assert girth(link) == FULL
    assert min(link.degrees().values()) >= 2
    assert cat0_report(n) == {"n": n, "girth_units_pi4": 8, "cat0": True}


def test_naive_control_is_not_cat0_beyond_two():
    # ignoring the twist creates short cycles from three triangles on
    assert [cat0_report(n, "naive")["girth_units_pi4"] for n in range(1, 5)] == [8, 8, 6, 6]
    assert len(naive_pairs(3)) == 9


def test_more_than_one_vertex():
    cx = build_complex(2)
    cx.vertices = 2
    with pytest.raises(MultiVertex):
        vertex_link(cx)


def test_crossing_radii():
    assert crossing_radii(2) == [1.0]
    assert crossing_radii(3) == pytest.approx([(3 ** 0.5 / 2) ** (2 / 3)])
    assert crossing_radii(4) == pytest.approx([(2 ** 0.5 / 2) ** (2 / 3), 1.0])
