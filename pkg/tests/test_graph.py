"""Graph model: construction, validation, text format, geometry."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tadex import (
    BadAttachIndex,
    EmptyOrTooShort,
    EmptyTail,
    GraphFormatError,
    NonpositiveWeight,
    UnknownNode,
    build_cycle,
    build_n_tadpole,
    build_tadpole,
    cycle_geometry,
    distances_from,
    parse_graph,
    serialize_graph,
    shortest_distance,
    shortest_path,
    with_start,
)

weights = st.fractions(min_value=F(1, 4), max_value=F(6), max_denominator=4)


def test_cycle_basics():
    g = build_cycle([1, 2, 3])
    assert g.graph_class == "cycle"
    assert g.n_tails == 0
    assert g.cycle_length == 6
    assert g.total_weight == 6
    assert g.start == "c0"
    assert {v for v, _ in g.neighbors("c0")} == {"c1", "c2"}
    assert all(g.degree(v) == 2 for v in g.nodes)


def test_tadpole_basics():
    g = build_tadpole([1, 1, 1], [2, 3], attach=1)
    assert g.graph_class == "tadpole"
    assert g.n_tails == 1
    assert g.tails_length == 5
    assert g.total_weight == 8
    assert g.degree("c1") == 3
    assert g.tail_containing("t2") == 0
    assert g.tail_containing("c2") is None
    assert g.on_cycle("c2") and not g.on_cycle("t1")


def test_ntadpole_basics():
    g = build_n_tadpole([1, 1, 1], [(0, [1]), (2, [2, 2])])
    assert g.graph_class == "ntadpole"
    assert g.n_tails == 2
    assert g.degree("c0") == 3 and g.degree("c2") == 3
    assert g.tails[g.tail_containing("t2_1")].attach == "c2"


def test_construction_errors():
    with pytest.raises(EmptyOrTooShort):
        build_cycle([1, 2])
    with pytest.raises(NonpositiveWeight):
        build_cycle([1, 0, 2])
    with pytest.raises(NonpositiveWeight):
        build_tadpole([1, 1, 1], [-2], attach=0)
    with pytest.raises(EmptyTail):
        build_tadpole([1, 1, 1], [], attach=0)
    with pytest.raises(BadAttachIndex):
        build_tadpole([1, 1, 1], [1], attach=5)
    with pytest.raises(UnknownNode):
        build_cycle([1, 1, 1], start="zz")


def test_parse_basic_text():
    g = parse_graph(
        """
        # a tadpole with one tail
        cycle 1 1/2 0.25
        tail 0 2 3
        start t1
        """
    )
    assert g.graph_class == "tadpole"
    assert g.start == "t1"
    assert g.cycle_length == F(7, 4)
    assert g.tails[0].weights == (F(2), F(3))


def test_parse_errors():
    with pytest.raises(GraphFormatError):
        parse_graph("tail 0 1\nstart c0")
    with pytest.raises(GraphFormatError):
        parse_graph("cycle 1 x 2")
    with pytest.raises(GraphFormatError):
        parse_graph("cycle 1 1 1\nbogus 3")
    with pytest.raises(UnknownNode):
        parse_graph("cycle 1 1 1\nstart q9")


def test_serialize_round_trip_by_hand():
    g = build_tadpole([1, F(1, 2), F(5, 3)], [F(2), F(7, 2)], attach=2, start="c1")
    h = parse_graph(serialize_graph(g))
    assert h.cycle_nodes == g.cycle_nodes
    assert h.cycle_weights == g.cycle_weights
    assert h.tails == g.tails
    assert h.start == g.start


@settings(max_examples=60, deadline=None)
@given(
    ws=st.lists(weights, min_size=3, max_size=8),
    tails=st.lists(st.lists(weights, min_size=1, max_size=3), min_size=0, max_size=3),
    data=st.data(),
)
def test_serialize_round_trip_random(ws, tails, data):
    attach = [(data.draw(st.integers(0, len(ws) - 1)), t) for t in tails]
    g = build_n_tadpole(ws, attach)
    start = data.draw(st.sampled_from(g.nodes))
    g = with_start(g, start)
    assert parse_graph(serialize_graph(g)) == g


def test_with_start_relabels_only():
    g = build_tadpole([1, 2, 3], [1], attach=0)
    h = with_start(g, "t1")
    assert h.start == "t1"
    assert h.nodes == g.nodes and h.edges == g.edges


def test_distances_and_paths():
    g = build_tadpole([1, 1, 4], [2], attach=1)
    d = distances_from(g, "c0")
    assert d["c1"] == 1
    assert d["c2"] == 2  # going around beats the weight-4 edge
    assert d["t1"] == 3
    assert shortest_distance(g, "c2", "t1") == 3
    assert shortest_path(g, "c0", "c2") == ["c0", "c1", "c2"]


def test_geometry_midpoint_on_node():
    g = build_cycle([1, 1, 2])
    geo = cycle_geometry(g)
    # both arcs from c0 reach c2 at exactly half the cycle
    assert geo.cycle_length == 4
    assert geo.mid_edge is None
    assert geo.v_short == geo.v_long == "c2"
    assert geo.d_short == geo.d_long == 2
    assert geo.e_max.weight == 2


def test_geometry_midpoint_on_edge():
    g = build_cycle([1, 1, 1])
    geo = cycle_geometry(g)
    # the midpoint sits half an edge past c1
    assert geo.mid_edge is not None
    assert {geo.mid_edge.u, geo.mid_edge.v} == {"c1", "c2"}
    assert geo.d_short == geo.d_long == 1
    assert geo.mid_offset == F(1, 2)


def test_geometry_reference_off_cycle():
    g = build_tadpole([1, 1, 1, 1], [2, 1], attach=3, start="t2")
    geo = cycle_geometry(g)
    assert geo.reference == "c3"
    assert geo.d_intersection == 3
    assert geo.d_tail == 0


@settings(max_examples=60, deadline=None)
@given(ws=st.lists(weights, min_size=3, max_size=9))
def test_geometry_invariants(ws):
    g = build_cycle(ws)
    geo = cycle_geometry(g)
    half = geo.cycle_length / 2
    assert geo.d_short <= geo.d_long <= half
    if geo.mid_edge is None:
        assert geo.d_short == geo.d_long == half
    else:
        # the two flank arcs plus the straddled edge close the cycle
        assert geo.d_short + geo.mid_edge.weight + geo.d_long == geo.cycle_length
        assert geo.d_short + geo.mid_offset == half
        assert 0 < geo.mid_offset < geo.mid_edge.weight
    assert geo.e_max.weight == max(g.cycle_weights)
