import random

import pytest
from hypothesis import given, settings, strategies as st

import gen
from portrewrite.core import (
    DesignationError,
    Edge,
    GraphBuilder,
    LocatedGraph,
    PortGraph,
    PSignature,
    SignatureError,
    designated_successors,
    free_ports,
    interface_nodes,
    make_node,
    successors,
    validate,
)
from portrewrite.textformat import FormatError, format_graph, parse_graph

SIG = PSignature({"I": ["i_h", "i_l", "i_r"], "S": ["s_p", "s_a"]})


def chain(n=3):
    b = GraphBuilder(SIG)
    ids = [b.add("S") for _ in range(n)]
    for a, c in zip(ids, ids[1:]):
        b.link(a, "s_a", c, "s_p")
    return b.build(), ids


def test_signature_rejects_shared_port_names():
    with pytest.raises(SignatureError):
        PSignature({"A": ["p"], "B": ["p"]})


def test_signature_rejects_empty_port_set():
    with pytest.raises(SignatureError):
        PSignature({"A": []})


def test_signature_merge_conflict():
    with pytest.raises(SignatureError):
        SIG.merge({"S": ["s_p"]})
    assert SIG.merge({"S": ["s_p", "s_a"]}) == SIG


def test_nodes_get_the_signature_port_set():
    n = make_node(SIG, 4, "I", {"i_h": "tok"})
    assert n.port_names() == ("i_h", "i_l", "i_r")
    assert n.state("i_h") == "tok" and n.state("i_l") is None


def test_valid_chain():
    g, _ = chain()
    assert validate(g) == []


def test_port_used_twice_is_reported():
    g, ids = chain(2)
    g = g.with_edges([Edge.of((ids[0], "s_a"), (ids[1], "s_a"))])
    assert any("used twice" in p for p in validate(g))


def test_unknown_port_and_node_are_reported():
    g, ids = chain(2)
    bad = g.with_edges([Edge.of((ids[0], "i_h"), (99, "s_p"))])
    report = validate(bad)
    assert any("unknown port" in p for p in report)
    assert any("unknown node" in p for p in report)


def test_self_connected_port_is_reported():
    g = PortGraph(SIG, [make_node(SIG, 0, "S")], [Edge.of((0, "s_a"), (0, "s_a"))])
    assert any("itself" in p for p in validate(g))


def test_edge_between_two_ports_of_one_node_is_fine():
    g = PortGraph(SIG, [make_node(SIG, 0, "I")], [Edge.of((0, "i_l"), (0, "i_r"))])
    assert validate(g) == []


def test_free_ports_and_interface():
    g, ids = chain(3)
    assert free_ports(g) == {(ids[0], "s_p"), (ids[2], "s_a")}
    assert interface_nodes(g) == {ids[0], ids[2]}


def test_successors():
    g, (a, b, c) = chain(3)
    assert successors(g, {b}) == {a, c}
    assert successors(g, {a}) == {b}
    assert successors(g, set()) == frozenset()


def test_designated_successors_follow_one_port():
    g, (a, b, c) = chain(3)
    assert designated_successors(g, {b}, {"S": "s_a"}) == {c}
    assert designated_successors(g, {c}, {"S": "s_a"}) == frozenset()
    with pytest.raises(DesignationError):
        designated_successors(g, {b}, {"I": "i_h"})


def test_located_graph_position_validity():
    g, ids = chain(2)
    assert LocatedGraph(g, {ids[0]}).position_valid()
    assert not LocatedGraph(g, {42}).position_valid()


def test_graph_equality_ignores_edge_order():
    g1 = PortGraph(SIG, [make_node(SIG, 0, "S"), make_node(SIG, 1, "S")],
                   [Edge.of((1, "s_p"), (0, "s_a"))])
    g2 = PortGraph(SIG, [make_node(SIG, 1, "S"), make_node(SIG, 0, "S")],
                   [Edge((0, "s_a"), (1, "s_p"))])
    assert g1 == g2


def test_graph_text_example():
    text = """
    SIGNATURE
    S : s_p, s_a
    NODES
    1 : S s_p=tok
    2 : S
    EDGES
    1.s_a -- 2.s_p
    POSITION
    2
    """
    lg = parse_graph(text)
    assert lg.position == {2}
    assert lg.graph.nodes[1].state("s_p") == "tok"
    assert parse_graph(format_graph(lg)) == lg


@pytest.mark.parametrize("text", [
    "NODES\n1 : Q\n",
    "SIGNATURE\nS : s_p\nNODES\n1 : S\n1 : S\n",
    "SIGNATURE\nS : s_p\nNODES\n1 : S\nEDGES\n1.s_p - 2.s_p\n",
    "stray line\n",
])
def test_bad_graph_text(text):
    with pytest.raises(Exception):
        parse_graph(text)


def test_format_error_carries_line():
    with pytest.raises(FormatError) as err:
        parse_graph("SIGNATURE\nS : s_p\nNODES\n1 : S\nEDGES\n1.s_p - 2.s_p\n")
    assert err.value.line == 6


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_graph_text_round_trip(seed):
    rng = random.Random(seed)
    lg = gen.random_located(rng)
    assert parse_graph(format_graph(lg)) == lg


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.sampled_from(["a1", "a2"]),
                       st.text("abcxyz_0123456789", min_size=1, max_size=5)))
def test_port_states_round_trip(states):
    g = PortGraph(gen.SIG, [make_node(gen.SIG, 0, "A", states)])
    assert parse_graph(format_graph(g)).graph == g
