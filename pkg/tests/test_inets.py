import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import random_graph
from portrewrite import inets
from portrewrite.core import Edge, GraphBuilder, LocatedGraph, Node, PortGraph, PSignature
from portrewrite.corpus import arithmetic, lists
from portrewrite.corpus.common import RuleBuilder
from portrewrite.inets import AgentDecl, INetRuleSet
from portrewrite.matching import find_matches
from portrewrite.strategy import EngineConfig, eval_strategy, parse_strategy
from portrewrite.strategy import trace as T

SIG = PSignature({"I": ["i_h", "i_l", "i_r"], "S": ["s_p", "s_a"], "E": ["e"]})
AGENTS = (AgentDecl("I", 2, "i_h"), AgentDecl("S", 1, "s_p"), AgentDecl("E", 0, "e"))


def arith_set():
    return INetRuleSet.from_rule_file(arithmetic.rule_file())


def reduce_like(name="r", ports=("s_p", "s_p")):
    rb = RuleBuilder(SIG, name)
    a, b = rb.lhs.add("S"), rb.lhs.add("S")
    rb.lhs.link(a, ports[0], b, ports[1])
    other = {"s_p": "s_a", "s_a": "s_p"}
    rb.wire(a, other[ports[0]], b, other[ports[1]])
    return rb.build()


# validation

def test_arithmetic_rules_validate_clean():
    assert inets.validate_inet(arith_set()) == []


def test_list_rules_validate_clean():
    assert inets.validate_inet(lists.rule_set()) == []


def test_aux_to_principal_is_not_an_active_pair():
    rs = INetRuleSet(SIG, AGENTS, (reduce_like("bad", ("s_p", "s_a")),))
    report = inets.validate_inet(rs)
    assert len(report) == 1
    assert "bad" in report[0] and "not an active pair" in report[0]


def test_duplicate_pair_is_reported():
    rs = INetRuleSet(SIG, AGENTS, (reduce_like("r1"), reduce_like("r2")))
    report = inets.validate_inet(rs)
    assert len(report) == 1
    assert "duplicate pair" in report[0]


def test_free_port_count_mismatch():
    rb = RuleBuilder(SIG, "lossy")
    a, b = rb.lhs.add("S"), rb.lhs.add("S")
    rb.lhs.link(a, "s_p", b, "s_p")
    rs = INetRuleSet(SIG, AGENTS, (rb.build(),))
    report = inets.validate_inet(rs)
    assert report == ["rule lossy: rhs has 0 free ports, lhs has 2"]


def test_undeclared_agent_and_bad_declaration():
    rs = INetRuleSet(SIG, (AgentDecl("S", 1, "s_p"), AgentDecl("I", 1, "i_x")),
                     (reduce_like(),))
    report = inets.validate_inet(rs)
    assert any("arity 1 needs 2 ports" in m for m in report)
    assert any("principal port 'i_x' unknown" in m for m in report)


def test_principal_designation():
    d = inets.principal_designation(INetRuleSet(SIG, AGENTS))
    assert d == {"I": "i_h", "S": "s_p", "E": "e"}
    assert "Z" not in d
    assert inets.principal_designation(arith_set()) == {"I": "i_h", "S": "s_p"}


# interface normal form strategy

def test_inf_strategy_needs_rules():
    with pytest.raises(ValueError):
        inets.inf_strategy([])


def test_inf_strategy_matches_parsed_text():
    text = "repeat*((reduce; property(interface, graph)) orelse nextsuc)"
    assert inets.inf_strategy(["reduce"]) == parse_strategy(text)


def test_inf_on_normal_form_takes_no_rule_step():
    # a 3-agent net whose only principal pair is not at the interface
    rf = arithmetic.rule_file()
    b = GraphBuilder(rf.signature)
    head = b.add("I")
    s1, s2 = b.add("S"), b.add("S")
    b.link(head, "i_l", s1, "s_a")
    b.link(s1, "s_p", s2, "s_a")
    b.link(s2, "s_p", head, "i_r")
    g = b.build()
    lg = LocatedGraph(g, frozenset({head}))
    # exhaustive check: no rule has a match here
    assert all(not find_matches(r.lhs, lg.with_position(g.node_ids()), r.constraints)
               for r in rf.rules.values())
    cfg = EngineConfig(rules=rf.rules, designation=inets.principal_designation(arith_set()))
    res = eval_strategy(inets.inf_strategy(sorted(rf.rules)), lg, cfg)
    assert res.outcome == "Id"
    assert not any(s.kind == T.RULE for s in res.trace.items)
    assert res.located.graph == g


def test_inf_reduces_an_interface_redex():
    rf = arithmetic.rule_file()
    lg = LocatedGraph(arithmetic.encode_number(1, 4, 3), frozenset())
    pos = frozenset(lg.graph.by_name("I"))
    cfg = EngineConfig(rules=rf.rules, designation=inets.principal_designation(arith_set()))
    res = eval_strategy(inets.inf_strategy(["reduce"]), lg.with_position(pos), cfg)
    assert res.outcome == "Id"
    assert arithmetic.decode_number(res.located.graph) == 1


# isomorphism

def expand(g: PortGraph) -> nx.Graph:
    """Ports become nodes of their own, so networkx can check port-preserving isomorphism."""
    x = nx.Graph()
    for nid, n in g.nodes.items():
        x.add_node(("n", nid), label=("node", n.name))
        for p in n.ports:
            x.add_node(("p", nid, p.name), label=("port", p.name, p.state))
            x.add_edge(("n", nid), ("p", nid, p.name))
    for e in g.edges:
        (a, pa), (b, pb) = e.ends()
        x.add_edge(("p", a, pa), ("p", b, pb))
    return x


def renamed_by(g, m):
    nodes = [Node(m[n.id], n.name, n.ports) for n in g.nodes.values()]
    edges = [Edge.of((m[a], pa), (m[b], pb)) for (a, pa), (b, pb) in (e.ends() for e in g.edges)]
    return PortGraph(g.signature, nodes, edges)


def renamed(g: PortGraph, rng: random.Random) -> PortGraph:
    ids = sorted(g.nodes)
    fresh = rng.sample(range(100, 100 + 3 * len(ids)), len(ids))
    return renamed_by(g, dict(zip(ids, fresh)))


def same_labels(a, b):
    return a["label"] == b["label"]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 10**9))
def test_isomorphic_agrees_with_networkx(s1, s2):
    g1 = random_graph(random.Random(s1), max_nodes=6, states=False)
    g2 = random_graph(random.Random(s2), max_nodes=6, states=False)
    want = nx.is_isomorphic(expand(g1), expand(g2), node_match=same_labels)
    assert inets.isomorphic(g1, g2) == want


@pytest.mark.parametrize("seed", range(40))
def test_renamed_graph_is_isomorphic(seed):
    rng = random.Random(seed)
    g = random_graph(rng, max_nodes=8)
    h = renamed(g, rng)
    m = inets.isomorphism(g, h)
    assert m is not None
    assert renamed_by(g, m) == h


def test_port_swap_breaks_isomorphism():
    b = GraphBuilder(SIG)
    x, y = b.add("S"), b.add("S")
    b.link(x, "s_p", y, "s_a")
    c = GraphBuilder(SIG)
    x, y = c.add("S"), c.add("S")
    c.link(x, "s_p", y, "s_p")
    assert not inets.isomorphic(b.build(), c.build())


def test_regular_graphs_need_search():
    # two cycles of three versus one cycle of six: refinement alone cannot tell
    def cycles(sizes):
        b = GraphBuilder(SIG)
        for k in sizes:
            ids = [b.add("S") for _ in range(k)]
            for i in range(k):
                b.link(ids[i], "s_a", ids[(i + 1) % k], "s_p")
        return b.build()
    assert not inets.isomorphic(cycles([3, 3]), cycles([6]))
    assert inets.isomorphic(cycles([3, 3]), cycles([3, 3]))


# confluence

ANY_RULE = "repeat*(reduce orelse negate orelse open)"


@pytest.mark.parametrize("seed", range(20))
def test_random_number_nets_are_confluent(seed):
    rf = arithmetic.rule_file()
    s = parse_strategy(ANY_RULE, rf.rules)
    lg = arithmetic.random_net(random.Random(seed))
    a = eval_strategy(s, lg, EngineConfig(rules=rf.rules, seed=1))
    b = eval_strategy(s, lg, EngineConfig(rules=rf.rules, seed=2))
    assert inets.isomorphic(a.located.graph, b.located.graph)
    for r in rf.rules.values():
        assert not find_matches(r.lhs, a.located.with_position(a.located.graph.node_ids()))
