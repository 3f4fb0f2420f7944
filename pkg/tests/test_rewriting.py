import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

import gen
from portrewrite.core import GraphBuilder, LocatedGraph, PSignature, validate
from portrewrite.inets import isomorphic
from portrewrite.matching import find_matches
from portrewrite.rewriting import (
    ALL,
    AT_LEAST_ONE,
    IdSource,
    IllFormedRewrite,
    Rule,
    RuleError,
    apply_match,
    apply_multi,
    apply_parallel,
    rewrite_once,
)

SIG = PSignature({"X": ["x1", "x2"], "S": ["s_p", "s_a"], "T": ["t1"]})


def builder(start=1):
    return GraphBuilder(SIG, start=start)


def identity_rule():
    l, r = builder(), builder(101)
    l.add("X")
    r.add("X")
    return Rule("keep", l.build(), r.build(),
                {(1, "x1"): frozenset({(101, "x1")}), (1, "x2"): frozenset({(101, "x2")})},
                m_nodes=frozenset({101}))


def reduce_rule():
    l = builder()
    a, b = l.add("S"), l.add("S")
    l.link(a, "s_p", b, "s_p")
    return Rule("reduce", l.build(), builder(101).build(),
                wires=(((1, "s_a"), (2, "s_a")),))


def drop_rule(name="drop", node="T"):
    l = builder()
    l.add(node)
    return Rule(name, l.build(), builder(101).build())


def s_chain(n):
    """T - S>S<S ... a chain whose middle S agents meet head to head."""
    b = GraphBuilder(SIG)
    t1 = b.add("T")
    s1, s2 = b.add("S"), b.add("S")
    t2 = b.add("T")
    b.link(t1, "t1", s1, "s_a")
    b.link(s1, "s_p", s2, "s_p")
    b.link(s2, "s_a", t2, "t1")
    return b.build(), (t1, s1, s2, t2)


def located(g, pos=None):
    return LocatedGraph(g, g.node_ids() if pos is None else frozenset(pos))


def test_rule_validation():
    l = builder()
    l.add("X")
    with pytest.raises(RuleError):
        Rule("bad", l.build(), builder(101).build(), {(1, "nope"): frozenset()})
    with pytest.raises(RuleError):
        Rule("bad", l.build(), builder(101).build(), m_nodes=frozenset({5}))
    with pytest.raises(RuleError):
        Rule("bad", l.build(), builder(101).build(), {(1, "x1"): frozenset({(101, "x1")})})


def test_identity_like_rule():
    b = GraphBuilder(SIG)
    x, t, u = b.add("X"), b.add("T"), b.add("T")
    b.link(x, "x1", t, "t1")
    b.link(x, "x2", u, "t1")
    host = located(b.build(), {x})
    out = rewrite_once(host, identity_rule(), random.Random(0), IdSource.after(host.graph))
    assert out.ok
    assert isomorphic(out.located.graph, host.graph)
    new = out.records[0].created_ids
    assert out.located.position == new and len(new) == 1
    assert x not in out.located.graph.nodes


def test_empty_m_removes_image_from_position():
    b = GraphBuilder(SIG)
    for _ in range(3):
        b.add("T")
    host = located(b.build())
    out = rewrite_once(host, drop_rule(), random.Random(1), IdSource.after(host.graph))
    rec = out.records[0]
    assert out.located.position == host.position - rec.deleted
    assert len(out.located.position) == 2


def test_reduce_joins_outer_neighbours():
    g, (t1, s1, s2, t2) = s_chain(1)
    out = rewrite_once(located(g), reduce_rule(), random.Random(0), IdSource.after(g))
    res = out.located.graph
    assert set(res.nodes) == {t1, t2}
    assert res.partner((t1, "t1")) == (t2, "t1")
    assert validate(res) == []


def test_irreducible_host_fails_untouched():
    b = GraphBuilder(SIG)
    b.add("X")
    host = located(b.build())
    out = rewrite_once(host, reduce_rule(), random.Random(0), IdSource(10))
    assert not out.ok and out.located is host


def test_single_match_ignores_rng():
    g, _ = s_chain(1)
    host = located(g)
    results = {rewrite_once(host, reduce_rule(), random.Random(s), IdSource(10)).located.graph
               .edges for s in range(5)}
    assert len(results) == 1


def test_symmetric_matches_chosen_uniformly():
    g, _ = s_chain(1)
    host = located(g)
    counts = Counter()
    for seed in range(10_000):
        out = rewrite_once(host, reduce_rule(), random.Random(seed), IdSource(10))
        counts[out.records[0].match.key()] += 1
    assert len(counts) == 2
    for c in counts.values():
        assert abs(c / 10_000 - 0.5) <= 0.02


def test_seeded_choice_is_replayable():
    g, _ = s_chain(1)
    host = located(g)
    a = rewrite_once(host, reduce_rule(), random.Random(3), IdSource(10))
    b = rewrite_once(host, reduce_rule(), random.Random(3), IdSource(10))
    assert a.records == b.records and a.located == b.located


def test_fan_out_onto_connected_port_is_an_error():
    l, r = builder(), builder(101)
    l.add("T")
    r.add("T")
    r.add("T")
    rule = Rule("twice", l.build(), r.build(),
                {(1, "t1"): frozenset({(101, "t1"), (102, "t1")})})
    b = GraphBuilder(SIG)
    t, u = b.add("T"), b.add("T")
    b.link(t, "t1", u, "t1")
    host = located(b.build(), {t})
    with pytest.raises(IllFormedRewrite):
        rewrite_once(host, rule, random.Random(0), IdSource(10))
    lone = GraphBuilder(SIG)
    lone.add("T")
    out = rewrite_once(located(lone.build()), rule, random.Random(0), IdSource(10))
    assert out.ok and len(out.located.graph.nodes) == 2


def test_rhs_edges_and_redirection_meet_on_one_port():
    # interface target already used by an rhs edge
    l, r = builder(), builder(101)
    l.add("T")
    a, c = r.add("S"), r.add("S")
    r.link(a, "s_p", c, "s_p")
    rule = Rule("clash", l.build(), r.build(), {(1, "t1"): frozenset({(101, "s_p")})})
    b = GraphBuilder(SIG)
    t, u = b.add("T"), b.add("T")
    b.link(t, "t1", u, "t1")
    with pytest.raises(IllFormedRewrite):
        rewrite_once(located(b.build(), {t}), rule, random.Random(0), IdSource(10))


def two_kinds():
    b = GraphBuilder(SIG)
    t = b.add("T")
    x = b.add("X")
    return located(b.build()), t, x


def test_parallel_all_rewrites_both_in_one_step():
    host, t, x = two_kinds()
    out = apply_parallel(host, [drop_rule("dt", "T"), drop_rule("dx", "X")], ALL,
                         random.Random(0), IdSource(10))
    assert out.ok and len(out.records) == 2 and not out.located.graph.nodes


def test_parallel_all_fails_when_one_side_is_missing():
    b = GraphBuilder(SIG)
    b.add("T")
    host = located(b.build())
    out = apply_parallel(host, [drop_rule("dt", "T"), drop_rule("dx", "X")], ALL,
                         random.Random(0), IdSource(10))
    assert not out.ok and out.located is host


def test_interleave_applies_the_available_side():
    b = GraphBuilder(SIG)
    b.add("T")
    host = located(b.build())
    out = apply_parallel(host, [drop_rule("dx", "X"), drop_rule("dt", "T")], AT_LEAST_ONE,
                         random.Random(0), IdSource(10))
    assert out.ok and [r.rule for r in out.records] == ["dt"]


def test_interleave_tie_break_prefers_left():
    b = GraphBuilder(SIG)
    b.add("T")
    host = located(b.build())
    out = apply_parallel(host, [drop_rule("left", "T"), drop_rule("right", "T")], AT_LEAST_ONE,
                         random.Random(0), IdSource(10))
    assert [r.rule for r in out.records] == ["left"] and "operand 0" in out.note


def ts(n):
    b = GraphBuilder(SIG)
    for _ in range(n):
        b.add("T")
    return located(b.build())


def test_multi_respects_maximum():
    out = apply_multi(ts(5), drop_rule(), 2, 3, random.Random(0), IdSource(10))
    assert out.ok and len(out.records) == 3


def test_multi_minimum_not_met():
    host = ts(1)
    out = apply_multi(host, drop_rule(), 2, -1, random.Random(0), IdSource(10))
    assert not out.ok and out.located is host


def test_multi_unbounded_takes_a_maximal_disjoint_set():
    host = ts(4)
    out = apply_multi(host, drop_rule(), 0, -1, random.Random(0), IdSource(10))
    assert len(out.records) == 4 and not out.located.graph.nodes


def test_multi_on_overlapping_redexes_is_maximal():
    # S chain S-S-S-S where only 2 reduce redexes are pairwise disjoint
    b = GraphBuilder(SIG)
    s = [b.add("S") for _ in range(4)]
    b.link(s[0], "s_p", s[1], "s_p")
    b.link(s[1], "s_a", s[2], "s_a")
    b.link(s[2], "s_p", s[3], "s_p")
    host = located(b.build())
    out = apply_multi(host, reduce_rule(), 0, -1, random.Random(0), IdSource(10))
    assert len(out.records) == 2


def check_step(host, rule, match, res, rec):
    image = match.image
    assert rec.created_ids.isdisjoint(rec.deleted)
    assert rec.m_image <= rec.created_ids
    assert res.position == (host.position - image) | rec.m_image
    assert res.position <= res.graph.node_ids()
    assert validate(res.graph) == []
    rmap = dict(rec.created)
    wired = {p for w in rule.wires for p in w}
    inv = {h: l for l, h in match.pairs}
    for e in host.graph.edges:
        for (h, p), q in ((e.end1, e.end2), (e.end2, e.end1)):
            if h not in image or q[0] in image:
                continue
            lport = (inv[h], p)
            targets = rule.interface.get(lport, frozenset())
            if lport in wired:
                continue
            if targets:
                for (r, rp) in targets:
                    assert res.graph.partner(q) == (rmap[r], rp)
            else:
                assert res.graph.partner(q) is None


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_rewrites_keep_every_invariant(seed):
    rng = random.Random(seed)
    rule = gen.random_rule(rng, "r")
    host = gen.random_located(rng)
    ms = find_matches(rule.lhs, host, rule.constraints)
    for m in ms[:3]:
        res, rec = apply_match(host, rule, m, IdSource.after(host.graph))
        check_step(host, rule, m, res, rec)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fail_never_mutates(seed):
    rng = random.Random(seed)
    rule = gen.random_rule(rng, "r")
    host = gen.random_located(rng)
    out = rewrite_once(host, rule, random.Random(seed), IdSource.after(host.graph))
    if not out.ok:
        assert out.located is host and not out.records
