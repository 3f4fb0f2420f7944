"""Rules with an arrow-node interface, and one-step (and parallel) rewriting."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from portrewrite.core import (
    Edge,
    LocatedGraph,
    PortGraph,
    PortGraphError,
    PortRef,
    make_node,
)
from portrewrite.matching import (
    Match,
    PortConstraint,
    find_disjoint_tuples,
    find_matches,
)


class RuleError(PortGraphError):
    """A rule is malformed."""


class IllFormedRewrite(PortGraphError):
    """Applying a rule here would attach two edges to one port."""


@dataclass(frozen=True)
class Rule:
    """A port-graph rewrite rule ``L => R`` with arrow-node interface.

    ``interface`` maps an L port to the R ports its external edge is
    redirected to; an L port absent from ``interface`` and ``wires``, or
    mapped to the empty set, goes to the black hole. ``wires`` pairs two L
    ports whose external partners get joined directly. ``m_nodes`` are the R
    nodes whose copies join the position.
    """

    name: str
    lhs: PortGraph
    rhs: PortGraph
    interface: Mapping[PortRef, frozenset] = field(default_factory=dict)
    wires: tuple[tuple[PortRef, PortRef], ...] = ()
    m_nodes: frozenset = frozenset()
    constraints: Mapping[PortRef, PortConstraint] = field(default_factory=dict)

    def __post_init__(self):
        problems = rule_problems(self)
        if problems:
            raise RuleError(f"rule {self.name!r}: " + "; ".join(problems))

    def __hash__(self):
        return hash(self.name)

    def with_m(self, m_nodes: Iterable[int]) -> Rule:
        return Rule(self.name, self.lhs, self.rhs, self.interface, self.wires,
                    frozenset(m_nodes), self.constraints)


def rule_problems(rule: Rule) -> list[str]:
    out = []
    if rule.lhs.signature != rule.rhs.signature:
        out.append("lhs and rhs signatures differ")
    lports = rule.lhs.all_ports()
    rports = rule.rhs.all_ports()
    for k, targets in rule.interface.items():
        if k not in lports:
            out.append(f"interface key {k} is not an L port")
        for t in targets:
            if t not in rports:
                out.append(f"interface target {t} is not an R port")
    wired = set()
    for a, b in rule.wires:
        for p in (a, b):
            if p not in lports:
                out.append(f"wire end {p} is not an L port")
            if p in wired or rule.interface.get(p):
                out.append(f"L port {p} routed twice")
            wired.add(p)
    if not rule.m_nodes <= rule.rhs.node_ids():
        out.append("M is not a subset of the rhs nodes")
    for k in rule.constraints:
        if k not in lports:
            out.append(f"constraint on unknown L port {k}")
    return out


@dataclass(frozen=True)
class RewriteRecord:
    rule: str
    match: Match
    created: tuple[tuple[int, int], ...]   # (R id, fresh host id)
    deleted: frozenset
    m_image: frozenset
    pos_before: frozenset
    pos_after: frozenset

    @property
    def created_ids(self) -> frozenset:
        return frozenset(h for _, h in self.created)


class IdSource:
    """Monotone supply of fresh node ids; ids are never handed out twice."""

    def __init__(self, start: int = 0):
        self.next_id = start

    def __call__(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    @classmethod
    def after(cls, graph: PortGraph) -> IdSource:
        return cls(graph.max_id() + 1)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def groups(self) -> Iterator[list]:
        out: dict = {}
        for x in list(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return iter(out.values())


def apply_match(host: LocatedGraph, rule: Rule, match: Match,
                ids: Callable[[], int],
                fixed: Optional[Sequence[tuple[int, int]]] = None
                ) -> tuple[LocatedGraph, RewriteRecord]:
    """Replace the image of ``match`` by a fresh copy of the rule's rhs.

    Every external edge reaching a matched port is redirected through the
    interface (once per target); external partners of wired port pairs are
    joined; anything else touching the image is deleted with it.
    """
    g = host.graph
    nmap = match.node_map
    matched = set(nmap.values())
    adj = g.adjacency

    rmap: dict[int, int] = {}
    if fixed is not None:
        table = dict(fixed)
        for rid in sorted(rule.rhs.nodes):
            rmap[rid] = table[rid]
    else:
        for rid in sorted(rule.rhs.nodes):
            rmap[rid] = ids()

    l_edge_images = set()
    for e in rule.lhs.edges:
        (a, pa), (b, pb) = e.ends()
        l_edge_images.add(Edge.of((nmap[a], pa), (nmap[b], pb)))

    uf = _UnionFind()
    for lid, hid in nmap.items():
        for p in rule.lhs.nodes[lid].port_names():
            ref = (hid, p)
            uf.find(("M", ref))
            other = adj.get(ref)
            if other is None or Edge.of(ref, other) in l_edge_images:
                continue
            uf.union(("M", ref), ("M" if other[0] in matched else "X", other))
    for (lid, p), targets in rule.interface.items():
        for (rid, q) in targets:
            uf.union(("M", (nmap[lid], p)), ("R", (rmap[rid], q)))
    for (la, pa), (lb, pb) in rule.wires:
        uf.union(("M", (nmap[la], pa)), ("M", (nmap[lb], pb)))

    r_occupied = {(rmap[r], p) for r, p in rule.rhs.adjacency}
    new_edges = []
    for group in uf.groups():
        finals = [x[1] for x in group if x[0] != "M"]
        if len(finals) < 2:
            continue
        if len(finals) > 2:
            raise IllFormedRewrite(
                f"rule {rule.name!r}: ports {sorted(finals)} would share one connection")
        if len(finals) == 2:
            for kind, ref in group:
                if kind == "R" and ref in r_occupied:
                    raise IllFormedRewrite(
                        f"rule {rule.name!r}: rhs port {ref} already has an edge")
            new_edges.append(Edge.of(*finals))

    nodes = {k: v for k, v in g.nodes.items() if k not in matched}
    for rid, node in rule.rhs.nodes.items():
        nid = rmap[rid]
        nodes[nid] = make_node(g.signature, nid, node.name,
                               {p.name: p.state for p in node.ports if p.state is not None})
    edges = [e for e in g.edges if e.end1[0] not in matched and e.end2[0] not in matched]
    for e in rule.rhs.edges:
        (a, pa), (b, pb) = e.ends()
        edges.append(Edge.of((rmap[a], pa), (rmap[b], pb)))
    edges.extend(new_edges)
    graph = PortGraph._raw(g.signature, nodes, tuple(sorted(edges)))

    m_image = frozenset(rmap[r] for r in rule.m_nodes)
    pos = (host.position - matched) | m_image
    record = RewriteRecord(
        rule=rule.name,
        match=match,
        created=tuple(sorted(rmap.items())),
        deleted=frozenset(matched),
        m_image=m_image,
        pos_before=host.position,
        pos_after=pos,
    )
    return LocatedGraph(graph, pos), record


@dataclass
class Outcome:
    """Result of one application: ``ok`` is Id, otherwise Fail (graph untouched)."""

    ok: bool
    located: LocatedGraph
    records: list[RewriteRecord] = field(default_factory=list)
    draws: list[tuple[int, int]] = field(default_factory=list)
    note: str = ""


def _pick(rng: random.Random, n: int, draws: list) -> int:
    k = rng.randrange(n)
    draws.append((n, k))
    return k


def rewrite_once(host: LocatedGraph, rule: Rule, rng: random.Random,
                 ids: Callable[[], int]) -> Outcome:
    matches = find_matches(rule.lhs, host, rule.constraints)
    if not matches:
        return Outcome(False, host)
    draws: list = []
    m = matches[_pick(rng, len(matches), draws)] if len(matches) > 1 else matches[0]
    located, rec = apply_match(host, rule, m, ids)
    return Outcome(True, located, [rec], draws)


def _apply_all(host: LocatedGraph, pairs: Sequence[tuple[Rule, Match]],
               ids: Callable[[], int]) -> tuple[LocatedGraph, list[RewriteRecord]]:
    records = []
    cur = host
    for rule, m in pairs:
        cur, rec = apply_match(cur, rule, m, ids)
        records.append(rec)
    # disjoint images commute; report the step as one P transition
    return cur, records


ALL = "all"
AT_LEAST_ONE = "at_least_one"


def apply_parallel(host: LocatedGraph, rules: Sequence[Rule], mode: str,
                   rng: random.Random, ids: Callable[[], int]) -> Outcome:
    """Simultaneous application of several rules on disjoint subgraphs.

    ``mode`` ALL needs every rule to apply; AT_LEAST_ONE falls back to the
    leftmost individually applicable rule when no disjoint tuple exists.
    """
    tuples = find_disjoint_tuples([r.lhs for r in rules], host,
                                  [r.constraints for r in rules])
    draws: list = []
    if tuples:
        combo = tuples[_pick(rng, len(tuples), draws)] if len(tuples) > 1 else tuples[0]
        located, records = _apply_all(host, list(zip(rules, combo)), ids)
        return Outcome(True, located, records, draws)
    if mode == ALL:
        return Outcome(False, host)
    for i, rule in enumerate(rules):
        out = rewrite_once(host, rule, rng, ids)
        if out.ok:
            out.note = f"partial: only operand {i} applied"
            return out
    return Outcome(False, host)


def apply_multi(host: LocatedGraph, rule: Rule, m: int, n: int,
                rng: random.Random, ids: Callable[[], int]) -> Outcome:
    """Apply ``rule`` simultaneously at least ``m`` and at most ``n`` times.

    Matches are packed greedily in a random order; negative ``n`` means no cap.
    """
    m = max(m, 0)
    matches = find_matches(rule.lhs, host, rule.constraints)
    order = list(range(len(matches)))
    rng.shuffle(order)
    chosen: list[Match] = []
    used: set[int] = set()
    for i in order:
        if 0 <= n <= len(chosen):
            break
        img = matches[i].image
        if used & img:
            continue
        chosen.append(matches[i])
        used |= img
    if len(chosen) < m:
        return Outcome(False, host)
    if not chosen:
        return Outcome(True, host)
    chosen.sort(key=Match.key)
    located, records = _apply_all(host, [(rule, c) for c in chosen], ids)
    return Outcome(True, located, records, [(len(matches), len(chosen))])
