"""Interaction nets as a discipline on port graphs.

Agents have one principal port; rules fire on principal-to-principal pairs.
Also here: the principal-port designation used by NextSuc, the interface
normal form strategy, and an isomorphism test used to compare normal forms.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Optional, Sequence

from portrewrite.core import PortGraph, PSignature, free_ports
from portrewrite.rewriting import Rule
from portrewrite.strategy import ast as A


@dataclass(frozen=True)
class AgentDecl:
    symbol: str
    arity: int
    principal: str


@dataclass
class INetRuleSet:
    signature: PSignature
    agents: tuple[AgentDecl, ...]
    rules: tuple[Rule, ...] = ()

    @classmethod
    def from_rule_file(cls, rf) -> INetRuleSet:
        agents = tuple(AgentDecl(a.symbol, a.arity, a.principal) for a in rf.agents)
        return cls(rf.signature, agents, tuple(rf.rules.values()))

    def declared(self) -> dict[str, AgentDecl]:
        return {a.symbol: a for a in self.agents}


def _rhs_free_count(rule: Rule) -> int:
    # each wire stands for a bare connection with two loose ends
    return len(free_ports(rule.rhs)) + 2 * len(rule.wires)


def validate_inet(rs: INetRuleSet) -> list[str]:
    report = []
    decl = rs.declared()
    for a in rs.agents:
        if a.symbol not in rs.signature:
            report.append(f"agent {a.symbol}: not in the signature")
            continue
        ports = rs.signature[a.symbol]
        if len(ports) != a.arity + 1:
            report.append(f"agent {a.symbol}: arity {a.arity} needs {a.arity + 1} ports, "
                          f"signature has {len(ports)}")
        if a.principal not in ports:
            report.append(f"agent {a.symbol}: principal port {a.principal!r} unknown")
    pairs: dict[tuple[str, str], str] = {}
    for rule in rs.rules:
        lhs = rule.lhs
        names = [n.name for n in lhs.nodes.values()]
        undeclared = sorted({n for n in names + [m.name for m in rule.rhs.nodes.values()]
                             if n not in decl})
        if undeclared:
            report.append(f"rule {rule.name}: undeclared agents {undeclared}")
            continue
        active = False
        if len(lhs.nodes) == 2 and len(lhs.edges) == 1:
            (a, pa), (b, pb) = lhs.edges[0].ends()
            active = (a != b and pa == decl[lhs.nodes[a].name].principal
                      and pb == decl[lhs.nodes[b].name].principal)
        if not active:
            report.append(f"rule {rule.name}: not an active pair")
            continue
        lfree = len(free_ports(lhs))
        rfree = _rhs_free_count(rule)
        if lfree != rfree:
            report.append(f"rule {rule.name}: rhs has {rfree} free ports, lhs has {lfree}")
        key = tuple(sorted(names))
        if key in pairs:
            report.append(f"rule {rule.name}: duplicate pair {key} (also {pairs[key]})")
        else:
            pairs[key] = rule.name
    return report


def principal_designation(rs: INetRuleSet) -> dict[str, str]:
    return {a.symbol: a.principal for a in rs.agents}


def inf_strategy(rule_names: Sequence[str]) -> A.Strategy:
    """repeat*(((r1 orelse r2 ...) ; property(interface, graph)) orelse nextsuc)."""
    if not rule_names:
        raise ValueError("interface normal form needs at least one rule")
    rules = A.orelse_chain(*(A.rule(n) for n in rule_names))
    interface = A.Pos(A.Property(A.HasFreePort(), A.WHOLE_GRAPH))
    return A.repeat_star(A.orelse(A.Seq(rules, interface), A.Pos(A.NextSuc())))


# isomorphism up to node ids

def _refine(graphs: Sequence[PortGraph]) -> list[dict[int, int]]:
    """Colour refinement run jointly so colours are comparable across graphs."""
    colors = []
    for g in graphs:
        colors.append({nid: (n.name, tuple((p.name, p.state) for p in n.ports))
                       for nid, n in g.nodes.items()})
    palette: dict = {}

    def compress(cols):
        out = []
        for c in cols:
            out.append({nid: palette.setdefault(v, len(palette)) for nid, v in c.items()})
        return out

    current = compress(colors)
    classes = len(palette)
    while True:
        nxt = []
        for g, col in zip(graphs, current):
            adj = g.adjacency
            sig = {}
            for nid, n in g.nodes.items():
                nb = []
                for p in n.ports:
                    other = adj.get((nid, p.name))
                    nb.append(None if other is None else
                              (other[1], col[other[0]], other[0] == nid))
                sig[nid] = (col[nid], tuple(nb))
            nxt.append(sig)
        palette = {}
        refined = compress(nxt)
        if len(palette) == classes:
            return refined
        classes = len(palette)
        current = refined


def isomorphism(g1: PortGraph, g2: PortGraph) -> Optional[dict[int, int]]:
    """A node bijection preserving names, port states and port-to-port edges."""
    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return None
    c1, c2 = _refine([g1, g2])
    if Counter(c1.values()) != Counter(c2.values()):
        return None
    by_color: dict[int, list[int]] = {}
    for nid in sorted(g2.nodes):
        by_color.setdefault(c2[nid], []).append(nid)
    adj1, adj2 = g1.adjacency, g2.adjacency
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def propagate(u0: int, v0: int) -> Optional[dict[int, int]]:
        local = {u0: v0}
        taken = {v0}
        queue = deque([u0])
        while queue:
            u = queue.popleft()
            v = local[u]
            for p in g1.nodes[u].port_names():
                a = adj1.get((u, p))
                b = adj2.get((v, p))
                if (a is None) != (b is None):
                    return None
                if a is None:
                    continue
                if a[1] != b[1] or c1[a[0]] != c2[b[0]]:
                    return None
                if a[0] in local:
                    if local[a[0]] != b[0]:
                        return None
                    continue
                if b[0] in taken or b[0] in used:
                    return None
                local[a[0]] = b[0]
                taken.add(b[0])
                queue.append(a[0])
        return local

    for u in sorted(g1.nodes, key=lambda n: (len(by_color[c1[n]]), n)):
        if u in mapping:
            continue
        for v in by_color[c1[u]]:
            if v in used:
                continue
            local = propagate(u, v)
            if local is not None:
                mapping.update(local)
                used.update(local.values())
                break
        else:
            return None
    return mapping


def isomorphic(g1: PortGraph, g2: PortGraph) -> bool:
    return isomorphism(g1, g2) is not None
