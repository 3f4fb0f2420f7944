"""Line-oriented text formats for graphs and rule files.

Graph file::

    SIGNATURE
    S : s_p, s_a
    NODES
    1 : S s_p=tok
    EDGES
    1.s_a -- 2.s_p
    POSITION
    1, 2

Rule file: optional SIGNATURE and AGENTS sections, then ``RULE <name>``
blocks with LHS / RHS (NODES and EDGES) / INTERFACE / M. In LHS node lines a
port may be suffixed ``!`` (must be connected) or ``?`` (must be free).
Interface lines are ``a.p -> b.q, c.r``, ``a.p -> BLACKHOLE`` or the wire
form ``a.p <-> b.q`` joining the external partners of two L ports.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from portrewrite.core import (
    Edge,
    LocatedGraph,
    PortGraph,
    PortGraphError,
    PSignature,
    make_node,
)
from portrewrite.matching import PortConstraint
from portrewrite.rewriting import Rule


class FormatError(PortGraphError):
    def __init__(self, msg: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


_PORTREF = re.compile(r"^(-?\d+)\.([^\s,]+)$")
_SECTIONS = {"SIGNATURE", "NODES", "EDGES", "POSITION", "AGENTS", "LHS", "RHS",
             "INTERFACE", "M"}


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def _portref(tok: str, lineno: int) -> tuple[int, str]:
    m = _PORTREF.match(tok.strip())
    if not m:
        raise FormatError(f"bad port reference {tok!r}", lineno)
    return int(m.group(1)), m.group(2)


def _ids(body: str, lineno: int) -> list[int]:
    try:
        return [int(t) for t in re.split(r"[,\s]+", body.strip()) if t]
    except ValueError:
        raise FormatError(f"bad id list {body!r}", lineno) from None


def _parse_signature_line(line: str, lineno: int, entries: dict) -> None:
    if ":" not in line:
        raise FormatError("signature line needs ':'", lineno)
    name, ports = line.split(":", 1)
    plist = [p.strip() for p in ports.split(",") if p.strip()]
    entries[name.strip()] = plist


def _parse_node_line(line: str, lineno: int, sig: PSignature, constraints=None):
    if ":" not in line:
        raise FormatError("node line needs ':'", lineno)
    head, rest = line.split(":", 1)
    try:
        nid = int(head.strip())
    except ValueError:
        raise FormatError(f"bad node id {head.strip()!r}", lineno) from None
    toks = rest.split()
    if not toks:
        raise FormatError("node line needs a name", lineno)
    name = toks[0]
    if name not in sig:
        raise FormatError(f"unknown node name {name!r}", lineno)
    states = {}
    for tok in toks[1:]:
        port, _, state = tok.partition("=")
        kind = PortConstraint.ANY
        if port.endswith("!"):
            kind, port = PortConstraint.MUST_BE_CONNECTED, port[:-1]
        elif port.endswith("?"):
            kind, port = PortConstraint.MUST_BE_FREE, port[:-1]
        if port not in sig[name]:
            raise FormatError(f"unknown port {port!r} for {name!r}", lineno)
        if kind is not PortConstraint.ANY:
            if constraints is None:
                raise FormatError("port constraints only allowed in LHS", lineno)
            constraints[(nid, port)] = kind
        if state:
            states[port] = state
    return make_node(sig, nid, name, states)


def _parse_edge_line(line: str, lineno: int) -> Edge:
    parts = line.split("--")
    if len(parts) != 2:
        raise FormatError("edge line needs exactly one '--'", lineno)
    return Edge.of(_portref(parts[0], lineno), _portref(parts[1], lineno))


def parse_graph(text: str, signature: Optional[PSignature] = None) -> LocatedGraph:
    entries: dict = {}
    nodes, edges, position = [], [], []
    section = None
    sig = None

    def resolve():
        if signature is None:
            return PSignature(entries)
        return signature.merge(entries) if entries else signature

    for lineno, line in _lines(text):
        if line in _SECTIONS:
            section = line
            if section != "SIGNATURE" and sig is None:
                sig = resolve()
            continue
        if section == "SIGNATURE":
            if sig is not None:
                raise FormatError("SIGNATURE must come first", lineno)
            _parse_signature_line(line, lineno, entries)
        elif section == "NODES":
            nodes.append(_parse_node_line(line, lineno, sig))
        elif section == "EDGES":
            edges.append(_parse_edge_line(line, lineno))
        elif section == "POSITION":
            position.extend(_ids(line, lineno))
        else:
            raise FormatError(f"unexpected line outside a section: {line!r}", lineno)
    if sig is None:
        sig = resolve()
    ids = [n.id for n in nodes]
    if len(ids) != len(set(ids)):
        raise FormatError("duplicate node id")
    return LocatedGraph(PortGraph(sig, nodes, edges), frozenset(position))


def format_graph(lg: LocatedGraph | PortGraph) -> str:
    if isinstance(lg, PortGraph):
        lg = LocatedGraph(lg)
    g = lg.graph
    out = ["SIGNATURE"]
    for name in sorted(g.signature):
        out.append(f"{name} : {', '.join(sorted(g.signature[name]))}")
    out.append("NODES")
    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        states = " ".join(f"{p.name}={p.state}" for p in node.ports if p.state is not None)
        out.append(f"{nid} : {node.name}" + (f" {states}" if states else ""))
    out.append("EDGES")
    for e in g.edges:
        out.append(f"{e.end1[0]}.{e.end1[1]} -- {e.end2[0]}.{e.end2[1]}")
    if lg.position:
        out.append("POSITION")
        out.append(", ".join(str(i) for i in sorted(lg.position)))
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class AgentSpec:
    symbol: str
    arity: int
    principal: str


@dataclass
class RuleFile:
    signature: PSignature
    rules: dict[str, Rule] = field(default_factory=dict)
    agents: list[AgentSpec] = field(default_factory=list)


def _parse_agents(tokens: list[tuple[int, str]]) -> list[AgentSpec]:
    out = []
    i = 0
    while i < len(tokens):
        if i + 5 > len(tokens):
            raise FormatError("incomplete agent declaration", tokens[i][0])
        (ln, sym), (_, kw1), (_, n), (_, kw2), (_, port) = tokens[i:i + 5]
        if kw1 != "arity" or kw2 != "principal":
            raise FormatError("agent declaration is '<symbol> arity <n> principal <port>'", ln)
        try:
            arity = int(n)
        except ValueError:
            raise FormatError(f"bad arity {n!r}", ln) from None
        out.append(AgentSpec(sym, arity, port))
        i += 5
    return out


def parse_rules(text: str, signature: Optional[PSignature] = None) -> RuleFile:
    entries: dict = {}
    agent_tokens: list = []
    blocks: list[tuple[str, int, list]] = []
    section = None
    for lineno, line in _lines(text):
        if line.startswith("RULE ") or line == "RULE":
            name = line[4:].strip()
            if not name:
                raise FormatError("RULE needs a name", lineno)
            blocks.append((name, lineno, []))
            section = "RULE"
            continue
        if section == "RULE":
            blocks[-1][2].append((lineno, line))
            continue
        if line in ("SIGNATURE", "AGENTS"):
            section = line
        elif section == "SIGNATURE":
            _parse_signature_line(line, lineno, entries)
        elif section == "AGENTS":
            agent_tokens.extend((lineno, t) for t in line.split())
        else:
            raise FormatError(f"unexpected line {line!r}", lineno)
    if signature is None:
        sig = PSignature(entries)
    else:
        sig = signature.merge(entries) if entries else signature
    rf = RuleFile(sig, agents=_parse_agents(agent_tokens))
    for name, lineno, body in blocks:
        if name in rf.rules:
            raise FormatError(f"duplicate rule {name!r}", lineno)
        rf.rules[name] = _parse_rule(name, body, sig)
    return rf


def _parse_rule(name: str, body: list, sig: PSignature) -> Rule:
    side = None
    sub = None
    parts = {"LHS": ([], []), "RHS": ([], [])}
    constraints: dict = {}
    interface: dict = {}
    wires = []
    m_nodes: list[int] = []
    for lineno, line in body:
        if line in ("LHS", "RHS", "INTERFACE", "M"):
            side, sub = line, None
            continue
        if line in ("NODES", "EDGES"):
            if side not in ("LHS", "RHS"):
                raise FormatError(f"{line} outside LHS/RHS", lineno)
            sub = line
            continue
        if side in ("LHS", "RHS"):
            if sub == "NODES":
                parts[side][0].append(_parse_node_line(
                    line, lineno, sig, constraints if side == "LHS" else None))
            elif sub == "EDGES":
                parts[side][1].append(_parse_edge_line(line, lineno))
            else:
                raise FormatError("expected NODES or EDGES", lineno)
        elif side == "INTERFACE":
            if "<->" in line:
                a, b = line.split("<->")
                wires.append((_portref(a, lineno), _portref(b, lineno)))
                continue
            if "->" not in line:
                raise FormatError("interface line needs '->' or '<->'", lineno)
            a, b = line.split("->", 1)
            key = _portref(a, lineno)
            b = b.strip()
            targets = frozenset() if b == "BLACKHOLE" else frozenset(
                _portref(t, lineno) for t in b.split(",") if t.strip())
            interface[key] = targets
        elif side == "M":
            m_nodes.extend(_ids(line, lineno))
        else:
            raise FormatError(f"unexpected line in rule {name!r}: {line!r}", lineno)
    lhs = PortGraph(sig, *parts["LHS"])
    rhs = PortGraph(sig, *parts["RHS"])
    return Rule(name, lhs, rhs, interface, tuple(wires), frozenset(m_nodes), constraints)


def format_rule(rule: Rule) -> str:
    def nodes(g: PortGraph, cons=None):
        for nid in sorted(g.nodes):
            n = g.nodes[nid]
            toks = []
            for p in n.ports:
                c = (cons or {}).get((nid, p.name), PortConstraint.ANY)
                mark = {PortConstraint.MUST_BE_CONNECTED: "!",
                        PortConstraint.MUST_BE_FREE: "?"}.get(c, "")
                if mark or p.state is not None:
                    toks.append(p.name + mark + (f"={p.state}" if p.state is not None else ""))
            yield f"{nid} : {n.name}" + ("".join(" " + t for t in toks))

    def edges(g: PortGraph):
        for e in g.edges:
            yield f"{e.end1[0]}.{e.end1[1]} -- {e.end2[0]}.{e.end2[1]}"

    out = [f"RULE {rule.name}", "LHS", "NODES", *nodes(rule.lhs, rule.constraints),
           "EDGES", *edges(rule.lhs), "RHS", "NODES", *nodes(rule.rhs), "EDGES",
           *edges(rule.rhs), "INTERFACE"]
    for (lid, p), targets in sorted(rule.interface.items()):
        rhs = ", ".join(f"{r}.{q}" for r, q in sorted(targets)) if targets else "BLACKHOLE"
        out.append(f"{lid}.{p} -> {rhs}")
    for (a, pa), (b, pb) in rule.wires:
        out.append(f"{a}.{pa} <-> {b}.{pb}")
    if rule.m_nodes:
        out.append("M")
        out.append(", ".join(str(i) for i in sorted(rule.m_nodes)))
    return "\n".join(out) + "\n"


def format_rules(rules: Iterable[Rule], signature: PSignature,
                 agents: Iterable[AgentSpec] = ()) -> str:
    out = ["SIGNATURE"]
    for name in sorted(signature):
        out.append(f"{name} : {', '.join(sorted(signature[name]))}")
    agents = list(agents)
    if agents:
        out.append("AGENTS")
        out.extend(f"{a.symbol} arity {a.arity} principal {a.principal}" for a in agents)
    text = "\n".join(out) + "\n"
    return text + "".join(format_rule(r) for r in rules)
