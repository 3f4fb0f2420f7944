"""Port graphs: signatures, nodes with named stateful ports, positions."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional

PortRef = tuple[int, str]

# Port state token a pattern uses to demand "no state at all".
NO_STATE = "_none"


class PortGraphError(Exception):
    """Base class for errors raised by this package."""


class SignatureError(PortGraphError):
    pass


class DesignationError(PortGraphError):
    """A node name has no designated port for NextSuc."""


class PSignature(Mapping[str, frozenset]):
    """Assignment of a fixed, nonempty port-name set to each node name."""

    def __init__(self, entries: Mapping[str, Iterable[str]]):
        self._entries = {name: frozenset(ports) for name, ports in entries.items()}
        owner: dict[str, str] = {}
        for name, ports in self._entries.items():
            if not ports:
                raise SignatureError(f"node name {name!r} has no ports")
            for p in ports:
                if p in owner:
                    raise SignatureError(
                        f"port {p!r} shared by node names {owner[p]!r} and {name!r}")
                owner[p] = name
        self._owner = owner

    def __getitem__(self, name: str) -> frozenset:
        return self._entries[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        if isinstance(other, PSignature):
            return self._entries == other._entries
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._entries.items()))

    def __repr__(self) -> str:
        return f"PSignature({self._entries!r})"

    def owner(self, port: str) -> Optional[str]:
        return self._owner.get(port)

    def merge(self, other: Mapping[str, Iterable[str]]) -> PSignature:
        entries = dict(self._entries)
        for name, ports in other.items():
            ports = frozenset(ports)
            if name in entries and entries[name] != ports:
                raise SignatureError(f"conflicting port sets for {name!r}")
            entries[name] = ports
        return PSignature(entries)


@dataclass(frozen=True)
class Port:
    name: str
    state: Optional[str] = None


@dataclass(frozen=True)
class Node:
    id: int
    name: str
    ports: tuple[Port, ...]

    def state(self, port: str) -> Optional[str]:
        for p in self.ports:
            if p.name == port:
                return p.state
        raise KeyError(port)

    def port_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.ports)


def make_node(sig: PSignature, node_id: int, name: str,
              states: Optional[Mapping[str, Optional[str]]] = None) -> Node:
    states = states or {}
    ports = tuple(Port(p, states.get(p)) for p in sorted(sig[name]))
    return Node(node_id, name, ports)


@dataclass(frozen=True, order=True)
class Edge:
    end1: PortRef
    end2: PortRef

    @staticmethod
    def of(a: PortRef, b: PortRef) -> Edge:
        return Edge(a, b) if a <= b else Edge(b, a)

    def ends(self) -> tuple[PortRef, PortRef]:
        return self.end1, self.end2


class PortGraph:
    """Immutable port graph snapshot.

    Edges are kept as a list (so invalid multi-attachments can still be
    represented and reported by validate); the port adjacency used by
    queries and matching is derived lazily.
    """

    __slots__ = ("signature", "_nodes", "_edges", "_adj", "_by_name")

    def __init__(self, signature: PSignature, nodes: Iterable[Node] = (),
                 edges: Iterable[Edge] = ()):
        self.signature = signature
        self._nodes = {n.id: n for n in nodes}
        self._edges = tuple(sorted(Edge.of(*e.ends()) for e in edges))
        self._adj = None
        self._by_name = None

    @classmethod
    def _raw(cls, signature, nodes: dict, edges: tuple, adj: Optional[dict] = None):
        g = cls.__new__(cls)
        g.signature = signature
        g._nodes = nodes
        g._edges = edges
        g._adj = adj
        g._by_name = None
        return g

    @property
    def nodes(self) -> Mapping[int, Node]:
        return self._nodes

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def node_ids(self) -> frozenset:
        return frozenset(self._nodes)

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id) -> bool:
        return node_id in self._nodes

    def __eq__(self, other) -> bool:
        if not isinstance(other, PortGraph):
            return NotImplemented
        if self is other:
            return True
        return (self._nodes == other._nodes and self._edges == other._edges
                and self.signature == other.signature)

    __hash__ = None

    def __repr__(self) -> str:
        return f"<PortGraph {len(self._nodes)} nodes, {len(self._edges)} edges>"

    @property
    def adjacency(self) -> dict[PortRef, PortRef]:
        if self._adj is None:
            adj = {}
            for e in self._edges:
                adj[e.end1] = e.end2
                adj[e.end2] = e.end1
            self._adj = adj
        return self._adj

    def partner(self, ref: PortRef) -> Optional[PortRef]:
        return self.adjacency.get(ref)

    def by_name(self, name: str) -> list[int]:
        if self._by_name is None:
            idx: dict[str, list[int]] = {}
            for nid in sorted(self._nodes):
                idx.setdefault(self._nodes[nid].name, []).append(nid)
            self._by_name = idx
        return self._by_name.get(name, [])

    def all_ports(self) -> set[PortRef]:
        return {(n.id, p.name) for n in self._nodes.values() for p in n.ports}

    def max_id(self) -> int:
        return max(self._nodes, default=-1)

    # snapshot-producing edits, used by builders and tests

    def with_nodes(self, nodes: Iterable[Node]) -> PortGraph:
        new = dict(self._nodes)
        for n in nodes:
            new[n.id] = n
        return PortGraph._raw(self.signature, new, self._edges, self._adj)

    def with_edges(self, edges: Iterable[Edge]) -> PortGraph:
        return PortGraph(self.signature, self._nodes.values(), self._edges + tuple(edges))

    def without_nodes(self, ids: Iterable[int]) -> PortGraph:
        ids = set(ids)
        nodes = {k: v for k, v in self._nodes.items() if k not in ids}
        edges = tuple(e for e in self._edges
                      if e.end1[0] not in ids and e.end2[0] not in ids)
        return PortGraph._raw(self.signature, nodes, edges)


class GraphBuilder:
    """Mutable helper for assembling a PortGraph by hand."""

    def __init__(self, signature: PSignature | Mapping[str, Iterable[str]], start: int = 0):
        if not isinstance(signature, PSignature):
            signature = PSignature(signature)
        self.signature = signature
        self.nodes: dict[int, Node] = {}
        self.edges: list[Edge] = []
        self._next = start

    def add(self, name: str, node_id: Optional[int] = None,
            states: Optional[Mapping[str, str]] = None) -> int:
        if node_id is None:
            node_id = self._next
        self._next = max(self._next, node_id + 1)
        self.nodes[node_id] = make_node(self.signature, node_id, name, states)
        return node_id

    def link(self, a: int, pa: str, b: int, pb: str) -> None:
        self.edges.append(Edge.of((a, pa), (b, pb)))

    def build(self) -> PortGraph:
        return PortGraph(self.signature, self.nodes.values(), self.edges)


Position = frozenset


@dataclass(frozen=True)
class LocatedGraph:
    graph: PortGraph
    position: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.position, frozenset):
            object.__setattr__(self, "position", frozenset(self.position))

    def with_position(self, pos: Iterable[int]) -> LocatedGraph:
        return LocatedGraph(self.graph, frozenset(pos))

    def position_valid(self) -> bool:
        return self.position <= self.graph.node_ids()

    def same_as(self, other: LocatedGraph) -> bool:
        return self.position == other.position and (
            self.graph is other.graph or self.graph == other.graph)


def validate(graph: PortGraph) -> list[str]:
    """Return one message per violated port-graph invariant (empty if valid)."""
    report = []
    sig = graph.signature
    for nid in sorted(graph.nodes):
        node = graph.nodes[nid]
        if node.id != nid:
            report.append(f"node {nid}: id mismatch ({node.id})")
        if node.name not in sig:
            report.append(f"node {nid}: unknown node name {node.name!r}")
            continue
        names = [p.name for p in node.ports]
        if len(names) != len(set(names)) or set(names) != sig[node.name]:
            report.append(f"node {nid}: ports {sorted(names)} do not match "
                          f"signature {sorted(sig[node.name])}")
    uses: Counter = Counter()
    for e in graph.edges:
        for nid, port in e.ends():
            node = graph.nodes.get(nid)
            if node is None:
                report.append(f"edge {e.end1}--{e.end2}: unknown node {nid}")
            elif port not in node.port_names():
                report.append(f"edge {e.end1}--{e.end2}: unknown port {port!r} on node {nid}")
        if e.end1 == e.end2:
            report.append(f"edge {e.end1}--{e.end2}: port connected to itself")
            uses[e.end1] += 1
        else:
            uses[e.end1] += 1
            uses[e.end2] += 1
    for ref, n in sorted(uses.items()):
        if n > 1:
            report.append(f"port {ref[0]}.{ref[1]}: port used twice ({n} edges)")
    return report


def free_ports(graph: PortGraph) -> set[PortRef]:
    adj = graph.adjacency
    return {ref for ref in graph.all_ports() if ref not in adj}


def interface_nodes(graph: PortGraph) -> frozenset:
    adj = graph.adjacency
    return frozenset(n.id for n in graph.nodes.values()
                     if any((n.id, p.name) not in adj for p in n.ports))


def successors(graph: PortGraph, pos: Iterable[int]) -> frozenset:
    adj = graph.adjacency
    out = set()
    for nid in pos:
        node = graph.nodes.get(nid)
        if node is None:
            continue
        for p in node.ports:
            other = adj.get((nid, p.name))
            if other is not None:
                out.add(other[0])
    return frozenset(out)


def designated_successors(graph: PortGraph, pos: Iterable[int],
                          designation: Mapping[str, str]) -> frozenset:
    adj = graph.adjacency
    out = set()
    for nid in pos:
        node = graph.nodes.get(nid)
        if node is None:
            continue
        port = designation.get(node.name)
        if port is None:
            raise DesignationError(f"no designated port for node name {node.name!r}")
        other = adj.get((nid, port))
        if other is not None:
            out.add(other[0])
    return frozenset(out)
