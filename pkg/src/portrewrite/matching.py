"""Injective port-graph morphisms from a left-hand side into a located host."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from portrewrite.core import NO_STATE, LocatedGraph, PortGraph, PortRef


class PortConstraint(enum.Enum):
    ANY = "any"
    MUST_BE_CONNECTED = "connected"
    MUST_BE_FREE = "free"


Constraints = Mapping[PortRef, PortConstraint]


@dataclass(frozen=True)
class Match:
    """A node map from pattern ids to host ids, stored in canonical pattern order.

    The port map is implicit: each pattern port maps to the equally named port
    of the image node.
    """

    pairs: tuple[tuple[int, int], ...]

    @property
    def node_map(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def image(self) -> frozenset:
        return frozenset(h for _, h in self.pairs)

    def key(self) -> tuple[int, ...]:
        return tuple(h for _, h in self.pairs)

    def __getitem__(self, lid: int) -> int:
        for l, h in self.pairs:
            if l == lid:
                return h
        raise KeyError(lid)


def canonical_order(lhs: PortGraph) -> list[int]:
    return sorted(lhs.nodes, key=lambda i: (lhs.nodes[i].name, i))


def state_ok(pattern_state: Optional[str], host_state: Optional[str]) -> bool:
    if pattern_state is None:
        return True
    if pattern_state == NO_STATE:
        return host_state is None
    return pattern_state == host_state


class _Search:
    def __init__(self, lhs: PortGraph, host: PortGraph, constraints: Optional[Constraints]):
        self.lhs = lhs
        self.host = host
        self.constraints = {k: v for k, v in (constraints or {}).items()
                            if v is not PortConstraint.ANY}
        self.order = canonical_order(lhs)
        self.ladj = lhs.adjacency
        self.hadj = host.adjacency

    def node_ok(self, lid: int, hid: int) -> bool:
        ln = self.lhs.nodes[lid]
        hn = self.host.nodes[hid]
        if ln.name != hn.name:
            return False
        hadj = self.hadj
        for lp, hp in zip(ln.ports, hn.ports):
            # both port tuples are sorted by name and fixed by the signature
            if not state_ok(lp.state, hp.state):
                return False
            c = self.constraints.get((lid, lp.name))
            if c is PortConstraint.MUST_BE_FREE and (hid, hp.name) in hadj:
                return False
            if c is PortConstraint.MUST_BE_CONNECTED and (hid, hp.name) not in hadj:
                return False
        return True

    def edges_ok(self, lid: int, mapping: dict[int, int]) -> bool:
        hid = mapping[lid]
        for p in self.lhs.nodes[lid].port_names():
            other = self.ladj.get((lid, p))
            if other is None or other[0] not in mapping:
                continue
            if self.hadj.get((hid, p)) != (mapping[other[0]], other[1]):
                return False
        return True

    def plan(self, anchor: int) -> list[int]:
        """Search order: BFS from the anchor along pattern edges, then the rest."""
        seen = [anchor]
        marked = {anchor}
        i = 0
        while True:
            while i < len(seen):
                lid = seen[i]
                i += 1
                for p in sorted(self.lhs.nodes[lid].port_names()):
                    other = self.ladj.get((lid, p))
                    if other is not None and other[0] not in marked:
                        marked.add(other[0])
                        seen.append(other[0])
            rest = [l for l in self.order if l not in marked]
            if not rest:
                return seen
            marked.add(rest[0])
            seen.append(rest[0])

    def candidates(self, lid: int, mapping: dict[int, int]) -> Iterable[int]:
        for p in sorted(self.lhs.nodes[lid].port_names()):
            other = self.ladj.get((lid, p))
            if other is not None and other[0] in mapping:
                ref = self.hadj.get((mapping[other[0]], other[1]))
                return () if ref is None else (ref[0],)
        return self.host.by_name(self.lhs.nodes[lid].name)

    def run(self, anchor: int, anchor_image: int, limit: Optional[int] = None) -> list[dict]:
        out: list[dict] = []
        if not self.node_ok(anchor, anchor_image):
            return out
        mapping = {anchor: anchor_image}
        if not self.edges_ok(anchor, mapping):
            return out
        plan = self.plan(anchor)
        used = {anchor_image}

        def extend(k: int) -> bool:
            if k == len(plan):
                out.append(dict(mapping))
                return limit is not None and len(out) >= limit
            lid = plan[k]
            for hid in self.candidates(lid, mapping):
                if hid in used or not self.node_ok(lid, hid):
                    continue
                mapping[lid] = hid
                if self.edges_ok(lid, mapping):
                    used.add(hid)
                    stop = extend(k + 1)
                    used.discard(hid)
                    if stop:
                        del mapping[lid]
                        return True
                del mapping[lid]
            return False

        extend(1)
        return out


def _to_match(order: Sequence[int], mapping: dict[int, int]) -> Match:
    return Match(tuple((l, mapping[l]) for l in order))


def find_matches(lhs: PortGraph, host: LocatedGraph,
                 constraints: Optional[Constraints] = None) -> list[Match]:
    """All injective matches of ``lhs`` whose image meets the host position.

    Returned sorted by the host ids assigned to the canonically ordered
    pattern nodes (name, then id).
    """
    if not lhs.nodes:
        return []
    search = _Search(lhs, host.graph, constraints)
    found: dict[tuple, Match] = {}
    for lid in search.order:
        name = lhs.nodes[lid].name
        for hid in host.graph.by_name(name):
            if hid not in host.position:
                continue
            for m in search.run(lid, hid):
                match = _to_match(search.order, m)
                found[match.key()] = match
    return [found[k] for k in sorted(found)]


def match_exists(lhs: PortGraph, host: LocatedGraph,
                 constraints: Optional[Constraints] = None) -> bool:
    if not lhs.nodes:
        return False
    search = _Search(lhs, host.graph, constraints)
    for lid in search.order:
        for hid in host.graph.by_name(lhs.nodes[lid].name):
            if hid in host.position and search.run(lid, hid, limit=1):
                return True
    return False


def is_match(lhs: PortGraph, host: PortGraph, mapping: Mapping[int, int],
             constraints: Optional[Constraints] = None) -> bool:
    """Check a proposed node map against every match condition (position aside)."""
    if set(mapping) != set(lhs.nodes) or len(set(mapping.values())) != len(mapping):
        return False
    if any(h not in host.nodes for h in mapping.values()):
        return False
    search = _Search(lhs, host, constraints)
    m = dict(mapping)
    return all(search.node_ok(l, h) for l, h in m.items()) and all(
        search.edges_ok(l, m) for l in m)


def find_disjoint_tuples(lhss: Sequence[PortGraph], host: LocatedGraph,
                         constraints: Optional[Sequence[Optional[Constraints]]] = None
                         ) -> list[tuple[Match, ...]]:
    """Tuples with one match per pattern, images pairwise node-disjoint."""
    constraints = constraints or [None] * len(lhss)
    per = [find_matches(l, host, c) for l, c in zip(lhss, constraints)]
    out = []
    for combo in itertools.product(*per):
        seen: set[int] = set()
        ok = True
        for m in combo:
            img = m.image
            if seen & img:
                ok = False
                break
            seen |= img
        if ok:
            out.append(tuple(combo))
    return out
