"""Derivation traces: committed steps, JSON Lines serialization, replay."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional

from portrewrite.core import LocatedGraph, PortGraphError
from portrewrite.matching import Match, is_match
from portrewrite.rewriting import RewriteRecord, Rule, apply_match

RULE = "rule"
PARALLEL = "parallel"
POSITION = "position"
NOTE = "note"
ATOMIC = "atomic"


class ReplayDivergence(PortGraphError):
    def __init__(self, index: int, msg: str):
        self.index = index
        super().__init__(f"step {index}: {msg}")


@dataclass
class Step:
    """One committed trace entry.

    Notes carry control information only (loop iterations, dropped ids,
    tie-breaks) and never change the graph. ``after`` holds the located graph
    right after the step and is not serialized.
    """

    kind: str
    records: tuple[RewriteRecord, ...] = ()
    draws: tuple[tuple[int, int], ...] = ()
    pos_before: frozenset = frozenset()
    pos_after: frozenset = frozenset()
    note: str = ""
    depth: int = 0
    children: tuple["Step", ...] = ()
    after: Optional[LocatedGraph] = field(default=None, compare=False, repr=False)

    @property
    def rules(self) -> list[str]:
        if self.kind == ATOMIC:
            return [r for c in self.children for r in c.rules]
        return [r.rule for r in self.records]

    def all_records(self) -> Iterator[RewriteRecord]:
        if self.kind == ATOMIC:
            for c in self.children:
                yield from c.all_records()
        else:
            yield from self.records


@dataclass
class Trace:
    items: list[Step] = field(default_factory=list)

    @property
    def steps(self) -> list[Step]:
        """Graph-level steps, notes excluded."""
        return [s for s in self.items if s.kind != NOTE]

    def records(self) -> Iterator[RewriteRecord]:
        for s in self.items:
            yield from s.all_records()

    def __len__(self) -> int:
        return len(self.items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Trace) and self.items == other.items

    def to_jsonl(self) -> str:
        return "".join(json.dumps(step_to_dict(s, i)) + "\n" for i, s in enumerate(self.items))

    @classmethod
    def from_jsonl(cls, text: str) -> Trace:
        return cls([step_from_dict(json.loads(line)) for line in text.splitlines() if line.strip()])


def _ids(xs: Iterable[int]) -> list[int]:
    return sorted(xs)


def record_to_dict(r: RewriteRecord) -> dict:
    return {
        "rule": r.rule,
        "match": [list(p) for p in r.match.pairs],
        "created": [list(p) for p in r.created],
        "m_image": _ids(r.m_image),
        "pos_before": _ids(r.pos_before),
        "pos_after": _ids(r.pos_after),
    }


def record_from_dict(d: dict) -> RewriteRecord:
    match = Match(tuple((int(a), int(b)) for a, b in d["match"]))
    return RewriteRecord(
        rule=d["rule"],
        match=match,
        created=tuple((int(a), int(b)) for a, b in d["created"]),
        deleted=match.image,
        m_image=frozenset(d["m_image"]),
        pos_before=frozenset(d["pos_before"]),
        pos_after=frozenset(d["pos_after"]),
    )


def step_to_dict(s: Step, index: Optional[int] = None) -> dict:
    out: dict = {}
    if index is not None:
        out["index"] = index
    out["kind"] = s.kind
    if s.kind == NOTE:
        out["note"] = s.note
        out["depth"] = s.depth
        return out
    out["rules"] = s.rules
    out["records"] = [record_to_dict(r) for r in s.records]
    out["draws"] = [list(d) for d in s.draws]
    out["pos_before"] = _ids(s.pos_before)
    out["pos_after"] = _ids(s.pos_after)
    if s.note:
        out["note"] = s.note
    if s.kind == ATOMIC:
        out["children"] = [step_to_dict(c) for c in s.children]
    return out


def step_from_dict(d: dict) -> Step:
    if d["kind"] == NOTE:
        return Step(NOTE, note=d.get("note", ""), depth=d.get("depth", 0))
    return Step(
        kind=d["kind"],
        records=tuple(record_from_dict(r) for r in d.get("records", ())),
        draws=tuple(tuple(x) for x in d.get("draws", ())),
        pos_before=frozenset(d.get("pos_before", ())),
        pos_after=frozenset(d.get("pos_after", ())),
        note=d.get("note", ""),
        children=tuple(step_from_dict(c) for c in d.get("children", ())),
    )


def _replay_step(step: Step, cur: LocatedGraph, rules: Mapping[str, Rule],
                 index: int) -> LocatedGraph:
    if step.kind == NOTE:
        return cur
    if step.kind == ATOMIC:
        for child in step.children:
            cur = _replay_step(child, cur, rules, index)
        return cur
    if cur.position != step.pos_before:
        raise ReplayDivergence(index, f"position {sorted(cur.position)} differs from "
                                      f"recorded {sorted(step.pos_before)}")
    if step.kind == POSITION:
        if not step.pos_after <= cur.graph.node_ids():
            raise ReplayDivergence(index, "recorded position names missing nodes")
        return cur.with_position(step.pos_after)
    for rec in step.records:
        rule = rules.get(rec.rule)
        if rule is None:
            raise ReplayDivergence(index, f"unknown rule {rec.rule!r}")
        if rec.pos_before != cur.position:
            raise ReplayDivergence(index, f"rule {rec.rule!r} saw a different position")
        if not is_match(rule.lhs, cur.graph, rec.match.node_map, rule.constraints):
            raise ReplayDivergence(index, f"recorded match of {rec.rule!r} no longer matches")
        if not rec.match.image & cur.position:
            raise ReplayDivergence(index, f"recorded match of {rec.rule!r} misses the position")
        if any(h in cur.graph.nodes for _, h in rec.created):
            raise ReplayDivergence(index, "recorded fresh id already in use")
        cur, _ = apply_match(cur, rule, rec.match, ids=None, fixed=rec.created)
        if cur.position != rec.pos_after:
            raise ReplayDivergence(index, f"rule {rec.rule!r} produced a different position")
    return cur


def replay_states(trace: Trace, initial: LocatedGraph,
                  rules: Mapping[str, Rule]) -> Iterator[LocatedGraph]:
    """The located graph after each trace item, recomputed from the records."""
    cur = initial
    for i, step in enumerate(trace.items):
        cur = _replay_step(step, cur, rules, i)
        yield cur


def replay(trace: Trace, initial: LocatedGraph, rules: Mapping[str, Rule]) -> LocatedGraph:
    """Re-apply every recorded step to ``initial`` with the recorded choices."""
    cur = initial
    for cur in replay_states(trace, initial, rules):
        pass
    return cur
