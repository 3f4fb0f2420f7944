"""Graphviz DOT snapshots of a derivation, one file per committed step."""
from __future__ import annotations

from pathlib import Path
from typing import Mapping, Optional

from portrewrite.core import LocatedGraph
from portrewrite.rewriting import Rule
from portrewrite.strategy.trace import NOTE, Trace, replay_states


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _quote(s: str) -> str:
    return '"' + _escape(s) + '"'


def to_dot(lg: LocatedGraph, title: str = "G") -> str:
    """Node name as label, port names on edge ends, position nodes filled."""
    g = lg.graph
    out = [f"graph {_quote(title)} {{", "  node [shape=box];"]
    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        lines = [node.name]
        states = [f"{p.name}={p.state}" for p in node.ports if p.state is not None]
        if states:
            lines.append(" ".join(states))
        # \n is the DOT line break, so it is added after escaping
        attrs = ['label="' + "\\n".join(_escape(x) for x in lines) + '"']
        if nid in lg.position:
            attrs.append('style=filled fillcolor="#ffd966" penwidth=2')
        out.append(f"  n{nid} [{' '.join(attrs)}];")
    for e in g.edges:
        (a, pa), (b, pb) = e.ends()
        out.append(f"  n{a} -- n{b} [taillabel={_quote(pa)} headlabel={_quote(pb)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def export_snapshots(trace: Trace, initial: LocatedGraph, outdir: str | Path,
                     rules: Optional[Mapping[str, Rule]] = None) -> list[Path]:
    """Write the initial graph and the graph after every non-note step.

    An atomic group is one step and so one file. Steps read back from JSON
    carry no snapshot; for those ``rules`` is needed to replay the trace.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    items = trace.items
    if any(s.after is None for s in items if s.kind != NOTE):
        if rules is None:
            raise ValueError("trace has no snapshots; pass the rules to replay it")
        afters = list(replay_states(trace, initial, rules))
    else:
        afters = [s.after for s in items]
    states = [initial] + [a for s, a in zip(items, afters) if s.kind != NOTE]
    paths = []
    for i, lg in enumerate(states):
        p = outdir / f"step_{i:04d}.dot"
        p.write_text(to_dot(lg, f"step {i}"))
        paths.append(p)
    return paths
