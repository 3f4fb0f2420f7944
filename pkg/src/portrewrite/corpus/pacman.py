"""A one-row pac-man board driven by the pac-man and ghost strategies.

Every cell is a node whose name says what occupies it. Moving is relabelling
neighbouring cells. Rule names ending in 1 act towards the east, in 2
towards the west. All rules have an empty M, so whoever acts leaves the
position until the next game loop puts it back.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Optional

from portrewrite.core import GraphBuilder, LocatedGraph, PSignature
from portrewrite.corpus.common import RuleBuilder, expand_macros
from portrewrite.rewriting import Rule
from portrewrite.strategy import EngineConfig, RunResult, eval_strategy, parse_strategy
from portrewrite.strategy import trace as T

PREFIX = {"Empty": "em", "PacDot": "pd", "ghost": "gh", "pac-man": "pm", "End": "en"}
SIGNATURE = PSignature({name: [f"{p}_{d}" for d in "nesw"] for name, p in PREFIX.items()})

MACROS = {
    "gameLoop": "repeat*(property(Y, graph); if(isGameOver)then(fail)"
                "else(pacAI; repeat*(ghostAI)))",
    "Y": 'name=="ghost" or name=="pac-man" or name=="End"',
    "isGameOver": 'property(name=="End", graph); pnotempty',
    "pacAI": "if(nearGhost1 orelse nearGhost2)then(Flee)else(Move)",
    "Flee": "if(flee1a orelse flee1b)then(flee1a orelse flee1b)"
            "else(try(flee2a orelse flee2b))",
    "Move": "if(getPacDot)then(getPacDot)else(try(explore))",
    "ghostAI": "if(kill1 orelse kill2)then(kill1 orelse kill2)else(gMove)",
    "gMove": "if(moveE1 orelse moveE2)then(moveE1 orelse moveE2)"
             "else(try(moveP1 orelse moveP2))",
    "getPacDot": "getPacDot1 orelse getPacDot2",
    "explore": "explore1 orelse explore2",
}
GHOST_RULES = {"kill1", "kill2", "moveE1", "moveE2", "moveP1", "moveP2"}


def port(name: str, d: str) -> str:
    return f"{PREFIX[name]}_{d}"


def relabel(rule_name: str, before: list[str], after: list[str]) -> Rule:
    """Rewrite a west-to-east row of cells, keeping every outside connection."""
    rb = RuleBuilder(SIGNATURE, rule_name)
    ls = [rb.lhs.add(n) for n in before]
    rs = [rb.rhs.add(n) for n in after]
    for i in range(len(ls) - 1):
        rb.lhs.link(ls[i], port(before[i], "e"), ls[i + 1], port(before[i + 1], "w"))
        rb.rhs.link(rs[i], port(after[i], "e"), rs[i + 1], port(after[i + 1], "w"))
    for i, (l, r) in enumerate(zip(ls, rs)):
        dirs = ["n", "s"] + (["w"] if i == 0 else []) + (["e"] if i == len(ls) - 1 else [])
        for d in dirs:
            rb.route(l, port(before[i], d), r, port(after[i], d))
    return rb.build()


def rules() -> dict[str, Rule]:
    E, D, G, P, X = "Empty", "PacDot", "ghost", "pac-man", "End"
    rows = {
        # probes: a ghost right next to pac-man, west (1) or east (2)
        "nearGhost1": ([G, P], [G, P]),
        "nearGhost2": ([P, G], [P, G]),
        # flee from an adjacent ghost into an empty cell (a) or a pac-dot (b)
        "flee1a": ([G, P, E], [G, E, P]),
        "flee1b": ([G, P, D], [G, E, P]),
        "flee2a": ([E, P, G], [P, E, G]),
        "flee2b": ([D, P, G], [P, E, G]),
        "getPacDot1": ([P, D], [E, P]),
        "getPacDot2": ([D, P], [P, E]),
        "explore1": ([P, E], [E, P]),
        "explore2": ([E, P], [P, E]),
        # ghosts: eat pac-man, else prefer empty cells, else walk over pac-dots
        "kill1": ([G, P], [G, X]),
        "kill2": ([P, G], [X, G]),
        "moveE1": ([G, E], [E, G]),
        "moveE2": ([E, G], [G, E]),
        "moveP1": ([G, D], [D, G]),
        "moveP2": ([D, G], [G, D]),
    }
    return {name: relabel(name, b, a) for name, (b, a) in rows.items()}


def strategy_text() -> str:
    return expand_macros("gameLoop", MACROS)


def board(cells: int = 10, ghosts: int = 1, seed: int = 0, dot_ratio: float = 0.7,
          layout: str = "chase") -> LocatedGraph:
    """A one-row board.

    ``chase``: ghosts at the west end, empty cells up to pac-man, pac-dots
    only east of pac-man. ``random``: everything placed at random; with the
    ghosts' preference for empty cells and the east-first tie-break a ghost
    can get trapped bouncing behind a pac-dot, so that game may never end.
    """
    rng = random.Random(seed)
    if layout == "chase":
        pac = rng.randint(ghosts + 1, cells - 2)
        names = ["ghost"] * ghosts + ["Empty"] * (pac - ghosts) + ["pac-man"]
        names += ["PacDot" if rng.random() < dot_ratio else "Empty"
                  for _ in range(cells - pac - 1)]
    elif layout == "random":
        names = ["PacDot" if rng.random() < dot_ratio else "Empty" for _ in range(cells)]
        spots = rng.sample(range(cells), ghosts + 1)
        names[spots[0]] = "pac-man"
        for s in spots[1:]:
            names[s] = "ghost"
    else:
        raise ValueError(f"unknown layout {layout!r}")
    return board_from(names)


def board_from(names: list[str]) -> LocatedGraph:
    """A row of the given cells, west to east, with an empty position."""
    b = GraphBuilder(SIGNATURE)
    ids = [b.add(n) for n in names]
    for i in range(len(names) - 1):
        b.link(ids[i], port(names[i], "e"), ids[i + 1], port(names[i + 1], "w"))
    return LocatedGraph(b.build(), frozenset())


def row(lg: LocatedGraph) -> str:
    """The board as a string, west to east."""
    g = lg.graph
    adj = g.adjacency
    start = next(n for n in g.nodes if (n, port(g.nodes[n].name, "w")) not in adj)
    out, cur = [], start
    sym = {"Empty": ".", "PacDot": "o", "ghost": "G", "pac-man": "C", "End": "X"}
    while cur is not None:
        name = g.nodes[cur].name
        out.append(sym[name])
        nxt = adj.get((cur, port(name, "e")))
        cur = None if nxt is None else nxt[0]
    return "".join(out)


def run(lg: LocatedGraph, seed: int = 0, max_steps: int = 200_000) -> RunResult:
    rs = rules()
    cfg = EngineConfig(rules=rs, seed=seed, max_engine_steps=max_steps)
    return eval_strategy(parse_strategy(strategy_text(), rs), lg, cfg)


@dataclass
class LoopAudit:
    iterations: int = 0
    position_ok: list[bool] = field(default_factory=list)
    ghost_steps: list[dict[int, int]] = field(default_factory=list)
    game_over: bool = False

    @property
    def ok(self) -> bool:
        return (self.iterations > 0 and all(self.position_ok)
                and all(n <= 1 for it in self.ghost_steps for n in it.values()))


_Y = {"ghost", "pac-man", "End"}


def audit(result: RunResult, rs: Optional[Mapping[str, Rule]] = None) -> LoopAudit:
    """Check the game-loop position reset and the one-action-per-ghost rule."""
    rs = rs or rules()
    report = LoopAudit()
    groups: list[list[T.Step]] = []
    for item in result.trace.items:
        if item.kind == T.NOTE and item.depth == 1 and item.note.startswith("iteration"):
            groups.append([])
        elif groups:
            groups[-1].append(item)
    for steps in groups:
        report.iterations += 1
        first = next((s for s in steps if s.kind != T.NOTE), None)
        if first is None or first.kind != T.POSITION:
            report.position_ok.append(False)
            continue
        g = first.after.graph
        expected = frozenset(n for n, node in g.nodes.items() if node.name in _Y)
        report.position_ok.append(first.pos_after == expected)
        lineage = {n: n for n in g.by_name("ghost")}
        counts = {n: 0 for n in lineage}
        for s in steps:
            for rec in s.all_records():
                if rec.rule not in GHOST_RULES:
                    continue
                rule = rs[rec.rule]
                l_ghost = next(l for l, n in rule.lhs.nodes.items() if n.name == "ghost")
                r_ghost = next(r for r, n in rule.rhs.nodes.items() if n.name == "ghost")
                origin = lineage.pop(rec.match[l_ghost])
                counts[origin] += 1
                lineage[dict(rec.created)[r_ghost]] = origin
        report.ghost_steps.append(counts)
    report.game_over = bool(result.located.graph.by_name("End"))
    return report
