"""Shortest path through a maze by synchronous Pather splitting.

Cells are Labyrinth agents joined side to side (``lE`` of a cell to ``lW``
of its east neighbour). A Pather sits on a cell's ``lP`` port. Splitting
turns the cell into a Visited agent that keeps, on ``vP``, the Direction
agent telling which way the Pather came in; each new Pather carries one
fresh Direction. Once a Pather stands next to the End agent, a Drawer walks
those stored directions back to the start and turns cells into PATH agents.
"""
from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from portrewrite.core import GraphBuilder, LocatedGraph, PortGraph, PSignature
from portrewrite.corpus.common import RuleBuilder, expand_macros
from portrewrite.matching import PortConstraint
from portrewrite.rewriting import Rule
from portrewrite.strategy import EngineConfig, RunResult, eval_strategy, parse_strategy

DIRS = "NESW"
OPP = {"N": "S", "S": "N", "E": "W", "W": "E"}
STEP = {"N": (0, -1), "S": (0, 1), "E": (1, 0), "W": (-1, 0)}
CELL = {"Labyrinth": "l", "End": "e", "Visited": "v", "PATH": "p"}

SIGNATURE = PSignature({
    **{name: [f"{pre}{d}" for d in DIRS + "P"] for name, pre in CELL.items()},
    "Pather": ["pos", "lst"],
    "Drawer": ["dpos", "dlst"],
    **{d: [f"{d.lower()}_next", f"{d.lower()}_prev"] for d in DIRS},
    # list management
    "cp2": ["c2_in", "c2_o1", "c2_o2"],
    "cp3": ["c3_in", "c3_o1", "c3_o2", "c3_o3"],
    "eps": ["eps_in"],
    "Nil": ["nil"],
})

FREE = PortConstraint.MUST_BE_FREE
LINKED = PortConstraint.MUST_BE_CONNECTED


def cp(name: str, d: str) -> str:
    """Port of a cell agent: a direction letter or ``P``."""
    return CELL[name] + d


def split_names() -> list[tuple[str, tuple[str, ...]]]:
    out = [("split4", tuple(DIRS))]
    for k in (3, 2, 1):
        for letter, combo in zip("abcdef", itertools.combinations(DIRS, k)):
            out.append((f"split{k}{letter}", combo))
    return out


def split_rule(name: str, dirs: Sequence[str]) -> Rule:
    rb = RuleBuilder(SIGNATURE, name)
    p = rb.lhs.add("Pather")
    c = rb.lhs.add("Labyrinth")
    rb.lhs.link(p, "pos", c, "lP")
    c2 = rb.rhs.add("Visited")
    rb.route(p, "lst", c2, "vP")
    for d in DIRS:
        if d not in dirs:
            rb.route(c, cp("Labyrinth", d), c2, cp("Visited", d))
    for d in dirs:
        n = rb.lhs.add("Labyrinth")
        rb.lhs.link(c, cp("Labyrinth", d), n, cp("Labyrinth", OPP[d]))
        rb.require(n, "lP", FREE)
        n2 = rb.rhs.add("Labyrinth")
        q = rb.rhs.add("Pather")
        k = rb.rhs.add(d)
        rb.rhs.link(c2, cp("Visited", d), n2, cp("Labyrinth", OPP[d]))
        rb.rhs.link(q, "pos", n2, "lP")
        rb.rhs.link(q, "lst", k, f"{d.lower()}_prev")
        for e in DIRS:
            if e != OPP[d]:
                rb.route(n, cp("Labyrinth", e), n2, cp("Labyrinth", e))
    return rb.build()


def found_rule(d: str) -> Rule:
    """A Pather whose cell touches the End agent on side ``d``."""
    rb = RuleBuilder(SIGNATURE, f"found{d}")
    p = rb.lhs.add("Pather")
    c = rb.lhs.add("Labyrinth")
    e = rb.lhs.add("End")
    rb.lhs.link(p, "pos", c, "lP")
    rb.lhs.link(c, cp("Labyrinth", d), e, cp("End", OPP[d]))
    c2 = rb.rhs.add("Visited")
    dr = rb.rhs.add("Drawer")
    e2 = rb.rhs.add("PATH")
    rb.rhs.link(dr, "dpos", c2, "vP")
    rb.rhs.link(c2, cp("Visited", d), e2, cp("PATH", OPP[d]))
    rb.route(p, "lst", dr, "dlst")
    for x in DIRS:
        if x != d:
            rb.route(c, cp("Labyrinth", x), c2, cp("Visited", x))
        if x != OPP[d]:
            rb.route(e, cp("End", x), e2, cp("PATH", x))
    rb.route(e, "eP", e2, "pP")
    rb.m.add(dr)
    return rb.build()


def draw_rule(d: str) -> Rule:
    """The Drawer holds direction ``d``: step back against it, leaving PATH behind."""
    rb = RuleBuilder(SIGNATURE, f"draw{d}")
    dr = rb.lhs.add("Drawer")
    c = rb.lhs.add("Visited")
    k = rb.lhs.add(d)
    back = rb.lhs.add("Visited")
    rb.lhs.link(dr, "dpos", c, "vP")
    rb.lhs.link(dr, "dlst", k, f"{d.lower()}_prev")
    rb.lhs.link(c, cp("Visited", OPP[d]), back, cp("Visited", d))
    c2 = rb.rhs.add("PATH")
    back2 = rb.rhs.add("Visited")
    dr2 = rb.rhs.add("Drawer")
    rb.rhs.link(dr2, "dpos", back2, "vP")
    rb.rhs.link(c2, cp("PATH", OPP[d]), back2, cp("Visited", d))
    for x in DIRS:
        if x != OPP[d]:
            rb.route(c, cp("Visited", x), c2, cp("PATH", x))
        if x != d:
            rb.route(back, cp("Visited", x), back2, cp("Visited", x))
    rb.route(back, "vP", dr2, "dlst")
    rb.m.add(dr2)
    return rb.build()


def done_rule() -> Rule:
    """A Drawer with nothing left to follow marks its (start) cell and leaves."""
    rb = RuleBuilder(SIGNATURE, "done")
    dr = rb.lhs.add("Drawer")
    c = rb.lhs.add("Visited")
    rb.lhs.link(dr, "dpos", c, "vP")
    rb.require(dr, "dlst", FREE)
    c2 = rb.rhs.add("PATH")
    for x in DIRS:
        rb.route(c, cp("Visited", x), c2, cp("PATH", x))
    return rb.build()


def cleanup_rules() -> dict[str, Rule]:
    """Optional: erase leftover Pathers and the Directions they carry."""
    out = {}
    rb = RuleBuilder(SIGNATURE, "retire")
    p = rb.lhs.add("Pather")
    rb.require(p, "lst", LINKED)
    e = rb.rhs.add("eps")
    rb.route(p, "lst", e, "eps_in")
    rb.m.add(e)
    out["retire"] = rb.build()
    rb = RuleBuilder(SIGNATURE, "drop")
    p = rb.lhs.add("Pather")
    rb.require(p, "lst", FREE)
    out["drop"] = rb.build()
    for d in DIRS:
        # a carried Direction is the last of its list: its next port is free
        rb = RuleBuilder(SIGNATURE, f"epsEnd{d}")
        e = rb.lhs.add("eps")
        k = rb.lhs.add(d)
        rb.lhs.link(e, "eps_in", k, f"{d.lower()}_prev")
        rb.require(k, f"{d.lower()}_next", FREE)
        out[f"epsEnd{d}"] = rb.build()
    return out


CLEANUP = ('property(name=="Pather", graph); repeat*(retire orelse drop); '
           'property(name=="eps", graph); '
           'repeat*(epsEndN orelse epsEndE orelse epsEndS orelse epsEndW)')


def rules(cleanup: bool = False) -> dict[str, Rule]:
    out = {name: split_rule(name, dirs) for name, dirs in split_names()}
    for d in DIRS:
        out[f"found{d}"] = found_rule(d)
        out[f"draw{d}"] = draw_rule(d)
    out["done"] = done_rule()
    if cleanup:
        out.update(cleanup_rules())
    return out


def macros(split_order: Optional[Sequence[str]] = None) -> dict[str, str]:
    order = list(split_order) if split_order else [n for n, _ in split_names()]
    return {
        "LabStrat": "Step1; Step2",
        "Step1": "while(not(found))do(repeat*(Step1Split); property(Y, graph))"
                 "min(0)max(-1); found",
        "Y": 'name=="Pather"',
        "Step1Split": " orelse ".join(order),
        "Step2": "while(not(done))do(drawN orelse drawE orelse drawS orelse drawW)"
                 "min(0)max(-1); done",
        "found": "foundN orelse foundE orelse foundS orelse foundW",
    }


def strategy_text(split_order: Optional[Sequence[str]] = None, cleanup: bool = False) -> str:
    text = expand_macros("LabStrat", macros(split_order))
    return f"{text}; {CLEANUP}" if cleanup else text


def scrambled_order() -> list[str]:
    """The split rules in reverse: single-direction moves are tried first."""
    return [n for n, _ in reversed(split_names())]


# mazes

@dataclass
class Maze:
    width: int
    height: int
    passages: set[frozenset] = field(default_factory=set)
    start: tuple[int, int] = (0, 0)
    exit: Optional[tuple[int, int]] = None

    def open(self, a, b) -> bool:
        return frozenset((a, b)) in self.passages

    def neighbours(self, cell):
        x, y = cell
        for d in DIRS:
            dx, dy = STEP[d]
            other = (x + dx, y + dy)
            if self.open(cell, other):
                yield d, other


def generate_maze(width: int, height: int, seed: int, extra_openings: int = 0,
                  with_exit: bool = True) -> Maze:
    """Seeded depth-first perfect maze, optionally with extra passages (loops)."""
    rng = random.Random(seed)
    cells = [(x, y) for y in range(height) for x in range(width)]
    maze = Maze(width, height)
    start = rng.choice(cells)
    stack, seen = [start], {start}
    while stack:
        x, y = stack[-1]
        nbrs = [(x + dx, y + dy) for dx, dy in STEP.values()
                if 0 <= x + dx < width and 0 <= y + dy < height and (x + dx, y + dy) not in seen]
        if not nbrs:
            stack.pop()
            continue
        nxt = rng.choice(nbrs)
        maze.passages.add(frozenset(((x, y), nxt)))
        seen.add(nxt)
        stack.append(nxt)
    walls = sorted({frozenset((c, (c[0] + dx, c[1] + dy)))
                    for c in cells for dx, dy in ((1, 0), (0, 1))
                    if c[0] + dx < width and c[1] + dy < height} - maze.passages,
                   key=sorted)
    for w in rng.sample(walls, min(extra_openings, len(walls))):
        maze.passages.add(w)
    maze.start = rng.choice(cells)
    if with_exit:
        maze.exit = rng.choice([c for c in cells if c != maze.start])
    return maze


def crafted_maze() -> Maze:
    """A 3x2 ring. The exit is two steps east of the start; the long way round
    goes south first, which a single-direction move tried early will take."""
    cells = [(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (0, 1), (0, 0)]
    passages = {frozenset(p) for p in zip(cells, cells[1:])}
    return Maze(3, 2, passages, start=(0, 0), exit=(2, 0))


def bfs_distance(maze: Maze) -> Optional[int]:
    """Number of moves on a shortest start-to-exit walk (None if unreachable)."""
    if maze.exit is None:
        return None
    dist = {maze.start: 0}
    queue = deque([maze.start])
    while queue:
        cur = queue.popleft()
        if cur == maze.exit:
            return dist[cur]
        for _, nxt in maze.neighbours(cur):
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return None


def bfs_path_cells(maze: Maze) -> Optional[int]:
    """Cells on a shortest path, both ends included."""
    d = bfs_distance(maze)
    return None if d is None else d + 1


def maze_graph(maze: Maze) -> LocatedGraph:
    b = GraphBuilder(SIGNATURE)
    ids = {}
    for y in range(maze.height):
        for x in range(maze.width):
            name = "End" if (x, y) == maze.exit else "Labyrinth"
            ids[(x, y)] = b.add(name)
    for pair in sorted(maze.passages, key=sorted):
        a, c = sorted(pair)
        d = "E" if c[0] > a[0] else "S"
        na = "End" if a == maze.exit else "Labyrinth"
        nc = "End" if c == maze.exit else "Labyrinth"
        b.link(ids[a], cp(na, d), ids[c], cp(nc, OPP[d]))
    pather = b.add("Pather")
    b.link(pather, "pos", ids[maze.start], "lP")
    return LocatedGraph(b.build(), frozenset([pather]))


def graph_path_cells(g: PortGraph) -> Optional[int]:
    """BFS over the cell agents of a maze graph, from the Pather's cell to End."""
    adj = g.adjacency
    pathers = g.by_name("Pather")
    if len(pathers) != 1 or (pathers[0], "pos") not in adj:
        raise ValueError("expected one Pather standing on a cell")
    start = adj[(pathers[0], "pos")][0]
    dist = {start: 1}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        name = g.nodes[cur].name
        if name == "End":
            return dist[cur]
        for d in DIRS:
            other = adj.get((cur, cp(name, d)))
            if other is not None and other[0] not in dist:
                dist[other[0]] = dist[cur] + 1
                queue.append(other[0])
    return None


def path_count(lg: LocatedGraph) -> int:
    return len(lg.graph.by_name("PATH"))


def run(maze: Maze, seed: int = 0, max_steps: int = 1_000_000,
        split_order: Optional[Sequence[str]] = None, cleanup: bool = False) -> RunResult:
    rs = rules(cleanup)
    cfg = EngineConfig(rules=rs, seed=seed, max_engine_steps=max_steps)
    text = strategy_text(split_order, cleanup)
    return eval_strategy(parse_strategy(text, rs), maze_graph(maze), cfg)
