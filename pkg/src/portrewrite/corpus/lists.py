"""Direction lists with copy (cp2, cp3) and erase (eps) agents.

A list hangs off whatever holds its first element: each Direction's prev
port points back toward the holder, its next port to the rest of the list,
which ends in Nil. All four management agents interact on their principal
port, so the rule set is an interaction net.
"""
from __future__ import annotations

import random
from typing import Sequence

from portrewrite.core import GraphBuilder, LocatedGraph, PortGraph
from portrewrite.corpus.common import RuleBuilder
from portrewrite.corpus.labyrinth import DIRS, SIGNATURE
from portrewrite.inets import AgentDecl, INetRuleSet
from portrewrite.rewriting import Rule
from portrewrite.strategy import EngineConfig, RunResult, eval_strategy
from portrewrite.strategy import ast as A

COPIERS = {2: "cp2", 3: "cp3"}


def nxt(d: str) -> str:
    return f"{d.lower()}_next"


def prev(d: str) -> str:
    return f"{d.lower()}_prev"


def copier_ports(k: int) -> tuple[str, list[str]]:
    pre = f"c{k}_"
    return pre + "in", [f"{pre}o{i}" for i in range(1, k + 1)]


def copy_rule(k: int, d: str) -> Rule:
    """Copier meets a Direction: emit one copy per output, keep copying the tail."""
    name = COPIERS[k]
    inp, outs = copier_ports(k)
    rb = RuleBuilder(SIGNATURE, f"{name}{d}")
    c = rb.lhs.add(name)
    x = rb.lhs.add(d)
    rb.lhs.link(c, inp, x, prev(d))
    c2 = rb.rhs.add(name)
    rb.route(x, nxt(d), c2, inp)
    for o in outs:
        y = rb.rhs.add(d)
        rb.route(c, o, y, prev(d))
        rb.rhs.link(y, nxt(d), c2, o)
    return rb.build()


def copy_nil_rule(k: int) -> Rule:
    name = COPIERS[k]
    inp, outs = copier_ports(k)
    rb = RuleBuilder(SIGNATURE, f"{name}Nil")
    c = rb.lhs.add(name)
    n = rb.lhs.add("Nil")
    rb.lhs.link(c, inp, n, "nil")
    for o in outs:
        rb.route(c, o, rb.rhs.add("Nil"), "nil")
    return rb.build()


def eps_rule(d: str) -> Rule:
    rb = RuleBuilder(SIGNATURE, f"eps{d}")
    e = rb.lhs.add("eps")
    x = rb.lhs.add(d)
    rb.lhs.link(e, "eps_in", x, prev(d))
    rb.route(x, nxt(d), rb.rhs.add("eps"), "eps_in")
    return rb.build()


def eps_nil_rule() -> Rule:
    rb = RuleBuilder(SIGNATURE, "epsNil")
    e = rb.lhs.add("eps")
    n = rb.lhs.add("Nil")
    rb.lhs.link(e, "eps_in", n, "nil")
    return rb.build()


def rules() -> dict[str, Rule]:
    out = {}
    for k in COPIERS:
        for d in DIRS:
            r = copy_rule(k, d)
            out[r.name] = r
        r = copy_nil_rule(k)
        out[r.name] = r
    for d in DIRS:
        r = eps_rule(d)
        out[r.name] = r
    r = eps_nil_rule()
    out[r.name] = r
    return out


def agents() -> tuple[AgentDecl, ...]:
    decl = [AgentDecl(d, 1, prev(d)) for d in DIRS]
    decl += [AgentDecl("cp2", 2, "c2_in"), AgentDecl("cp3", 3, "c3_in"),
             AgentDecl("eps", 0, "eps_in"), AgentDecl("Nil", 0, "nil")]
    return tuple(decl)


def rule_set() -> INetRuleSet:
    return INetRuleSet(SIGNATURE, agents(), tuple(rules().values()))


def random_list(k: int, rng: random.Random) -> list[str]:
    return [rng.choice(DIRS) for _ in range(k)]


def list_net(items: Sequence[str], op: str) -> LocatedGraph:
    """A list of Directions consumed by ``op`` (cp2, cp3 or eps) at its head."""
    b = GraphBuilder(SIGNATURE)
    head = b.add(op)
    port = {"cp2": "c2_in", "cp3": "c3_in", "eps": "eps_in"}[op]
    holder, hport = head, port
    for d in items:
        x = b.add(d)
        b.link(holder, hport, x, prev(d))
        holder, hport = x, nxt(d)
    nil = b.add("Nil")
    b.link(holder, hport, nil, "nil")
    g = b.build()
    return LocatedGraph(g, g.node_ids())


def read_list(g: PortGraph, node: int, port: str) -> list[str]:
    """Follow a list from the given holder port to its Nil."""
    out = []
    adj = g.adjacency
    cur = adj.get((node, port))
    while cur is not None:
        name = g.nodes[cur[0]].name
        if name == "Nil":
            return out
        if name not in DIRS or cur[1] != prev(name):
            raise ValueError(f"not a list cell: {name}.{cur[1]}")
        out.append(name)
        cur = adj.get((cur[0], nxt(name)))
    raise ValueError("list does not end in Nil")


def lists_in(g: PortGraph) -> list[list[str]]:
    """Every list whose head is free, sorted; a lone free Nil is the empty list."""
    adj = g.adjacency
    out = []
    for nid, n in g.nodes.items():
        if n.name in DIRS and (nid, prev(n.name)) not in adj:
            out.append([n.name] + read_list(g, nid, nxt(n.name)))
        elif n.name == "Nil" and (nid, "nil") not in adj:
            out.append([])
    return sorted(out)


NORMALIZE = A.repeat_star(A.Seq(A.Pos(A.Compl(A.SetPos(()))),
                                A.orelse_chain(*(A.rule(n) for n in sorted(rules())))))


def normalize(lg: LocatedGraph, seed: int = 0, max_steps: int = 100_000) -> RunResult:
    """Reduce anywhere in the net until no rule applies."""
    cfg = EngineConfig(rules=rules(), seed=seed, max_engine_steps=max_steps)
    return eval_strategy(NORMALIZE, lg, cfg)
