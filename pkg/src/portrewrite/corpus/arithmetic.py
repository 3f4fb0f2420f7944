"""Integer arithmetic with interaction nets over difference lists.

A number p - q is an I head whose ``i_l`` port starts a path running through
p "left" S agents (entered at ``s_a``, left at ``s_p``) and then q "right" S
agents (entered at ``s_p``, left at ``s_a``) back to ``i_r``. Left and right
lists meet principal to principal, which is exactly a ``reduce`` redex.
Zero is the head with ``i_l`` wired to ``i_r``.
"""
from __future__ import annotations

import random
from typing import Optional

from portrewrite.core import GraphBuilder, LocatedGraph, PortGraph, PortGraphError
from portrewrite.corpus.common import load_rules
from portrewrite.strategy import EngineConfig, RunResult, eval_strategy, parse_strategy

ARITH_STRATEGY = "repeat*(repeat*(reduce); try(negate); try(open))"


def rule_file():
    return load_rules("arithmetic.rules")


def _number(b: GraphBuilder, p: int, q: int) -> int:
    head = b.add("I")
    prev = (head, "i_l")
    for _ in range(p):
        s = b.add("S")
        b.link(*prev, s, "s_a")
        prev = (s, "s_p")
    for _ in range(q):
        s = b.add("S")
        b.link(*prev, s, "s_p")
        prev = (s, "s_a")
    b.link(*prev, head, "i_r")
    return head


def encode_number(z: int, p: int, q: int) -> PortGraph:
    if p < 0 or q < 0 or p - q != z:
        raise ValueError(f"{p} - {q} does not represent {z}")
    b = GraphBuilder(rule_file().signature)
    _number(b, p, q)
    return b.build()


def split(z: int, rng: random.Random, extra: int = 3) -> tuple[int, int]:
    """A random difference-list representation of ``z``."""
    q = max(0, -z) + rng.randint(0, extra)
    return z + q, q


def result_head(net: PortGraph) -> int:
    adj = net.adjacency
    heads = [n for n in net.by_name("I") if (n, "i_h") not in adj]
    if len(heads) != 1:
        raise PortGraphError(f"expected one I head with a free principal port, found {len(heads)}")
    return heads[0]


def list_walk(net: PortGraph, head: Optional[int] = None) -> list[int]:
    """Signed steps (+1 left element, -1 right element) from i_l to i_r."""
    if head is None:
        head = result_head(net)
    adj = net.adjacency
    steps = []
    cur = adj.get((head, "i_l"))
    for _ in range(len(net.nodes) + 1):
        if cur is None:
            raise PortGraphError("list is broken")
        if cur == (head, "i_r"):
            return steps
        nid, port = cur
        if net.nodes[nid].name != "S":
            raise PortGraphError(f"unexpected {net.nodes[nid].name} in a list")
        if port == "s_a":
            steps.append(1)
            cur = adj.get((nid, "s_p"))
        else:
            steps.append(-1)
            cur = adj.get((nid, "s_a"))
    raise PortGraphError("list does not return to its head")


def decode_number(net: PortGraph, head: Optional[int] = None) -> int:
    return sum(list_walk(net, head))


def list_lengths(net: PortGraph, head: Optional[int] = None) -> tuple[int, int]:
    w = list_walk(net, head)
    return w.count(1), w.count(-1)


def _socket_pair(b: GraphBuilder, left: int, right: int) -> tuple[int, int]:
    """Result head whose list is the concatenation of two operand sockets."""
    res = b.add("I")
    op1 = b.add("I")
    op2 = b.add("I")
    b.link(res, "i_l", op1, "i_l")
    b.link(op1, "i_r", op2, "i_l")
    b.link(op2, "i_r", res, "i_r")
    b.link(op1, "i_h", left, "i_h")
    return res, op2


def _addition(g: GraphBuilder, a, b) -> None:
    x = _number(g, *a)
    y = _number(g, *b)
    _, op2 = _socket_pair(g, x, y)
    g.link(op2, "i_h", y, "i_h")


def _negation(g: GraphBuilder, a) -> None:
    x = _number(g, *a)
    neg = g.add("S")
    g.link(x, "i_h", neg, "s_p")


def _subtraction(g: GraphBuilder, a, b) -> None:
    x = _number(g, *a)
    y = _number(g, *b)
    neg = g.add("S")
    g.link(y, "i_h", neg, "s_p")
    _, op2 = _socket_pair(g, x, y)
    g.link(op2, "i_h", neg, "s_a")


def _located(g: GraphBuilder) -> LocatedGraph:
    net = g.build()
    return LocatedGraph(net, net.node_ids())


def addition_net(a: tuple[int, int], b: tuple[int, int]) -> LocatedGraph:
    g = GraphBuilder(rule_file().signature)
    _addition(g, a, b)
    return _located(g)


def negation_net(a: tuple[int, int]) -> LocatedGraph:
    g = GraphBuilder(rule_file().signature)
    _negation(g, a)
    return _located(g)


def subtraction_net(a: tuple[int, int], b: tuple[int, int]) -> LocatedGraph:
    g = GraphBuilder(rule_file().signature)
    _subtraction(g, a, b)
    return _located(g)


def random_net(rng: random.Random, parts: int = 3, bound: int = 9) -> LocatedGraph:
    """Several independent sums, negations and differences side by side."""
    g = GraphBuilder(rule_file().signature)
    for _ in range(rng.randint(1, parts)):
        kind = rng.choice(("add", "neg", "sub"))
        a = split(rng.randint(-bound, bound), rng)
        b = split(rng.randint(-bound, bound), rng)
        if kind == "add":
            _addition(g, a, b)
        elif kind == "neg":
            _negation(g, a)
        else:
            _subtraction(g, a, b)
    return _located(g)


def run(lg: LocatedGraph, seed: int = 0, strategy: str = ARITH_STRATEGY,
        max_steps: int = 1_000_000) -> RunResult:
    rf = rule_file()
    cfg = EngineConfig(rules=rf.rules, seed=seed, max_engine_steps=max_steps)
    return eval_strategy(parse_strategy(strategy, rf.rules), lg, cfg)
