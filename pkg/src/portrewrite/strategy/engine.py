"""Strategy evaluation over located graphs.

Graph snapshots are immutable, so the "copy" on which a condition or an AMB
probe runs is the located graph itself; discarding the probe result is the
rollback. Only committed steps reach the trace.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from portrewrite.core import (
    NO_STATE,
    LocatedGraph,
    PortGraph,
    PortGraphError,
    designated_successors,
    successors,
)
from portrewrite.rewriting import (
    ALL,
    AT_LEAST_ONE,
    IdSource,
    Outcome,
    Rule,
    apply_multi,
    apply_parallel,
    rewrite_once,
)
from portrewrite.strategy import ast as A
from portrewrite.strategy import trace as T

ID = "Id"
FAIL = "Fail"


class NonTermination(PortGraphError):
    """The step budget ran out before the strategy reduced to Id or Fail."""


class StrategyError(PortGraphError):
    pass


@dataclass
class EngineConfig:
    rules: Mapping[str, Rule] = field(default_factory=dict)
    seed: int = 0
    max_engine_steps: int = 1_000_000
    designation: Mapping[str, str] = field(default_factory=dict)
    # stop repeat*/repeat+ once an iteration leaves the graph unchanged and
    # revisits a position already seen since the graph last changed
    repeat_fixpoint: bool = True

    def __post_init__(self):
        if self.max_engine_steps <= 0:
            raise ValueError("max_engine_steps must be positive")


@dataclass
class RunResult:
    outcome: str
    located: LocatedGraph
    trace: T.Trace
    steps_used: int

    @property
    def ok(self) -> bool:
        return self.outcome == ID


# predicates and positions

def eval_pred(pred: A.Pred, graph: PortGraph, nid: int) -> bool:
    node = graph.nodes[nid]
    if isinstance(pred, A.NameIs):
        return node.name == pred.name
    if isinstance(pred, A.PortStateIs):
        for p in node.ports:
            if p.name == pred.port:
                if pred.state == NO_STATE:
                    return p.state is None
                return p.state == pred.state
        return False
    if isinstance(pred, A.HasFreePort):
        adj = graph.adjacency
        return any((nid, p.name) not in adj for p in node.ports)
    if isinstance(pred, A.PredAnd):
        return eval_pred(pred.left, graph, nid) and eval_pred(pred.right, graph, nid)
    if isinstance(pred, A.PredOr):
        return eval_pred(pred.left, graph, nid) or eval_pred(pred.right, graph, nid)
    if isinstance(pred, A.PredNot):
        return not eval_pred(pred.operand, graph, nid)
    raise StrategyError(f"unknown predicate {pred!r}")


def eval_position(t: A.PosExpr, host: LocatedGraph, rng: random.Random,
                  designation: Optional[Mapping[str, str]] = None,
                  warn: Optional[Callable[[str], None]] = None) -> frozenset:
    g, pos = host.graph, host.position
    if isinstance(t, A.CrtPos):
        return pos
    if isinstance(t, A.AllSuc):
        return successors(g, pos)
    if isinstance(t, A.OneSuc):
        succ = sorted(successors(g, pos))
        if not succ:
            return frozenset()
        return frozenset([succ[rng.randrange(len(succ))]])
    if isinstance(t, A.NextSuc):
        return designated_successors(g, pos, designation or {})
    if isinstance(t, A.SetPos):
        known = frozenset(i for i in t.ids if i in g.nodes)
        dropped = sorted(set(t.ids) - known)
        if dropped and warn is not None:
            warn(f"setpos dropped unknown ids {dropped}")
        return known
    if isinstance(t, A.Property):
        scope = g.nodes if t.scope == A.WHOLE_GRAPH else pos
        return frozenset(n for n in scope if eval_pred(t.pred, g, n))
    if isinstance(t, A.Union_):
        return (eval_position(t.left, host, rng, designation, warn)
                | eval_position(t.right, host, rng, designation, warn))
    if isinstance(t, A.Inter):
        return (eval_position(t.left, host, rng, designation, warn)
                & eval_position(t.right, host, rng, designation, warn))
    if isinstance(t, A.Minus):
        return (eval_position(t.left, host, rng, designation, warn)
                - eval_position(t.right, host, rng, designation, warn))
    if isinstance(t, A.Compl):
        return g.node_ids() - eval_position(t.operand, host, rng, designation, warn)
    raise StrategyError(f"unknown position transformation {t!r}")


def _rule(rules: Mapping[str, Rule], app: A.RuleApp) -> Rule:
    try:
        return rules[app.rule]
    except KeyError:
        raise StrategyError(f"unknown rule {app.rule!r}") from None


def eval_application(a: A.AppExpr, host: LocatedGraph, rng: random.Random,
                     ids: Callable[[], int], rules: Mapping[str, Rule]) -> Outcome:
    if isinstance(a, A.IdA):
        return Outcome(True, host)
    if isinstance(a, A.FailA):
        return Outcome(False, host)
    if isinstance(a, A.RuleApp):
        return rewrite_once(host, _rule(rules, a), rng, ids)
    if isinstance(a, (A.Par, A.Interleave)):
        mode = ALL if isinstance(a, A.Par) else AT_LEAST_ONE
        return apply_parallel(host, [_rule(rules, a.left), _rule(rules, a.right)],
                              mode, rng, ids)
    if isinstance(a, A.Multi):
        return apply_multi(host, _rule(rules, a.operand), a.min, a.max, rng, ids)
    raise StrategyError(f"unknown application {a!r}")


# strategies

class Engine:
    """One strategy run: owns the RNG, the fresh-id counter and the budget."""

    def __init__(self, cfg: EngineConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.budget = cfg.max_engine_steps
        self.ids: Optional[IdSource] = None
        self.loop_depth = 0

    def run(self, s: A.Strategy, host: LocatedGraph) -> RunResult:
        missing = sorted(A.rule_names(s) - set(self.cfg.rules))
        if missing:
            raise StrategyError(f"strategy uses unknown rules {missing}")
        if not host.position_valid():
            raise StrategyError("position names nodes outside the graph")
        if self.ids is None:
            self.ids = IdSource.after(host.graph)
        out: list[T.Step] = []
        ok, result = self.eval(s, host, out)
        used = self.cfg.max_engine_steps - self.budget
        return RunResult(ID if ok else FAIL, result, T.Trace(out), used)

    def tick(self) -> None:
        self.budget -= 1
        if self.budget < 0:
            raise NonTermination(
                f"step budget of {self.cfg.max_engine_steps} exhausted")

    def eval(self, s: A.Strategy, host: LocatedGraph, out: list) -> tuple[bool, LocatedGraph]:
        self.tick()
        if isinstance(s, A.Pos):
            return self.eval_pos(s.expr, host, out)
        if isinstance(s, A.App):
            return self.eval_app(s.expr, host, out)
        if isinstance(s, A.Seq):
            ok, mid = self.eval(s.first, host, out)
            if not ok:
                return False, mid
            return self.eval(s.second, mid, out)
        if isinstance(s, A.Amb):
            for branch in (s.left, s.right):
                probe: list = []
                ok, res = self.eval(branch, host, probe)
                if ok:
                    out.extend(probe)
                    return True, res
            return False, host
        if isinstance(s, A.PPick):
            n = len(s.options)
            k = self.rng.randrange(n) if n > 1 else 0
            out.append(T.Step(T.NOTE, note=f"ppick chose {k} of {n}", depth=self.loop_depth))
            return self.eval(s.options[k], host, out)
        if isinstance(s, A.While):
            return self.eval_while(s, host, out)
        if isinstance(s, A.IfThenElse):
            probe = []
            ok, res = self.eval(s.cond, host, probe)
            if ok:
                if s.then == s.cond:
                    # the branch is the condition itself: keep the probe run
                    out.extend(probe)
                    return True, res
                return self.eval(s.then, host, out)
            return self.eval(s.orelse, host, out)
        if isinstance(s, A.PNotEmpty):
            return bool(host.position), host
        if isinstance(s, A.Atomic):
            inner: list = []
            ok, res = self.eval(s.body, host, inner)
            if any(x.kind != T.NOTE for x in inner):
                out.append(T.Step(T.ATOMIC, children=tuple(inner),
                                  pos_before=host.position, pos_after=res.position,
                                  after=res))
            return ok, res
        raise StrategyError(f"unknown strategy node {s!r}")

    def eval_pos(self, t: A.PosExpr, host: LocatedGraph, out: list):
        warnings: list[str] = []
        pos = eval_position(t, host, self.rng, self.cfg.designation, warnings.append)
        for w in warnings:
            out.append(T.Step(T.NOTE, note=w, depth=self.loop_depth))
        res = host.with_position(pos)
        out.append(T.Step(T.POSITION, pos_before=host.position,
                          pos_after=pos, after=res))
        return True, res

    def eval_app(self, a: A.AppExpr, host: LocatedGraph, out: list):
        o = eval_application(a, host, self.rng, self.ids, self.cfg.rules)
        if not o.ok:
            return False, host
        if o.records:
            if not o.located.position_valid():
                raise StrategyError("rewrite left the position outside the graph")
            kind = T.RULE if isinstance(a, A.RuleApp) else T.PARALLEL
            out.append(T.Step(kind, records=tuple(o.records), draws=tuple(o.draws),
                              pos_before=host.position, pos_after=o.located.position,
                              note=o.note, after=o.located))
        return True, o.located

    def eval_while(self, s: A.While, host: LocatedGraph, out: list):
        repeat_form = s.cond == s.body
        count = 0
        cur = host
        committed: list = []
        # positions visited since the graph last changed
        seen = {host.position}
        self.loop_depth += 1
        try:
            while not (s.max >= 0 and count >= s.max):
                probe: list = []
                ok, probed = self.eval(s.cond, cur, probe)
                if not ok:
                    break
                frag = [T.Step(T.NOTE, note=f"iteration {count}", depth=self.loop_depth)]
                if repeat_form:
                    # the body is the condition itself: keep the probe run
                    frag.extend(probe)
                    res = probed
                else:
                    ok, res = self.eval(s.body, cur, frag)
                    if not ok:
                        break
                committed.extend(frag)
                count += 1
                same_graph = res.graph is cur.graph or res.graph == cur.graph
                cur = res
                if not same_graph:
                    seen = {res.position}
                elif repeat_form and self.cfg.repeat_fixpoint:
                    if res.position in seen:
                        break
                    seen.add(res.position)
        finally:
            self.loop_depth -= 1
        if s.min >= 0 and count < s.min:
            return False, host
        out.extend(committed)
        return True, cur


def eval_strategy(s: A.Strategy, host: LocatedGraph, cfg: EngineConfig) -> RunResult:
    return Engine(cfg).run(s, host)


def replay(trace: T.Trace, initial: LocatedGraph, cfg: EngineConfig) -> LocatedGraph:
    return T.replay(trace, initial, cfg.rules)
