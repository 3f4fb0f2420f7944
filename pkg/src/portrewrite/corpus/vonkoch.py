"""Von Koch curve: one segment rule that travels round a triangle."""
from __future__ import annotations

from dataclasses import dataclass

from portrewrite.core import GraphBuilder, LocatedGraph
from portrewrite.corpus.common import load_rules
from portrewrite.rewriting import Rule
from portrewrite.strategy import EngineConfig, RunResult, eval_strategy, parse_strategy

NODE_DELTA = 3  # five rhs segments replace two lhs segments


def strategy(m: int) -> str:
    return f"while(vonKoch)do(vonKoch)min(0)max({m})"


def rule(positioned: bool = True) -> Rule:
    r = load_rules("vonkoch.rules").rules["vonKoch"]
    return r if positioned else r.with_m(r.rhs.node_ids())


def triangle(positioned: bool = True) -> LocatedGraph:
    b = GraphBuilder(load_rules("vonkoch.rules").signature)
    ids = [b.add("K", states={"a": "fresh"} if positioned else None), b.add("K"), b.add("K")]
    for i in range(3):
        b.link(ids[i], "b", ids[(i + 1) % 3], "a")
    g = b.build()
    return LocatedGraph(g, {ids[0]} if positioned else g.node_ids())


@dataclass
class KochReport:
    result: RunResult
    node_counts: list[int]
    position_sizes: list[int]
    consecutive: int   # applications that rewrote the previous step's M image
    levels: dict[int, int]   # subdivision depth of every final segment

    @property
    def applications(self) -> int:
        return len(self.node_counts)

    @property
    def level_spread(self) -> int:
        return max(self.levels.values()) - min(self.levels.values())

    def balanced_counts(self) -> bool:
        """3 + 3k nodes and a single positioned node after the k-th step."""
        return all(c == 3 + NODE_DELTA * (k + 1) and s == 1
                   for k, (c, s) in enumerate(zip(self.node_counts, self.position_sizes)))


def run(m: int, seed: int = 0, positioned: bool = True) -> KochReport:
    """Run the curve strategy; ``positioned=False`` is the control without M updates."""
    r = rule(positioned)
    cfg = EngineConfig(rules={"vonKoch": r}, seed=seed)
    res = eval_strategy(parse_strategy(strategy(m), cfg.rules), triangle(positioned), cfg)
    counts, sizes, consecutive = [], [], 0
    prev_m = None
    start = triangle(positioned)
    levels = {n: 0 for n in start.graph.nodes}
    for step in res.trace.steps:
        rec = step.records[0]
        seg, succ = rec.match[1], rec.match[2]
        for rid, h in rec.created:
            levels[h] = levels[succ] if rid == 7 else levels[seg] + 1
        del levels[seg], levels[succ]
        counts.append(len(step.after.graph.nodes))
        sizes.append(len(step.after.position))
        if prev_m is not None and rec.match.pairs[0][1] in prev_m:
            consecutive += 1
        prev_m = rec.m_image if positioned else frozenset(
            h for rid, h in rec.created if rid == max(r.m_nodes))
    return KochReport(res, counts, sizes, consecutive, levels)
