"""Corpus cases on disk: a JSON manifest, graph and rule files, and oracles.

``run_case`` loads a case purely from its files, runs the engine and checks
each expected property with an oracle that does not use the engine.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from portrewrite.core import LocatedGraph, validate
from portrewrite.corpus import arithmetic, labyrinth, lists, pacman, vonkoch
from portrewrite.corpus.common import data_text
from portrewrite.rewriting import Rule
from portrewrite.strategy import EngineConfig, NonTermination, RunResult, eval_strategy, parse_strategy
from portrewrite.textformat import AgentSpec, format_graph, format_rules, parse_graph, parse_rules

BUDGET = "budget"


@dataclass(frozen=True)
class CorpusCase:
    name: str
    family: str
    graph: str          # paths relative to the manifest's directory
    rules: str
    strategy: str
    oracle: str
    expected: tuple[str, ...]
    seed: int = 0
    max_steps: int = 1_000_000
    params: dict = field(default_factory=dict, hash=False)


@dataclass
class Check:
    id: str
    passed: bool
    detail: str = ""


@dataclass
class CaseReport:
    name: str
    outcome: str
    steps_used: int
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def data_dir() -> Path:
    return Path(str(resources.files("portrewrite.corpus").joinpath("data")))


def load_manifest(path: Optional[Path] = None) -> list[CorpusCase]:
    path = Path(path) if path else data_dir() / "manifest.json"
    raw = json.loads(path.read_text())
    return [CorpusCase(**{**c, "expected": tuple(c["expected"])}) for c in raw["cases"]]


def load_case(case: CorpusCase, base: Optional[Path] = None) -> tuple[LocatedGraph, dict[str, Rule]]:
    base = Path(base) if base else data_dir()
    rf = parse_rules((base / case.rules).read_text())
    lg = parse_graph((base / case.graph).read_text(), rf.signature)
    return lg, rf.rules


# oracles: each returns (passed, detail)

def _arith_value(params: dict) -> int:
    vals = [p - q for p, q in params["operands"]]
    op = params["op"]
    if op == "add":
        return vals[0] + vals[1]
    if op == "sub":
        return vals[0] - vals[1]
    if op == "neg":
        return -vals[0]
    return vals[0]


def _check(case: CorpusCase, key: str, initial: LocatedGraph, res: Optional[RunResult],
           outcome: str, rules: dict[str, Rule]) -> Check:
    final = res.located if res else None
    if key == "terminates":
        return Check(key, outcome != BUDGET, outcome)
    if key == "outcome_id":
        return Check(key, outcome == "Id", outcome)
    if key == "budget_exhausted":
        return Check(key, outcome == BUDGET, outcome)
    if final is None:
        return Check(key, False, "no final graph")
    if key == "graph_valid":
        problems = validate(final.graph)
        return Check(key, not problems, "; ".join(problems))
    if key == "decodes_to_oracle":
        want = _arith_value(case.params)
        got = arithmetic.decode_number(final.graph)
        return Check(key, got == want, f"decoded {got}, oracle {want}")
    if key == "one_list_empty":
        p, q = arithmetic.list_lengths(final.graph)
        return Check(key, min(p, q) == 0, f"lists {p} and {q}")
    if key == "node_count":
        m = case.params["m"]
        counts = [len(s.after.graph.nodes) for s in res.trace.steps]
        want = [len(initial.graph.nodes) + vonkoch.NODE_DELTA * (k + 1) for k in range(m)]
        return Check(key, counts == want, f"counts {counts}")
    if key == "single_position":
        sizes = [len(s.after.position) for s in res.trace.steps]
        return Check(key, all(n == 1 for n in sizes), f"sizes {sizes}")
    if key in ("loop_position", "ghost_single_step", "game_over"):
        a = pacman.audit(res, rules)
        ok = {"loop_position": a.iterations > 0 and all(a.position_ok),
              "ghost_single_step": all(n <= 1 for it in a.ghost_steps for n in it.values()),
              "game_over": a.game_over}[key]
        return Check(key, ok, f"{a.iterations} loop iterations")
    if key == "path_equals_bfs":
        want = labyrinth.graph_path_cells(initial.graph)
        got = labyrinth.path_count(final)
        return Check(key, got == want, f"PATH agents {got}, BFS cells {want}")
    if key == "path_longer_than_bfs":
        want = labyrinth.graph_path_cells(initial.graph)
        got = labyrinth.path_count(final)
        return Check(key, got > want, f"PATH agents {got}, BFS cells {want}")
    return Check(key, False, "unknown property")


def run_case(case: CorpusCase, seed: Optional[int] = None,
             base: Optional[Path] = None) -> CaseReport:
    initial, rules = load_case(case, base)
    problems = validate(initial.graph)
    if problems:
        raise ValueError(f"case {case.name}: invalid graph: {'; '.join(problems)}")
    strategy = parse_strategy(case.strategy, rules)
    cfg = EngineConfig(rules=rules, seed=case.seed if seed is None else seed,
                       max_engine_steps=case.max_steps)
    try:
        res: Optional[RunResult] = eval_strategy(strategy, initial, cfg)
        outcome, used = res.outcome, res.steps_used
    except NonTermination:
        res, outcome, used = None, BUDGET, case.max_steps
    checks = [_check(case, k, initial, res, outcome, rules) for k in case.expected]
    return CaseReport(case.name, outcome, used, checks)


# generating the shipped cases

def _arith_cases() -> list[tuple[str, LocatedGraph, str, dict]]:
    nets = {"add": arithmetic.addition_net, "sub": arithmetic.subtraction_net}
    out = []
    one = arithmetic.encode_number(1, 4, 3)
    out.append(("arith_one_reduce", LocatedGraph(one, one.node_ids()), "repeat*(reduce)",
                {"op": "value", "operands": [[4, 3]]}))
    for name, op, operands in [("arith_add_2_3", "add", [[2, 0], [3, 0]]),
                               ("arith_add_neg", "add", [[1, 5], [9, 2]]),
                               ("arith_sub_5_8", "sub", [[6, 1], [9, 1]]),
                               ("arith_neg_3", "neg", [[5, 2]])]:
        lg = (arithmetic.negation_net(tuple(operands[0])) if op == "neg"
              else nets[op](*map(tuple, operands)))
        out.append((name, lg, arithmetic.ARITH_STRATEGY, {"op": op, "operands": operands}))
    return out


def build_cases(outdir: Path) -> list[CorpusCase]:
    """Write every rule file, graph file and the manifest under ``outdir``."""
    outdir = Path(outdir)
    (outdir / "graphs").mkdir(parents=True, exist_ok=True)
    # hand-written rule files are copied as they are
    rule_files = {
        "arithmetic.rules": data_text("arithmetic.rules"),
        "vonkoch.rules": data_text("vonkoch.rules"),
        "pacman.rules": format_rules(pacman.rules().values(), pacman.SIGNATURE),
        "labyrinth.rules": format_rules(labyrinth.rules(cleanup=True).values(), labyrinth.SIGNATURE),
        "lists.rules": format_rules(lists.rules().values(), labyrinth.SIGNATURE,
                                    [AgentSpec(a.symbol, a.arity, a.principal)
                                     for a in lists.agents()]),
    }
    for fname, text in rule_files.items():
        (outdir / fname).write_text(text)

    cases: list[CorpusCase] = []

    def add(name: str, family: str, lg: LocatedGraph, rules: str, strategy: str,
            oracle: str, expected: tuple[str, ...], **kw) -> None:
        path = f"graphs/{name}.graph"
        (outdir / path).write_text(format_graph(lg))
        cases.append(CorpusCase(name, family, path, rules, strategy, oracle, expected, **kw))

    for name, lg, strat, params in _arith_cases():
        extra = ("one_list_empty",) if params["op"] == "value" else ()
        add(name, "arithmetic", lg, "arithmetic.rules", strat, "integer arithmetic",
            ("outcome_id", "decodes_to_oracle") + extra, params=params)
    for m in (3, 6, 12):
        add(f"vonkoch_m{m}", "vonkoch", vonkoch.triangle(True), "vonkoch.rules",
            vonkoch.strategy(m), "node delta of the encoded rule",
            ("outcome_id", "node_count", "single_position"), params={"m": m})
    add("pacman_chase", "pacman", pacman.board(10, 1, seed=0), "pacman.rules",
        pacman.strategy_text(), "game-loop trace audit",
        ("outcome_id", "loop_position", "ghost_single_step", "game_over"), max_steps=200_000)
    for w, h, seed, extra in [(5, 5, 1, 0), (8, 8, 2, 4), (6, 4, 3, 2)]:
        maze = labyrinth.generate_maze(w, h, seed, extra)
        add(f"labyrinth_{w}x{h}_s{seed}", "labyrinth", labyrinth.maze_graph(maze),
            "labyrinth.rules", labyrinth.strategy_text(), "breadth-first search",
            ("outcome_id", "path_equals_bfs", "graph_valid"),
            params={"width": w, "height": h, "seed": seed, "extra_openings": extra})
    maze = labyrinth.generate_maze(5, 5, 4, 2, with_exit=False)
    add("labyrinth_no_exit", "labyrinth", labyrinth.maze_graph(maze), "labyrinth.rules",
        labyrinth.strategy_text(), "breadth-first search", ("budget_exhausted",),
        max_steps=50_000, params={"width": 5, "height": 5, "seed": 4, "extra_openings": 2})
    crafted = labyrinth.maze_graph(labyrinth.crafted_maze())
    add("labyrinth_ring", "labyrinth", crafted, "labyrinth.rules", labyrinth.strategy_text(),
        "breadth-first search", ("outcome_id", "path_equals_bfs"))
    add("labyrinth_ring_scrambled", "labyrinth", crafted, "labyrinth.rules",
        labyrinth.strategy_text(labyrinth.scrambled_order()), "breadth-first search",
        ("outcome_id", "path_longer_than_bfs"))
    add("labyrinth_cleanup", "labyrinth",
        labyrinth.maze_graph(labyrinth.generate_maze(6, 6, 5, 6)), "labyrinth.rules",
        labyrinth.strategy_text(cleanup=True), "breadth-first search",
        ("outcome_id", "path_equals_bfs", "graph_valid"))

    manifest = {"cases": [asdict(c) for c in cases]}
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return cases


def main(argv: Optional[list[str]] = None) -> int:
    import argparse

    ap = argparse.ArgumentParser(description="Run the corpus cases against their oracles.")
    ap.add_argument("--manifest", type=Path)
    ap.add_argument("--regenerate", type=Path, metavar="DIR",
                    help="write rule files, graphs and a manifest into DIR")
    args = ap.parse_args(argv)
    if args.regenerate:
        build_cases(args.regenerate)
        return 0
    base = args.manifest.parent if args.manifest else None
    failed = 0
    for case in load_manifest(args.manifest):
        rep = run_case(case, base=base)
        failed += not rep.passed
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {rep.name} ({rep.outcome}, {rep.steps_used} steps)")
        for c in rep.checks:
            print(f"    {'ok ' if c.passed else 'BAD'} {c.id}: {c.detail}")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
