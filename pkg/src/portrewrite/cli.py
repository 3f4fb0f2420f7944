"""Command-line front end.

Exit status: 0 when the strategy ends in Id, 1 when it ends in Fail, 2 on
any parse or validation error, 3 when the step budget runs out.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from portrewrite.core import PortGraphError, validate
from portrewrite.export import export_snapshots
from portrewrite.strategy import EngineConfig, NonTermination, eval_strategy, parse_strategy
from portrewrite.textformat import format_graph, parse_graph, parse_rules

EXIT_ID, EXIT_FAIL, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunRequest:
    graph: Path
    rules: list[Path] = field(default_factory=list)
    strategy: Optional[str] = None
    strategy_file: Optional[Path] = None
    seed: int = 0
    max_steps: int = 1_000_000
    out: Optional[Path] = None
    trace: Optional[Path] = None
    export_dir: Optional[Path] = None
    validate_only: bool = False


class InvalidInput(Exception):
    pass


def _load(req: RunRequest):
    sig = None
    rules: dict = {}
    designation: dict = {}
    for path in req.rules:
        rf = parse_rules(path.read_text(), sig)
        sig = rf.signature
        for name, rule in rf.rules.items():
            if name in rules:
                raise InvalidInput(f"{path}: rule {name!r} defined twice")
            rules[name] = rule
        designation.update({a.symbol: a.principal for a in rf.agents})
    lg = parse_graph(req.graph.read_text(), sig)
    problems = validate(lg.graph)
    if problems:
        raise InvalidInput(f"{req.graph}: " + "; ".join(problems))
    if not lg.position_valid():
        raise InvalidInput(f"{req.graph}: position names nodes outside the graph")
    if req.strategy_file is not None:
        text = req.strategy_file.read_text()
    elif req.strategy is not None:
        text = req.strategy
    else:
        raise InvalidInput("no strategy given")
    strategy = parse_strategy(text, rules)
    return lg, rules, designation, strategy


def run(req: RunRequest) -> int:
    try:
        lg, rules, designation, strategy = _load(req)
    except (InvalidInput, PortGraphError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    if req.validate_only:
        print(f"ok: {len(lg.graph.nodes)} nodes, {len(rules)} rules")
        return EXIT_ID
    cfg = EngineConfig(rules=rules, seed=req.seed, max_engine_steps=req.max_steps,
                       designation=designation)
    try:
        res = eval_strategy(strategy, lg, cfg)
    except NonTermination as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except PortGraphError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    try:
        if req.out:
            req.out.write_text(format_graph(res.located))
        if req.trace:
            req.trace.write_text(res.trace.to_jsonl())
        if req.export_dir:
            export_snapshots(res.trace, lg, req.export_dir)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    print(f"{res.outcome} after {res.steps_used} engine steps, "
          f"{len(res.trace.steps)} trace steps", file=sys.stderr)
    return EXIT_ID if res.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="portrewrite",
                                 description="Run a strategy on a located port graph.")
    ap.add_argument("--graph", type=Path, required=True)
    ap.add_argument("--rules", type=Path, action="append", default=[],
                    help="rule file; repeat to load several")
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--strategy", help="strategy text")
    src.add_argument("--strategy-file", type=Path)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-steps", type=int, default=1_000_000)
    ap.add_argument("--out", type=Path, help="write the final located graph here")
    ap.add_argument("--trace", type=Path, help="write the trace as JSON Lines here")
    ap.add_argument("--export-dir", type=Path, help="write DOT snapshots here")
    ap.add_argument("--validate-only", action="store_true",
                    help="parse and validate the inputs, then stop")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_steps <= 0:
        print("error: --max-steps must be positive", file=sys.stderr)
        return EXIT_INVALID
    req = RunRequest(graph=args.graph, rules=args.rules, strategy=args.strategy,
                     strategy_file=args.strategy_file, seed=args.seed,
                     max_steps=args.max_steps, out=args.out, trace=args.trace,
                     export_dir=args.export_dir, validate_only=args.validate_only)
    return run(req)


if __name__ == "__main__":
    raise SystemExit(main())
