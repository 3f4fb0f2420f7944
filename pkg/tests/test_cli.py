import subprocess
import sys

import pytest

from portrewrite import cli
from portrewrite.corpus import arithmetic, labyrinth
from portrewrite.corpus.common import data_text
from portrewrite.strategy import Trace
from portrewrite.strategy.trace import replay
from portrewrite.textformat import format_graph, parse_graph, parse_rules

ARITH = data_text("arithmetic.rules")


@pytest.fixture
def arith(tmp_path):
    rules = tmp_path / "arith.rules"
    rules.write_text(ARITH)
    graph = tmp_path / "one.graph"
    graph.write_text(data_text("graphs/arith_one_reduce.graph"))
    return tmp_path, rules, graph


def main(*args):
    return cli.main([str(a) for a in args])


def test_id_strategy_leaves_graph_unchanged(arith):
    d, rules, graph = arith
    out = d / "out.graph"
    assert main("--graph", graph, "--rules", rules, "--strategy", "id", "--out", out) == 0
    assert parse_graph(out.read_text()) == parse_graph(graph.read_text())


def test_fail_exits_one(arith):
    d, rules, graph = arith
    out = d / "out.graph"
    assert main("--graph", graph, "--rules", rules, "--strategy", "fail", "--out", out) == 1
    assert out.read_text() == format_graph(parse_graph(graph.read_text()))


def test_reduce_runs_to_one(arith):
    d, rules, graph = arith
    out = d / "out.graph"
    assert main("--graph", graph, "--rules", rules, "--strategy", "repeat*(reduce)",
                "--out", out) == 0
    assert arithmetic.decode_number(parse_graph(out.read_text()).graph) == 1


def test_budget_exhaustion_exits_three(tmp_path):
    maze = labyrinth.generate_maze(4, 4, 3, with_exit=False)
    graph = tmp_path / "maze.graph"
    graph.write_text(format_graph(labyrinth.maze_graph(maze)))
    rules = tmp_path / "lab.rules"
    rules.write_text(data_text("labyrinth.rules"))
    code = main("--graph", graph, "--rules", rules, "--strategy", labyrinth.strategy_text(),
                "--max-steps", 5000)
    assert code == 3


@pytest.mark.parametrize("strategy", ["repeat*(", "nosuchrule", "while(reduce) do"])
def test_bad_strategy_exits_two(arith, strategy, capsys):
    _, rules, graph = arith
    assert main("--graph", graph, "--rules", rules, "--strategy", strategy) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_bad_graph_exits_two(arith):
    d, rules, _ = arith
    bad = d / "bad.graph"
    bad.write_text("NODES\n1 : S\n2 : S\nEDGES\n1.s_p -- 2.s_p\n1.s_p -- 2.s_a\n")
    assert main("--graph", bad, "--rules", rules, "--strategy", "id") == 2
    bad.write_text("NODES\n1 : Q\n")
    assert main("--graph", bad, "--rules", rules, "--strategy", "id") == 2
    bad.write_text("NODES\n1 : S\nPOSITION\n7\n")
    assert main("--graph", bad, "--rules", rules, "--strategy", "id") == 2


def test_missing_file_exits_two(arith):
    d, rules, _ = arith
    assert main("--graph", d / "nope.graph", "--rules", rules, "--strategy", "id") == 2


def test_bad_max_steps_exits_two(arith):
    _, rules, graph = arith
    assert main("--graph", graph, "--rules", rules, "--strategy", "id", "--max-steps", 0) == 2


def test_validate_only(arith, capsys):
    _, rules, graph = arith
    assert main("--graph", graph, "--rules", rules, "--strategy", "repeat*(reduce)",
                "--validate-only") == 0
    assert capsys.readouterr().out.startswith("ok:")


def test_strategy_file(arith):
    d, rules, graph = arith
    sf = d / "s.strat"
    sf.write_text("repeat*(reduce)\n")
    assert main("--graph", graph, "--rules", rules, "--strategy-file", sf) == 0


def test_trace_file_replays(arith):
    d, rules, graph = arith
    out, tr = d / "out.graph", d / "trace.jsonl"
    assert main("--graph", graph, "--rules", rules, "--strategy", "repeat*(reduce)",
                "--seed", 5, "--out", out, "--trace", tr) == 0
    rf = parse_rules(ARITH)
    initial = parse_graph(graph.read_text(), rf.signature)
    final = replay(Trace.from_jsonl(tr.read_text()), initial, rf.rules)
    assert final.graph == parse_graph(out.read_text()).graph


def test_rules_from_several_files(arith):
    d, _, graph = arith
    head, rest = ARITH.split("RULE open", 1)
    (d / "a.rules").write_text(head)
    (d / "b.rules").write_text("RULE open" + rest)
    code = main("--graph", graph, "--rules", d / "a.rules", "--rules", d / "b.rules",
                "--strategy", "repeat*(reduce); try(open)")
    assert code == 0
    (d / "c.rules").write_text(head)
    assert main("--graph", graph, "--rules", d / "a.rules", "--rules", d / "c.rules",
                "--strategy", "id") == 2


def test_export_dir(arith):
    d, rules, graph = arith
    exp = d / "dot"
    assert main("--graph", graph, "--rules", rules, "--strategy", "repeat*(reduce)",
                "--export-dir", exp) == 0
    files = sorted(p.name for p in exp.iterdir())
    assert files[0] == "step_0000.dot"
    assert len(files) == 4   # initial graph plus three reduce steps


def test_module_entry_point(arith):
    _, rules, graph = arith
    proc = subprocess.run([sys.executable, "-m", "portrewrite.cli", "--graph", str(graph),
                           "--rules", str(rules), "--strategy", "fail"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "Fail" in proc.stderr
