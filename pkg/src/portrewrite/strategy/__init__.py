"""Strategy language: syntax tree, parser, engine and derivation traces."""
from portrewrite.strategy import ast
from portrewrite.strategy.engine import (
    FAIL,
    ID,
    Engine,
    EngineConfig,
    NonTermination,
    RunResult,
    StrategyError,
    eval_application,
    eval_position,
    eval_strategy,
    replay,
)
from portrewrite.strategy.parser import StrategySyntaxError, UnknownRuleError, parse_strategy
from portrewrite.strategy.trace import ReplayDivergence, Step, Trace

__all__ = [
    "ast", "FAIL", "ID", "Engine", "EngineConfig", "NonTermination", "RunResult",
    "StrategyError", "eval_application", "eval_position", "eval_strategy", "replay",
    "StrategySyntaxError", "UnknownRuleError", "parse_strategy", "ReplayDivergence",
    "Step", "Trace",
]
