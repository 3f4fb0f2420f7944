"""Abstract syntax for position transformations, applications and strategies."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


# property predicates

@dataclass(frozen=True)
class NameIs:
    name: str


@dataclass(frozen=True)
class PortStateIs:
    port: str
    state: str


@dataclass(frozen=True)
class HasFreePort:
    """The ``interface`` atom: the node has at least one free port."""


@dataclass(frozen=True)
class PredAnd:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class PredOr:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class PredNot:
    operand: "Pred"


Pred = Union[NameIs, PortStateIs, HasFreePort, PredAnd, PredOr, PredNot]


# position transformations

@dataclass(frozen=True)
class CrtPos:
    pass


@dataclass(frozen=True)
class AllSuc:
    pass


@dataclass(frozen=True)
class OneSuc:
    pass


@dataclass(frozen=True)
class NextSuc:
    pass


@dataclass(frozen=True)
class SetPos:
    ids: tuple[int, ...]


WHOLE_GRAPH = "graph"
CURRENT_POS = "pos"


@dataclass(frozen=True)
class Property:
    pred: Pred
    scope: str = WHOLE_GRAPH


@dataclass(frozen=True)
class Union_:
    left: "PosExpr"
    right: "PosExpr"


@dataclass(frozen=True)
class Inter:
    left: "PosExpr"
    right: "PosExpr"


@dataclass(frozen=True)
class Compl:
    operand: "PosExpr"


@dataclass(frozen=True)
class Minus:
    left: "PosExpr"
    right: "PosExpr"


PosExpr = Union[CrtPos, AllSuc, OneSuc, NextSuc, SetPos, Property, Union_, Inter, Compl, Minus]


# applications

@dataclass(frozen=True)
class IdA:
    pass


@dataclass(frozen=True)
class FailA:
    pass


@dataclass(frozen=True)
class RuleApp:
    rule: str


@dataclass(frozen=True)
class Par:
    left: RuleApp
    right: RuleApp


@dataclass(frozen=True)
class Interleave:
    left: RuleApp
    right: RuleApp


@dataclass(frozen=True)
class Multi:
    operand: RuleApp
    min: int
    max: int


AppExpr = Union[IdA, FailA, RuleApp, Par, Interleave, Multi]


# strategies

@dataclass(frozen=True)
class Pos:
    expr: PosExpr


@dataclass(frozen=True)
class App:
    expr: AppExpr


@dataclass(frozen=True)
class Seq:
    first: "Strategy"
    second: "Strategy"


@dataclass(frozen=True)
class Amb:
    left: "Strategy"
    right: "Strategy"


@dataclass(frozen=True)
class PPick:
    options: tuple["Strategy", ...]

    def __post_init__(self):
        if not self.options:
            raise ValueError("ppick needs at least one strategy")


@dataclass(frozen=True)
class While:
    cond: "Strategy"
    body: "Strategy"
    min: int = -1
    max: int = -1


@dataclass(frozen=True)
class IfThenElse:
    cond: "Strategy"
    then: "Strategy"
    orelse: "Strategy"


@dataclass(frozen=True)
class PNotEmpty:
    pass


@dataclass(frozen=True)
class Atomic:
    body: "Strategy"


Strategy = Union[Pos, App, Seq, Amb, PPick, While, IfThenElse, PNotEmpty, Atomic]

ID = App(IdA())
FAIL = App(FailA())


# derived combinators, exactly as their defining expansions

def repeat_star(s: Strategy) -> While:
    return While(s, s, -1, -1)


def repeat_plus(s: Strategy) -> While:
    return While(s, s, 1, -1)


def not_(s: Strategy) -> IfThenElse:
    return IfThenElse(s, FAIL, ID)


def orelse(s: Strategy, t: Strategy) -> IfThenElse:
    return IfThenElse(s, s, t)


def try_(s: Strategy) -> IfThenElse:
    return IfThenElse(s, s, ID)


def seq(*parts: Strategy) -> Strategy:
    """Right-nested sequence of one or more strategies."""
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Seq(p, out)
    return out


def orelse_chain(*parts: Strategy) -> Strategy:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = orelse(p, out)
    return out


def rule(name: str) -> App:
    return App(RuleApp(name))


def rule_names(s) -> set[str]:
    """All rule names referenced anywhere in a strategy."""
    out: set[str] = set()

    def walk(x):
        if isinstance(x, RuleApp):
            out.add(x.rule)
            return
        if isinstance(x, tuple):
            for y in x:
                walk(y)
            return
        fields = getattr(x, "__dataclass_fields__", None)
        if fields:
            for f in fields:
                walk(getattr(x, f))

    walk(s)
    return out
