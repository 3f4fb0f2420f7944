"""Recursive-descent parser for the concrete strategy syntax.

``;`` is right-associative; ``orelse`` and ``+`` share one looser,
right-associative level. Derived forms (``repeat*``, ``repeat+``, ``not``,
``try``, ``orelse``) are expanded while parsing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from portrewrite.core import PortGraphError
from portrewrite.strategy import ast as A


class StrategySyntaxError(PortGraphError):
    def __init__(self, msg: str, line: int, col: int):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {msg}")


class UnknownRuleError(StrategySyntaxError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str   # ident, int, string, punct, end
    text: str
    line: int
    col: int


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<string>"[^"]*")
  | (?P<repeat>repeat[*+])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>-?\d+)
  | (?P<punct>==|[(),;+])
""", re.VERBOSE)

KEYWORDS = {
    "id", "fail", "par", "ipar", "multi", "crtpos", "allsuc", "onesuc", "nextsuc",
    "setpos", "property", "union", "inter", "compl", "minus", "while", "do", "min",
    "max", "if", "then", "else", "pnotempty", "atomic", "ppick", "not", "try",
    "orelse", "graph", "pos",
}
_POSITION_HEADS = {"crtpos", "allsuc", "onesuc", "nextsuc", "setpos", "property",
                   "union", "inter", "compl", "minus"}


def tokenize(text: str) -> list[Token]:
    out = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise StrategySyntaxError(f"unexpected character {text[i]!r}", line, i - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            chunk = m.group()
            if "\n" in chunk:
                line += chunk.count("\n")
                line_start = i + chunk.rindex("\n") + 1
        else:
            k = "ident" if kind == "repeat" else kind
            out.append(Token(k, m.group(), line, i - line_start + 1))
        i = m.end()
    out.append(Token("end", "", line, i - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str, known_rules: Optional[Iterable[str]]):
        self.toks = tokenize(text)
        self.i = 0
        self.known = None if known_rules is None else set(known_rules)

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise StrategySyntaxError(msg, tok.line, tok.col)

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind != "string" and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def integer(self) -> int:
        if self.tok.kind != "int":
            self.error(f"expected an integer, found {self.tok.text!r}")
        return int(self.next().text)

    # strategies

    def parse(self) -> A.Strategy:
        s = self.strategy()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return s

    def strategy(self) -> A.Strategy:
        left = self.sequence()
        if self.at("orelse"):
            self.next()
            return A.orelse(left, self.strategy())
        if self.at("+"):
            self.next()
            return A.Amb(left, self.strategy())
        return left

    def sequence(self) -> A.Strategy:
        first = self.unary()
        if self.at(";"):
            self.next()
            return A.Seq(first, self.sequence())
        return first

    def wrapped(self) -> A.Strategy:
        self.expect("(")
        s = self.strategy()
        self.expect(")")
        return s

    def unary(self) -> A.Strategy:
        t = self.tok
        if t.kind == "punct" and t.text == "(":
            return self.wrapped()
        if t.kind != "ident":
            self.error(f"expected a strategy, found {t.text or 'end of input'!r}")
        word = t.text
        if word == "repeat*":
            self.next()
            return A.repeat_star(self.wrapped())
        if word == "repeat+":
            self.next()
            return A.repeat_plus(self.wrapped())
        if word == "not":
            self.next()
            return A.not_(self.wrapped())
        if word == "try":
            self.next()
            return A.try_(self.wrapped())
        if word == "atomic":
            self.next()
            return A.Atomic(self.wrapped())
        if word == "pnotempty":
            self.next()
            return A.PNotEmpty()
        if word == "ppick":
            self.next()
            self.expect("(")
            opts = [self.strategy()]
            while self.at(","):
                self.next()
                opts.append(self.strategy())
            self.expect(")")
            return A.PPick(tuple(opts))
        if word == "while":
            self.next()
            cond = self.wrapped()
            self.expect("do")
            body = self.wrapped()
            self.expect("min")
            self.expect("(")
            lo = self.integer()
            self.expect(")")
            self.expect("max")
            self.expect("(")
            hi = self.integer()
            self.expect(")")
            return A.While(cond, body, lo, hi)
        if word == "if":
            self.next()
            cond = self.wrapped()
            self.expect("then")
            then = self.wrapped()
            self.expect("else")
            other = self.wrapped()
            return A.IfThenElse(cond, then, other)
        if word in _POSITION_HEADS:
            return A.Pos(self.position())
        return A.App(self.application())

    # applications

    def rule_name(self) -> A.RuleApp:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"expected a rule name, found {t.text or 'end of input'!r}")
        self.next()
        if self.known is not None and t.text not in self.known:
            raise UnknownRuleError(f"unknown rule {t.text!r}", t.line, t.col)
        return A.RuleApp(t.text)

    def application(self) -> A.AppExpr:
        word = self.tok.text
        if word == "id":
            self.next()
            return A.IdA()
        if word == "fail":
            self.next()
            return A.FailA()
        if word in ("par", "ipar"):
            self.next()
            self.expect("(")
            a = self.rule_name()
            self.expect(",")
            b = self.rule_name()
            self.expect(")")
            return A.Par(a, b) if word == "par" else A.Interleave(a, b)
        if word == "multi":
            self.next()
            self.expect("(")
            a = self.rule_name()
            self.expect(",")
            lo = self.integer()
            self.expect(",")
            hi = self.integer()
            self.expect(")")
            return A.Multi(a, lo, hi)
        return self.rule_name()

    # positions

    def position(self) -> A.PosExpr:
        t = self.next()
        word = t.text
        if word == "crtpos":
            return A.CrtPos()
        if word == "allsuc":
            return A.AllSuc()
        if word == "onesuc":
            return A.OneSuc()
        if word == "nextsuc":
            return A.NextSuc()
        if word == "setpos":
            self.expect("(")
            ids = [self.integer()]
            while self.at(","):
                self.next()
                ids.append(self.integer())
            self.expect(")")
            return A.SetPos(tuple(ids))
        if word == "property":
            self.expect("(")
            pred = self.pred()
            self.expect(",")
            scope = self.next()
            if scope.text not in (A.WHOLE_GRAPH, A.CURRENT_POS):
                self.error("property scope must be 'graph' or 'pos'", scope)
            self.expect(")")
            return A.Property(pred, scope.text)
        if word == "compl":
            self.expect("(")
            inner = self.position_operand()
            self.expect(")")
            return A.Compl(inner)
        if word in ("union", "inter", "minus"):
            self.expect("(")
            a = self.position_operand()
            self.expect(",")
            b = self.position_operand()
            self.expect(")")
            return {"union": A.Union_, "inter": A.Inter, "minus": A.Minus}[word](a, b)
        self.error(f"expected a position transformation, found {word!r}", t)

    def position_operand(self) -> A.PosExpr:
        if self.tok.kind != "ident" or self.tok.text not in _POSITION_HEADS:
            self.error(f"expected a position transformation, found {self.tok.text!r}")
        return self.position()

    # predicates

    def pred(self) -> A.Pred:
        left = self.pred_and()
        if self.at("or"):
            self.next()
            return A.PredOr(left, self.pred())
        return left

    def pred_and(self) -> A.Pred:
        left = self.pred_not()
        if self.at("and"):
            self.next()
            return A.PredAnd(left, self.pred_and())
        return left

    def pred_not(self) -> A.Pred:
        if self.at("not"):
            self.next()
            return A.PredNot(self.pred_not())
        if self.at("("):
            self.next()
            p = self.pred()
            self.expect(")")
            return p
        return self.atom()

    def string(self) -> str:
        if self.tok.kind != "string":
            self.error(f"expected a string literal, found {self.tok.text!r}")
        return self.next().text[1:-1]

    def atom(self) -> A.Pred:
        word = self.tok.text
        if word == "interface":
            self.next()
            return A.HasFreePort()
        if word == "name":
            self.next()
            self.expect("==")
            return A.NameIs(self.string())
        if word == "portstate":
            self.next()
            self.expect("(")
            t = self.next()
            if t.kind not in ("ident", "string"):
                self.error("expected a port name", t)
            port = t.text[1:-1] if t.kind == "string" else t.text
            self.expect(")")
            self.expect("==")
            return A.PortStateIs(port, self.string())
        self.error(f"expected a predicate, found {word!r}")


def parse_strategy(text: str, known_rules: Optional[Iterable[str]] = None) -> A.Strategy:
    """Parse strategy text; with ``known_rules`` given, unknown names are errors."""
    return _Parser(text, known_rules).parse()
