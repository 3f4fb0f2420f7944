"""Shared helpers for the case-study encodings."""
from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

from portrewrite.textformat import RuleFile, parse_rules


def data_text(name: str) -> str:
    return resources.files("portrewrite.corpus").joinpath("data").joinpath(name).read_text()


@lru_cache(maxsize=None)
def load_rules(name: str) -> RuleFile:
    return parse_rules(data_text(name))


def expand_macros(text: str, macros: dict[str, str]) -> str:
    """Replace macro names by their parenthesised bodies until none remain."""
    for _ in range(50):
        changed = False
        for name, body in macros.items():
            new = re.sub(rf"(?<![\w*+]){re.escape(name)}(?!\w)", f"({body})", text)
            if new != text:
                text, changed = new, True
        if not changed:
            return text
    raise ValueError("macro expansion does not terminate")


class RuleBuilder:
    """Assemble a rule in code: two graph builders plus interface bookkeeping."""

    def __init__(self, signature, name: str):
        from portrewrite.core import GraphBuilder

        self.name = name
        self.signature = signature
        self.lhs = GraphBuilder(signature, start=1)
        self.rhs = GraphBuilder(signature, start=101)
        self.interface: dict = {}
        self.wires: list = []
        self.m: set = set()
        self.constraints: dict = {}

    def route(self, l: int, lp: str, r: int, rp: str) -> None:
        self.interface.setdefault((l, lp), set()).add((r, rp))

    def wire(self, a: int, pa: str, b: int, pb: str) -> None:
        self.wires.append(((a, pa), (b, pb)))

    def require(self, l: int, port: str, kind) -> None:
        self.constraints[(l, port)] = kind

    def build(self):
        from portrewrite.rewriting import Rule

        return Rule(self.name, self.lhs.build(), self.rhs.build(),
                    {k: frozenset(v) for k, v in self.interface.items()},
                    tuple(self.wires), frozenset(self.m), dict(self.constraints))
