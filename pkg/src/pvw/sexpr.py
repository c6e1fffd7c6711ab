"""A small S-expression reader that keeps line and column positions."""
from __future__ import annotations

import re
from dataclasses import dataclass, field


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    text: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def head(self) -> str:
        if self.items and isinstance(self.items[0], Atom):
            return self.items[0].text
        return ""

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def tokenize(text: str):
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        tok = m.group()
        col = m.start() - line_start + 1
        if tok[0].isspace() or tok[0] == ";":
            nl = tok.count("\n")
            if nl:
                line += nl
                line_start = m.start() + tok.rindex("\n") + 1
            continue
        yield tok, line, col


def read_all(text: str) -> list:
    """Every top-level expression in ``text``."""
    stack = [[]]
    opens = []
    for tok, line, col in tokenize(text):
        if tok == "(":
            stack.append([])
            opens.append((line, col))
        elif tok == ")":
            if not opens:
                raise ParseError("unexpected ')'", line, col)
            items = stack.pop()
            ol, oc = opens.pop()
            stack[-1].append(SList(tuple(items), ol, oc))
        else:
            stack[-1].append(Atom(tok, line, col))
    if opens:
        raise ParseError("unclosed '('", *opens[-1])
    return stack[0]


def read(text: str):
    """Exactly one expression."""
    exprs = read_all(text)
    if not exprs:
        raise ParseError("empty input", 1, 1)
    if len(exprs) > 1:
        extra = exprs[1]
        raise ParseError("trailing input after expression", extra.line, extra.col)
    return exprs[0]


def dump(expr, indent: int = 0, width: int = 100) -> str:
    """Render an expression; lists that do not fit on one line break after the head."""
    flat = _flat(expr)
    if len(flat) + indent <= width or isinstance(expr, Atom) or len(expr) < 2:
        return flat
    pad = " " * (indent + 2)
    head = dump(expr.items[0], indent + 1, width)
    rest = "\n".join(pad + dump(e, indent + 2, width) for e in expr.items[1:])
    return f"({head}\n{rest})"


def _flat(expr) -> str:
    if isinstance(expr, Atom):
        return expr.text
    return "(" + " ".join(_flat(e) for e in expr.items) + ")"


def sl(*items) -> SList:
    """Build a list, turning strings and ints into atoms."""
    return SList(tuple(i if isinstance(i, (Atom, SList)) else Atom(str(i)) for i in items))
