"""S-expression reader shared by every on-disk format.

Documents are sequences of nodes: symbols, integers, double-quoted
strings, and parenthesized lists.  Semicolon comments run to end of line.
Every node carries the line and column where it started so loaders can
point at the offending form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union


class SexprError(Exception):
    def __init__(self, message: str, line: int, col: int, source: str = ""):
        where = "%s:%d:%d" % (source or "<input>", line, col)
        super().__init__("%s: %s" % (where, message))
        self.message = message
        self.line = line
        self.col = col
        self.source = source


@dataclass(frozen=True)
class Symbol:
    name: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class String:
    value: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return quote_string(self.value)


@dataclass(frozen=True)
class Integer:
    value: int
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class NodeList:
    items: tuple["Node", ...]
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return "(%s)" % " ".join(str(i) for i in self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator["Node"]:
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def head(self) -> str | None:
        """The leading symbol's name, if the list starts with a symbol."""
        if self.items and isinstance(self.items[0], Symbol):
            return self.items[0].name
        return None


Node = Union[Symbol, String, Integer, NodeList]

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>;[^\n]*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<int>-?\d+(?![^\s();"]))
  | (?P<symbol>[^\s();"]+)
""", re.VERBOSE)

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


def quote_string(value: str) -> str:
    out = value.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t")
    return '"%s"' % out


def _unescape(body: str, line: int, col: int, source: str) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            key = body[i + 1]
            if key not in _ESCAPES:
                raise SexprError("unknown escape \\%s in string" % key,
                                 line, col, source)
            out.append(_ESCAPES[key])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _tokens(text: str, source: str):
    line = 1
    bol = 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SexprError("unreadable character %r" % text[pos],
                             line, pos - bol + 1, source)
        kind = m.lastgroup
        col = pos - bol + 1
        value = m.group()
        pos = m.end()
        if kind in ("ws", "comment"):
            newlines = value.count("\n")
            if newlines:
                line += newlines
                bol = pos - (len(value) - value.rfind("\n") - 1)
            continue
        yield kind, value, line, col
    yield "eof", "", line, pos - bol + 1


def parse_nodes(text: str, source: str = "") -> tuple[Node, ...]:
    """All top-level nodes in the text."""
    stack: list[list[Node]] = [[]]
    opens: list[tuple[int, int]] = []
    for kind, value, line, col in _tokens(text, source):
        if kind == "open":
            stack.append([])
            opens.append((line, col))
        elif kind == "close":
            if not opens:
                raise SexprError("unmatched ')'", line, col, source)
            items = stack.pop()
            at = opens.pop()
            stack[-1].append(NodeList(tuple(items), at[0], at[1]))
        elif kind == "string":
            stack[-1].append(String(_unescape(value[1:-1], line, col, source),
                                    line, col))
        elif kind == "int":
            stack[-1].append(Integer(int(value), line, col))
        elif kind == "symbol":
            stack[-1].append(Symbol(value, line, col))
        else:
            if opens:
                raise SexprError("unclosed '(' at end of input",
                                 opens[-1][0], opens[-1][1], source)
    return tuple(stack[0])


def parse_one(text: str, source: str = "") -> Node:
    """Exactly one top-level node."""
    nodes = parse_nodes(text, source)
    if len(nodes) != 1:
        raise SexprError("expected exactly one node, found %d" % len(nodes),
                         1, 1, source)
    return nodes[0]


def format_node(node: Node, indent: int = 0, width: int = 76) -> str:
    """Pretty renderer: short lists on one line, long ones one item per
    line under the head."""
    flat = str(node)
    if not isinstance(node, NodeList) or indent + len(flat) <= width:
        return flat
    items = node.items
    if not items:
        return "()"
    pad = " " * (indent + 2)
    parts = [format_node(items[0], indent + 1, width)]
    for item in items[1:]:
        parts.append("\n" + pad + format_node(item, indent + 2, width))
    return "(%s)" % "".join(parts)
