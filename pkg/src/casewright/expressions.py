"""ifPart boolean expressions evaluated against the case file.

The grammar is a small closed boolean language (see docs/expression-grammar.ebnf):

    expr       = or-expr
    or-expr    = and-expr { "or" and-expr }
    and-expr   = unary { "and" unary }
    unary      = "not" unary | comparison
    comparison = operand [ rel-op operand ]
    operand    = literal | predicate | path | "(" expr ")"
    predicate  = ("exists" | "count") "(" path ")"

Paths are slash-separated identifiers referring to case file items.  A bare
path used as a boolean must hold a boolean value at evaluation time; a missing
path inside exists() is false, a missing path anywhere else is an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Protocol, Union

from .errors import EvaluationError, ExpressionSyntaxError, ExpressionTypeError

Node = Union["Literal", "PathRef", "Exists", "Count", "Compare", "NotOp", "BoolOp"]

_REL_OPS = ("<=", ">=", "!=", "=", "<", ">")
_KEYWORDS = {"and", "or", "not", "true", "false", "exists", "count"}


@dataclass(frozen=True)
class Literal:
    value: bool | int | float | str


@dataclass(frozen=True)
class PathRef:
    path: str


@dataclass(frozen=True)
class Exists:
    path: str


@dataclass(frozen=True)
class Count:
    path: str


@dataclass(frozen=True)
class Compare:
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class NotOp:
    operand: Node


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" | "or"
    operands: tuple[Node, ...]


@dataclass(frozen=True)
class Expression:
    source: str
    ast: Node


class EvaluationContext(Protocol):
    """Read-only view of the case file; evaluation performs no writes."""

    def exists(self, path: str) -> bool: ...

    def count(self, path: str) -> int: ...

    def value(self, path: str) -> object: ...


class MappingContext:
    """Dict-backed context: paths map to values, lists/dicts are containers."""

    def __init__(self, items: dict[str, object]):
        self._items = items

    def exists(self, path: str) -> bool:
        return path in self._items

    def count(self, path: str) -> int:
        if path not in self._items:
            raise EvaluationError(f"missing case file item: {path}")
        value = self._items[path]
        if not isinstance(value, (list, dict, set, tuple)):
            raise EvaluationError(f"count() on non-container: {path}")
        return len(value)

    def value(self, path: str) -> object:
        if path not in self._items:
            raise EvaluationError(f"missing case file item: {path}")
        return self._items[path]


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<string>"[^"\n]*"|'[^'\n]*')
  | (?P<path>[A-Za-z_][A-Za-z0-9_\-]*(?:/[A-Za-z0-9_\-]+)*)
  | (?P<op><=|>=|!=|=|<|>)
  | (?P<lparen>\()
  | (?P<rparen>\))
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup or ""
        if kind != "ws":
            tokens.append(_Token(kind, m.group(0), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ExpressionSyntaxError(
                f"expected {kind}, found {tok.text or 'end of input'!r}", tok.pos
            )
        return tok

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "path" and tok.text == word

    # -- grammar ------------------------------------------------------------

    def parse(self) -> Node:
        node = self.or_expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ExpressionSyntaxError(f"trailing input {tok.text!r}", tok.pos)
        return node

    def or_expr(self) -> Node:
        parts = [self.and_expr()]
        while self.at_keyword("or"):
            self.next()
            parts.append(self.and_expr())
        if len(parts) == 1:
            return parts[0]
        return BoolOp("or", tuple(parts))

    def and_expr(self) -> Node:
        parts = [self.unary()]
        while self.at_keyword("and"):
            self.next()
            parts.append(self.unary())
        if len(parts) == 1:
            return parts[0]
        return BoolOp("and", tuple(parts))

    def unary(self) -> Node:
        if self.at_keyword("not"):
            self.next()
            return NotOp(self.unary())
        return self.comparison()

    def comparison(self) -> Node:
        left = self.operand()
        if self.peek().kind == "op":
            op = self.next().text
            right = self.operand()
            return Compare(op, left, right)
        return left

    def operand(self) -> Node:
        tok = self.peek()
        if tok.kind == "number":
            self.next()
            return Literal(float(tok.text) if "." in tok.text else int(tok.text))
        if tok.kind == "string":
            self.next()
            return Literal(tok.text[1:-1])
        if tok.kind == "lparen":
            self.next()
            node = self.or_expr()
            self.expect("rparen")
            return node
        if tok.kind == "path":
            if tok.text in ("true", "false"):
                self.next()
                return Literal(tok.text == "true")
            if tok.text in ("exists", "count"):
                self.next()
                self.expect("lparen")
                path_tok = self.expect("path")
                if path_tok.text in _KEYWORDS:
                    raise ExpressionSyntaxError(
                        f"keyword {path_tok.text!r} cannot be a path", path_tok.pos
                    )
                self.expect("rparen")
                return Exists(path_tok.text) if tok.text == "exists" else Count(path_tok.text)
            if tok.text in ("and", "or", "not"):
                raise ExpressionSyntaxError(f"unexpected keyword {tok.text!r}", tok.pos)
            self.next()
            return PathRef(tok.text)
        raise ExpressionSyntaxError(
            f"expected operand, found {tok.text or 'end of input'!r}", tok.pos
        )


def _check_types(node: Node) -> None:
    """Static well-typedness: connectives take booleans, comparisons take
    comparable leaves.  Path references are typed at evaluation time."""
    if isinstance(node, BoolOp):
        for part in node.operands:
            _check_boolean_operand(part)
    elif isinstance(node, NotOp):
        _check_boolean_operand(node.operand)
    elif isinstance(node, Compare):
        for side in (node.left, node.right):
            if isinstance(side, (BoolOp, NotOp, Compare)):
                raise ExpressionTypeError("comparison over a boolean connective")


def _check_boolean_operand(node: Node) -> None:
    if isinstance(node, Count):
        raise ExpressionTypeError("count() is numeric, not boolean")
    if isinstance(node, Literal) and not isinstance(node.value, bool):
        raise ExpressionTypeError(f"literal {node.value!r} used as a boolean")
    _check_types(node)


def parse_expression(text: str) -> Expression:
    """Parse an ifPart; raises ExpressionSyntaxError / ExpressionTypeError."""
    ast = _Parser(text).parse()
    _check_boolean_operand(ast)
    return Expression(source=text, ast=ast)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _eval(node: Node, ctx: EvaluationContext) -> object:
    if isinstance(node, Literal):
        return node.value
    if isinstance(node, PathRef):
        return ctx.value(node.path)
    if isinstance(node, Exists):
        return ctx.exists(node.path)
    if isinstance(node, Count):
        return ctx.count(node.path)
    if isinstance(node, NotOp):
        return not _eval_bool(node.operand, ctx)
    if isinstance(node, BoolOp):
        if node.op == "and":
            return all(_eval_bool(p, ctx) for p in node.operands)
        return any(_eval_bool(p, ctx) for p in node.operands)
    if isinstance(node, Compare):
        left = _eval(node.left, ctx)
        right = _eval(node.right, ctx)
        return _compare(node.op, left, right)
    raise AssertionError(f"unhandled node {node!r}")  # pragma: no cover


def _eval_bool(node: Node, ctx: EvaluationContext) -> bool:
    value = _eval(node, ctx)
    if not isinstance(value, bool):
        raise EvaluationError(f"expected a boolean, got {value!r}")
    return value


def _compare(op: str, left: object, right: object) -> bool:
    numeric = isinstance(left, (int, float)) and not isinstance(left, bool)
    numeric_r = isinstance(right, (int, float)) and not isinstance(right, bool)
    same_kind = (
        (numeric and numeric_r)
        or (isinstance(left, str) and isinstance(right, str))
        or (isinstance(left, bool) and isinstance(right, bool))
    )
    if not same_kind:
        raise EvaluationError(f"cannot compare {left!r} with {right!r}")
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    if isinstance(left, bool):
        raise EvaluationError("booleans only support = and !=")
    if op == "<":
        return left < right  # type: ignore[operator]
    if op == "<=":
        return left <= right  # type: ignore[operator]
    if op == ">":
        return left > right  # type: ignore[operator]
    if op == ">=":
        return left >= right  # type: ignore[operator]
    raise AssertionError(f"unhandled operator {op}")  # pragma: no cover


def evaluate_expression(expr: Expression, ctx: EvaluationContext) -> bool:
    """Deterministic boolean result; raises EvaluationError on a missing
    reference outside exists() or a runtime type mismatch."""
    return _eval_bool(expr.ast, ctx)


# ---------------------------------------------------------------------------
# Pretty printing (used by the parser round-trip tests)
# ---------------------------------------------------------------------------


def to_source(node: Node) -> str:
    if isinstance(node, Literal):
        if isinstance(node.value, bool):
            return "true" if node.value else "false"
        if isinstance(node.value, str):
            return f'"{node.value}"'
        return repr(node.value)
    if isinstance(node, PathRef):
        return node.path
    if isinstance(node, Exists):
        return f"exists({node.path})"
    if isinstance(node, Count):
        return f"count({node.path})"
    if isinstance(node, Compare):
        return f"{_wrap(node.left)} {node.op} {_wrap(node.right)}"
    if isinstance(node, NotOp):
        return f"not {_wrap(node.operand)}"
    if isinstance(node, BoolOp):
        return f" {node.op} ".join(_wrap(p) for p in node.operands)
    raise AssertionError(f"unhandled node {node!r}")  # pragma: no cover


def _wrap(node: Node) -> str:
    if isinstance(node, (BoolOp, Compare, NotOp)):
        return f"({to_source(node)})"
    return to_source(node)
