"""A small arithmetic expression language over coordinates x1..xN.

Grammar (whitespace is insignificant)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?          # right-associative, integer exponent
    atom    := NUMBER | "pi" | xK | FUNC "(" expr ")" | "(" expr ")"

with FUNC one of sin, cos, exp, log, sqrt, atan.  ``-x1^2`` is ``-(x1^2)``
and ``2^3^2`` is ``2^(3^2)``.  Exponents must fold to an integer constant.

Compiled expressions evaluate on floats, on Taylor scalars and on numpy
arrays (real or complex); undefined operations raise DomainError.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .. import taylor as T
from ..errors import DomainError, ExpressionSyntaxError

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "atan")
CONSTANTS = {"pi": math.pi}


# AST ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    index: int  # 1-based, x1 is Var(1)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Num | Const | Var | Neg | BinOp | Pow | Call


# tokens ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    line: int
    column: int
    value: float | None = field(default=None, compare=False)


_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPS = "+-*/^(),"


def tokenize(text: str, where: str | None = None) -> list[Token]:
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            col, i = col + 1, i + 1
            continue
        if ch == "−":  # typographic minus
            ch = "-"
        if ch in _OPS:
            tokens.append(Token("op", ch, line, col))
            col, i = col + 1, i + 1
            continue
        m = _NUMBER.match(text, i)
        if m:
            tokens.append(Token("num", m.group(), line, col, float(m.group())))
        else:
            m = _NAME.match(text, i)
            if not m:
                raise ExpressionSyntaxError(f"unexpected character {ch!r}", line, col, where)
            tokens.append(Token("name", m.group(), line, col))
        col += m.end() - i
        i = m.end()
    tokens.append(Token("end", "", line, col))
    return tokens


# parser ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, where: str | None):
        self.where = where
        self.tokens = tokenize(text, where)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = self.peek() if tok is None else tok
        return ExpressionSyntaxError(message, tok.line, tok.column, self.where)

    def expect(self, text):
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise self.error(f"expected {text!r}, found {found}")
        return self.advance()

    def at_op(self, *ops) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in ops

    def parse(self) -> Expr:
        if self.peek().kind == "end":
            raise self.error("empty expression")
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise self.error(f"unexpected {tok.text!r} after complete expression")
        return node

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.at_op("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if not self.at_op("^"):
            return base
        caret = self.advance()
        start = self.peek()
        exponent = self.unary()
        value = _fold_constant(exponent)
        if value is None or not float(value).is_integer():
            raise self.error("exponent must be an integer constant", start if start.kind != "end" else caret)
        return Pow(base, int(value))

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(tok.value)
        if tok.kind == "name":
            self.advance()
            name = tok.text
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if name in CONSTANTS:
                return Const(name)
            m = re.fullmatch(r"x([1-9]\d*)", name)
            if m:
                return Var(int(m.group(1)))
            raise self.error(f"unknown name {name!r}", tok)
        if self.at_op("("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {tok.text!r}")


def parse_expr(text: str, where: str | None = None) -> Expr:
    """Parse one expression; errors carry line, column and ``where``."""
    if not isinstance(text, str):
        raise ExpressionSyntaxError(f"expected a string, got {type(text).__name__}", 1, 1, where)
    return _Parser(text, where).parse()


def _fold_constant(node):
    """Value of a variable-free integer-power/arithmetic tree, else None."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Neg):
        v = _fold_constant(node.operand)
        return None if v is None else -v
    if isinstance(node, Pow):
        v = _fold_constant(node.base)
        if v is None or (v == 0 and node.exponent < 0):
            return None
        return v**node.exponent
    if isinstance(node, BinOp) and node.op in "+-*":
        lv, rv = _fold_constant(node.left), _fold_constant(node.right)
        if lv is None or rv is None:
            return None
        return {"+": lv + rv, "-": lv - rv, "*": lv * rv}[node.op]
    return None


# printer ----------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_PREC_UNARY, _PREC_POW, _PREC_ATOM = 3, 4, 5


def _prec(node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC_UNARY
    if isinstance(node, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _wrap(node, min_prec):
    s = to_text(node)
    return f"({s})" if _prec(node) < min_prec else s


def _num_text(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(float(v))


def to_text(node: Expr) -> str:
    """Minimal-parenthesis text; parse(to_text(e)) == e."""
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _PREC_UNARY)
    if isinstance(node, Pow):
        exp = str(node.exponent) if node.exponent >= 0 else f"({node.exponent})"
        return f"{_wrap(node.base, _PREC_ATOM)}^{exp}"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        # left-associative: the right operand needs strictly higher precedence
        return f"{_wrap(node.left, p)} {node.op} {_wrap(node.right, p + 1)}"
    raise TypeError(f"not an expression node: {node!r}")


def max_variable(node: Expr) -> int:
    """Largest coordinate index used (0 for constant expressions)."""
    if isinstance(node, Var):
        return node.index
    if isinstance(node, (Neg,)):
        return max_variable(node.operand)
    if isinstance(node, Pow):
        return max_variable(node.base)
    if isinstance(node, Call):
        return max_variable(node.arg)
    if isinstance(node, BinOp):
        return max(max_variable(node.left), max_variable(node.right))
    return 0


# evaluation ---------------------------------------------------------------------------


def _low(v) -> float:
    """Smallest real part of a scalar, Taylor scalar or array."""
    if isinstance(v, T.Taylor):
        return v.value
    if isinstance(v, np.ndarray):
        return float(np.min(v.real))
    return float(np.real(v))


def _has_zero(v) -> bool:
    if isinstance(v, T.Taylor):
        return v.value == 0.0
    if isinstance(v, np.ndarray):
        return bool(np.any(v.real == 0.0))
    return np.real(v) == 0.0


def _is_float(v) -> bool:
    return isinstance(v, (float, int, np.floating)) or (isinstance(v, np.ndarray) and v.dtype.kind == "f")


def _log(v, text):
    if _low(v) <= 0.0:
        raise DomainError(f"log of nonpositive value {_low(v):.6g} in {text}")
    return T.log(v)


def _sqrt(v, text):
    lo = _low(v)
    if lo < 0.0 or (lo == 0.0 and not _is_float(v)):
        # sqrt is not differentiable at 0, so only plain floats may touch it
        raise DomainError(f"sqrt of {'negative' if lo < 0 else 'zero'} value {lo:.6g} in {text}")
    return T.sqrt(v)


_CALLS = {
    "sin": lambda v, _: T.sin(v),
    "cos": lambda v, _: T.cos(v),
    "exp": lambda v, _: T.exp(v),
    "atan": lambda v, _: T.atan(v),
    "log": _log,
    "sqrt": _sqrt,
}


def compile_expr(node: Expr):
    """Closure ``f(x)`` with x indexable by coordinate (x[0] is x1)."""
    if isinstance(node, Num):
        c = node.value
        return lambda x: c
    if isinstance(node, Const):
        c = CONSTANTS[node.name]
        return lambda x: c
    if isinstance(node, Var):
        i = node.index - 1
        return lambda x: x[i]
    if isinstance(node, Neg):
        f = compile_expr(node.operand)
        return lambda x: -f(x)
    if isinstance(node, Call):
        f = compile_expr(node.arg)
        fn = _CALLS[node.func]
        text = to_text(node)
        return lambda x: fn(f(x), text)
    if isinstance(node, Pow):
        f = compile_expr(node.base)
        n = node.exponent
        if n >= 0:
            return lambda x: f(x) ** n
        text = to_text(node)

        def neg_pow(x):
            v = f(x)
            if _has_zero(v):
                raise DomainError(f"zero raised to a negative power in {text}")
            return 1.0 / v ** (-n)

        return neg_pow
    if isinstance(node, BinOp):
        lf, rf = compile_expr(node.left), compile_expr(node.right)
        if node.op == "+":
            return lambda x: lf(x) + rf(x)
        if node.op == "-":
            return lambda x: lf(x) - rf(x)
        if node.op == "*":
            return lambda x: lf(x) * rf(x)
        text = to_text(node)

        def div(x):
            d = rf(x)
            if _has_zero(d):
                raise DomainError(f"division by zero in {text}")
            return lf(x) / d

        return div
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(node: Expr, x) -> float:
    return compile_expr(node)(x)
