"""A small expression language for metric entries and map components.

The grammar (normative copy in ``docs/grammar.md``)::

    expr     = term , { ("+" | "-") , term } ;
    term     = unary , { ("*" | "/") , unary } ;
    unary    = "-" , unary | power ;
    power    = atom , [ "^" , exponent ] ;
    exponent = [ "-" ] , INT | "(" , [ "-" ] , INT , ")" ;
    atom     = NUMBER | NAME | FUNC , "(" , expr , ")" | "(" , expr , ")" ;

Expressions are evaluated in whatever algebra the variables are bound to, so
binding ``x`` to a jet yields derivatives and binding it to a Laplace-algebra
element yields the restriction to the L-neighbourhood.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .scalars import EXACT, FLOAT64, check_mode
from .weil import FUNCTIONS, WeilElement, lift_univariate, scalar_part

CALLABLE = frozenset(FUNCTIONS - {"square", "reciprocal"})


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class NonIntegerExponentError(ParseError):
    pass


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class Number:
    value: Fraction
    text: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Ast"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class Power:
    base: "Ast"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Ast"


Ast = Union[Number, Var, Unary, Binary, Power, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int


def _byte_offset(text: str, i: int) -> int:
    return len(text[:i].encode("utf-8"))


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    while True:
        while i < len(text) and text[i].isspace():
            i += 1
        if i >= len(text):
            toks.append(_Tok("end", "", _byte_offset(text, i)))
            return toks
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", _byte_offset(text, i))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), _byte_offset(text, m.start(kind))))
        i = m.end()


class _Parser:
    def __init__(self, text: str, names: frozenset[str]):
        self.toks = _tokenize(text)
        self.pos = 0
        self.names = names

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def advance(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def expect(self, op: str) -> None:
        if not self.at(op):
            raise ParseError(f"expected {op!r}", self.tok.offset)
        self.advance()

    def parse(self) -> Ast:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.offset)
        return node

    def expr(self) -> Ast:
        node = self.term()
        while self.at("+", "-"):
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Ast:
        node = self.unary()
        while self.at("*", "/"):
            op = self.advance().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Ast:
        if self.at("-"):
            self.advance()
            return Unary("-", self.unary())
        return self.power()

    def power(self) -> Ast:
        base = self.atom()
        if self.at("^"):
            self.advance()
            return Power(base, self.exponent())
        return base

    def exponent(self) -> int:
        start = self.tok.offset
        paren = self.at("(")
        if paren:
            self.advance()
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        t = self.tok
        if t.kind == "end":
            raise ParseError("expected an exponent", t.offset)
        if t.kind != "num" or not t.text.isdigit():
            raise NonIntegerExponentError("exponent must be an integer literal", start)
        self.advance()
        if paren:
            if not self.at(")"):
                if self.tok.kind == "end":
                    raise ParseError("expected ')'", self.tok.offset)
                raise NonIntegerExponentError("exponent must be an integer literal", start)
            self.advance()
        if self.at("^"):
            raise NonIntegerExponentError("exponent must be an integer literal", start)
        return sign * int(t.text)

    def atom(self) -> Ast:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Number(Fraction(t.text), t.text)
        if t.kind == "name":
            self.advance()
            if t.text in CALLABLE and self.at("("):
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg)
            if t.text not in self.names:
                raise UnknownIdentifierError(f"unknown identifier {t.text!r}", t.offset)
            return Var(t.text)
        if self.at("("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "end":
            raise ParseError("unexpected end of input", t.offset)
        raise ParseError(f"unexpected {t.text!r}", t.offset)


def parse(text: str, vars: Sequence[str]) -> Ast:
    """Parse ``text``; every bare identifier must be one of ``vars``."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    clash = set(vars) & CALLABLE
    if clash:
        raise ValueError(f"variable names shadow functions: {sorted(clash)}")
    return _Parser(text, frozenset(vars)).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_UNARY, _POWER, _ATOM = 3, 4, 5


def _prec(node: Ast) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary):
        return _UNARY
    if isinstance(node, Power):
        return _POWER
    return _ATOM


def to_text(node: Ast) -> str:
    """Render with the minimal parentheses needed to reparse the same tree."""
    if isinstance(node, Number):
        return node.text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Unary):
        inner = to_text(node.operand)
        return f"-({inner})" if _prec(node.operand) < _UNARY else f"-{inner}"
    if isinstance(node, Power):
        base = to_text(node.base)
        if _prec(node.base) < _ATOM:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    p = _PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def variables(node: Ast) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Number):
        return set()
    if isinstance(node, Unary):
        return variables(node.operand)
    if isinstance(node, Power):
        return variables(node.base)
    if isinstance(node, Call):
        return variables(node.arg)
    return variables(node.left) | variables(node.right)


def infer_mode(env: Mapping[str, object]) -> str:
    for v in env.values():
        if isinstance(scalar_part(v), float):
            return FLOAT64
    return EXACT


def evaluate(node: Ast, env: Mapping[str, object], mode: str | None = None):
    """Evaluate ``node`` with variables bound to scalars or algebra elements."""
    mode = infer_mode(env) if mode is None else check_mode(mode)
    return _eval(node, env, mode)


def _eval(node: Ast, env, mode):
    if isinstance(node, Number):
        return node.value if mode == EXACT else float(node.value)
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise EvaluationError(f"variable {node.name!r} is not bound") from None
    if isinstance(node, Unary):
        return -_eval(node.operand, env, mode)
    if isinstance(node, Power):
        base = _eval(node.base, env, mode)
        if node.exponent < 0 and scalar_part(base) == 0:
            raise ZeroDivisionError("negative power of an element with zero value component")
        return base ** node.exponent
    if isinstance(node, Call):
        return lift_univariate(node.func, _eval(node.arg, env, mode))
    a = _eval(node.left, env, mode)
    b = _eval(node.right, env, mode)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if scalar_part(b) == 0:
        raise ZeroDivisionError("division by an expression whose value is zero")
    if not isinstance(a, WeilElement) and not isinstance(b, WeilElement) and mode == EXACT:
        return Fraction(a) / Fraction(b)
    return a / b
