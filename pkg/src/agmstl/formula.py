"""STL formula syntax tree and text-format parser.

Formulas are built from predicates over named signal channels
(``x > 0.5``), the Boolean connectives ``!``, ``&&``, ``||``, ``->``
and the bounded temporal operators ``G[a,b]``, ``F[a,b]``, ``U[a,b]``.
Interval bounds are integer sample indices.  ``&&`` and ``||`` chains
are kept n-ary because the averaged semantics of a single m-operand
node differs from folded binary application.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping


class ParseError(ValueError):
    """Syntax or well-formedness error, with the character position."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class Direction(Enum):
    GREATER = ">"
    LESS = "<"


class Formula:
    """Base class for all syntax tree nodes.  Nodes are immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class TrueFormula(Formula):
    pass


@dataclass(frozen=True)
class FalseFormula(Formula):
    pass


TRUE = TrueFormula()
FALSE = FalseFormula()


@dataclass(frozen=True)
class Predicate(Formula):
    """Atomic comparison of one channel against a constant.

    Thresholds live on the normalized signal domain, so they must lie
    in [-1, 1].  ``s < c`` scores as ``c - s``, the mirror of ``s > c``.
    """

    channel: str
    direction: Direction
    threshold: float

    def __post_init__(self):
        if not -1.0 <= self.threshold <= 1.0:
            raise ParseError(
                f"predicate threshold {self.threshold!r} outside [-1, 1]")


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


def _check_interval(a: int, b: int) -> None:
    if not (isinstance(a, int) and isinstance(b, int)):
        raise ParseError(f"interval bounds must be integers, got [{a},{b}]")
    if not b > a >= 0:
        raise ParseError(f"interval [{a},{b}] requires b > a >= 0")


def _as_subs(subs: Iterable[Formula]) -> tuple[Formula, ...]:
    out = tuple(subs)
    if len(out) < 2:
        raise ParseError("conjunction/disjunction needs at least 2 operands")
    return out


@dataclass(frozen=True)
class And(Formula):
    subs: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "subs", _as_subs(self.subs))


@dataclass(frozen=True)
class Or(Formula):
    subs: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "subs", _as_subs(self.subs))


@dataclass(frozen=True)
class Globally(Formula):
    a: int
    b: int
    sub: Formula

    def __post_init__(self):
        _check_interval(self.a, self.b)


@dataclass(frozen=True)
class Eventually(Formula):
    a: int
    b: int
    sub: Formula

    def __post_init__(self):
        _check_interval(self.a, self.b)


@dataclass(frozen=True)
class Until(Formula):
    """Kept in the syntax so formulas parse, but no evaluator accepts it."""

    a: int
    b: int
    lhs: Formula
    rhs: Formula

    def __post_init__(self):
        _check_interval(self.a, self.b)


def horizon(phi: Formula) -> int:
    """Largest time offset the formula can reference when evaluated at 0."""
    if isinstance(phi, (TrueFormula, FalseFormula, Predicate)):
        return 0
    if isinstance(phi, Not):
        return horizon(phi.sub)
    if isinstance(phi, (And, Or)):
        return max(horizon(sub) for sub in phi.subs)
    if isinstance(phi, (Globally, Eventually)):
        return phi.b + horizon(phi.sub)
    if isinstance(phi, Until):
        return phi.b + max(horizon(phi.lhs), horizon(phi.rhs))
    raise TypeError(f"not a formula node: {phi!r}")


# Precedence levels used by the printer: higher binds tighter.
_ATOM, _UNARY, _AND, _OR = 4, 3, 2, 1


def _level(phi: Formula) -> int:
    if isinstance(phi, (TrueFormula, FalseFormula, Predicate)):
        return _ATOM
    if isinstance(phi, (Not, Globally, Eventually, Until)):
        return _UNARY
    if isinstance(phi, And):
        return _AND
    return _OR


def _wrap(phi: Formula, minimum: int) -> str:
    text = format_formula(phi)
    return f"({text})" if _level(phi) < minimum else text


def format_formula(phi: Formula) -> str:
    """Render a formula in the concrete grammar; reparsing is lossless."""
    if isinstance(phi, TrueFormula):
        return "true"
    if isinstance(phi, FalseFormula):
        return "false"
    if isinstance(phi, Predicate):
        return f"{phi.channel} {phi.direction.value} {phi.threshold!r}"
    if isinstance(phi, Not):
        return f"!{_wrap(phi.sub, _UNARY)}"
    if isinstance(phi, And):
        return " && ".join(_wrap(sub, _UNARY) for sub in phi.subs)
    if isinstance(phi, Or):
        return " || ".join(_wrap(sub, _AND) for sub in phi.subs)
    if isinstance(phi, Globally):
        return f"G[{phi.a},{phi.b}] {_wrap(phi.sub, _UNARY)}"
    if isinstance(phi, Eventually):
        return f"F[{phi.a},{phi.b}] {_wrap(phi.sub, _UNARY)}"
    if isinstance(phi, Until):
        return f"{_wrap(phi.lhs, _ATOM)} U[{phi.a},{phi.b}] {_wrap(phi.rhs, _ATOM)}"
    raise TypeError(f"not a formula node: {phi!r}")


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<and>&&)
  | (?P<or>\|\|)
  | (?P<implies>->)
  | (?P<number>-?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_]\w*)
  | (?P<sym>[!()\[\],<>])
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
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        if kind != "ws":
            value = match.group()
            tokens.append(_Token("sym" if kind in ("and", "or", "implies")
                                 else kind, value, pos))
        pos = match.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, atoms: Mapping[str, Formula]):
        self.tokens = _tokenize(text)
        self.atoms = atoms
        self.idx = 0

    def peek(self) -> _Token:
        return self.tokens[self.idx]

    def advance(self) -> _Token:
        token = self.tokens[self.idx]
        self.idx += 1
        return token

    def expect(self, text: str) -> _Token:
        token = self.peek()
        if token.text != text:
            found = token.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", token.pos)
        return self.advance()

    def parse(self) -> Formula:
        phi = self.implication()
        token = self.peek()
        if token.kind != "eof":
            raise ParseError(f"unexpected trailing input {token.text!r}",
                             token.pos)
        return phi

    def implication(self) -> Formula:
        lhs = self.disjunction()
        if self.peek().text == "->":
            self.advance()
            rhs = self.implication()
            return Or((Not(lhs), rhs))
        return lhs

    def disjunction(self) -> Formula:
        subs = [self.conjunction()]
        while self.peek().text == "||":
            self.advance()
            subs.append(self.conjunction())
        return subs[0] if len(subs) == 1 else Or(tuple(subs))

    def conjunction(self) -> Formula:
        subs = [self.unary()]
        while self.peek().text == "&&":
            self.advance()
            subs.append(self.unary())
        return subs[0] if len(subs) == 1 else And(tuple(subs))

    def unary(self) -> Formula:
        token = self.peek()
        if token.text == "!":
            self.advance()
            return Not(self.unary())
        if (token.kind == "ident" and token.text in ("G", "F")
                and self.tokens[self.idx + 1].text == "["):
            self.advance()
            a, b = self.interval(token.pos)
            sub = self.unary()
            node = Globally if token.text == "G" else Eventually
            return node(a, b, sub)
        return self.postfix()

    def postfix(self) -> Formula:
        lhs = self.atom()
        token = self.peek()
        if (token.kind == "ident" and token.text == "U"
                and self.tokens[self.idx + 1].text == "["):
            self.advance()
            a, b = self.interval(token.pos)
            rhs = self.atom()
            return Until(a, b, lhs, rhs)
        return lhs

    def interval(self, start: int) -> tuple[int, int]:
        self.expect("[")
        a = self.bound()
        self.expect(",")
        b = self.bound()
        self.expect("]")
        try:
            _check_interval(a, b)
        except ParseError as exc:
            raise ParseError(str(exc), start) from None
        return a, b

    def bound(self) -> int:
        token = self.peek()
        if token.kind != "number":
            found = token.text or "end of input"
            raise ParseError(f"expected interval bound, found {found!r}",
                             token.pos)
        self.advance()
        value = float(token.text)
        if not value.is_integer():
            raise ParseError(f"interval bound {token.text} is not an integer",
                             token.pos)
        return int(value)

    def atom(self) -> Formula:
        token = self.peek()
        if token.text == "(":
            self.advance()
            phi = self.implication()
            self.expect(")")
            return phi
        if token.kind == "ident":
            self.advance()
            if token.text == "true":
                return TRUE
            if token.text == "false":
                return FALSE
            nxt = self.peek()
            if nxt.text in (">", "<"):
                self.advance()
                return self.predicate(token, nxt.text)
            if token.text in self.atoms:
                return self.atoms[token.text]
            raise ParseError(f"unknown atom {token.text!r} "
                             "(not a predicate and no region table entry)",
                             token.pos)
        found = token.text or "end of input"
        raise ParseError(f"expected formula, found {found!r}", token.pos)

    def predicate(self, ident: _Token, cmp: str) -> Formula:
        token = self.peek()
        if token.kind != "number":
            found = token.text or "end of input"
            raise ParseError(f"expected threshold number, found {found!r}",
                             token.pos)
        self.advance()
        threshold = float(token.text)
        direction = Direction.GREATER if cmp == ">" else Direction.LESS
        try:
            return Predicate(ident.text, direction, threshold)
        except ParseError as exc:
            raise ParseError(str(exc), token.pos) from None


def parse(text: str, atoms: Mapping[str, Formula] | None = None) -> Formula:
    """Parse the text format into a syntax tree.

    ``atoms`` maps bare identifiers (region names) to prebuilt formulas;
    they are substituted during parsing.  ``->`` is rewritten to
    ``!lhs || rhs``, so the returned tree never contains an implication
    node.
    """
    return _Parser(text, atoms or {}).parse()
