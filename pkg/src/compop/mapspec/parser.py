"""Recursive-descent parser for the map-spec mini-language.

    expr    := name | name "(" args ")"
    args    := arg { "," arg }
    arg     := expr | complex | integer
    complex := real [ ("+"|"-") real "i" ] | real "i"

``rational`` separates numerator and denominator lists with ";".
"""
from __future__ import annotations

import re
from typing import List, NamedTuple

from ..errors import DomainError, MapSyntaxError
from .expr import (
    AtomicInner,
    Blaschke,
    Compose,
    Const,
    HalfPlane,
    Identity,
    MapExpr,
    Mobius,
    Monomial,
    Poly,
    Rational,
    Scale,
)

MAX_SPEC_LENGTH = 4096

GRAMMAR = """\
map-spec grammar:
  expr    := name | name "(" args ")"
  args    := arg { "," arg }
  arg     := expr | complex | integer
  complex := real [ ("+"|"-") real "i" ] | real "i"
  name    := identity | const | monomial | mobius | blaschke | poly
           | rational | atomic | scale | compose | halfplane
  rational(c0, ..., cm; d0, ..., dk) splits numerator/denominator with ";"
examples: "monomial(2)", "mobius(0.3+0.1i)", "scale(0.5, identity)",
          "compose(blaschke(0, 0.5), mobius(-0.2i))"
"""

NAMES = (
    "identity", "const", "monomial", "mobius", "blaschke", "poly",
    "rational", "atomic", "scale", "compose", "halfplane",
)
_NULLARY = {"identity": Identity, "halfplane": HalfPlane}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<name>[A-Za-z_]+)
  | (?P<punct>[(),;+-])
    """,
    re.VERBOSE,
)


class Token(NamedTuple):
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise MapSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.tok
        if t.text != text:
            raise MapSyntaxError(f"found {t.text or 'end of input'!r}", t.pos, repr(text))
        return self.advance()

    def parse(self):
        e = self.expr()
        if self.tok.kind != "end":
            raise MapSyntaxError(f"trailing input {self.tok.text!r}", self.tok.pos, "end of input")
        return e

    def expr(self) -> MapExpr:
        t = self.tok
        if t.kind != "name":
            raise MapSyntaxError(f"found {t.text or 'end of input'!r}", t.pos, "a map name")
        name = t.text.lower()
        if name not in NAMES:
            raise MapSyntaxError(f"unknown map name {t.text!r}", t.pos, " | ".join(NAMES))
        self.advance()
        if name in _NULLARY:
            if self.tok.text == "(":
                raise MapSyntaxError(f"{name} takes no arguments", self.tok.pos)
            return _NULLARY[name]()
        self.expect("(")
        try:
            if name == "rational":
                num = self.number_list()
                self.expect(";")
                den = self.number_list()
                self.expect(")")
                return Rational(tuple(num), tuple(den))
            if name in ("blaschke", "poly"):
                vals = self.number_list()
                self.expect(")")
                return (Blaschke if name == "blaschke" else Poly)(tuple(vals))
            if name == "compose":
                outer = self.expr()
                self.expect(",")
                inner = self.expr()
                self.expect(")")
                return Compose(outer, inner)
            if name == "scale":
                r = self.real_arg()
                self.expect(",")
                inner = self.expr()
                self.expect(")")
                return Scale(r, inner)
            if name == "monomial":
                k = self.integer()
                self.expect(")")
                return Monomial(k)
            c = self.complex()
            self.expect(")")
            return {"const": Const, "mobius": Mobius, "atomic": AtomicInner}[name](c)
        except DomainError as exc:
            raise DomainError(f"{name} at position {t.pos}: {exc}") from None

    def number_list(self):
        vals = [self.complex()]
        while self.tok.text == ",":
            self.advance()
            vals.append(self.complex())
        return vals

    def integer(self):
        t = self.tok
        if t.kind != "number" or not t.text.isdigit():
            raise MapSyntaxError(f"found {t.text or 'end of input'!r}", t.pos, "an integer")
        self.advance()
        return int(t.text)

    def real_arg(self):
        start = self.tok.pos
        c = self.complex()
        if c.imag != 0:
            raise MapSyntaxError("expected a real number", start, "a real")
        return c.real

    def signed(self):
        sign = 1.0
        if self.tok.text in "+-" and self.tok.kind == "punct":
            sign = -1.0 if self.advance().text == "-" else 1.0
        t = self.tok
        if t.kind != "number":
            raise MapSyntaxError(f"found {t.text or 'end of input'!r}", t.pos, "a number")
        self.advance()
        imag = t.text.endswith("i")
        return sign * float(t.text.rstrip("i")), imag

    def complex(self) -> complex:
        x, imag = self.signed()
        if imag:
            return complex(0.0, x)
        if self.tok.text in ("+", "-"):
            pos = self.tok.pos
            y, imag2 = self.signed()
            if not imag2:
                raise MapSyntaxError("imaginary part must end in 'i'", pos, "real 'i'")
            return complex(x, y)
        return complex(x, 0.0)


def parse_map(spec: str) -> MapExpr:
    """Parse a map-spec string into a :class:`MapExpr` tree."""
    if not isinstance(spec, str):
        raise TypeError(f"map spec must be str, got {type(spec).__name__}")
    if not spec.strip():
        raise MapSyntaxError("empty map spec", 0, "a map name")
    if len(spec) > MAX_SPEC_LENGTH:
        raise MapSyntaxError(f"map spec longer than {MAX_SPEC_LENGTH} characters", MAX_SPEC_LENGTH)
    return _Parser(spec).parse()


def print_map(expr: MapExpr) -> str:
    """Canonical text form; ``parse_map(print_map(e)) == e``."""
    return expr.to_spec()
