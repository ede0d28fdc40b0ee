"""Infix expression language for jet expressions.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?          # integer exponents only
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

'^' binds tighter than unary minus, which binds tighter than '*' and '/';
exponents are (possibly negated) integer literals and chain right to left.
Jet variables are written ``u``, ``u1``, ``u2``, ... with a trailing ``t`` for
one t-derivative (``ut``, ``u1t``); second and later dependent variables use
their declared names the same way.  Parameters must be declared before use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exprcore import (Expr, ExprError, FuncFactor, JetVar, NotInvertible,
                       Param, Term, func_expr, registry)


class SyntaxIssue(ExprError):
    """Malformed source text; carries the offset and what was expected."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnknownIdentifier(ExprError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown identifier {name!r} (at offset {position})")
        self.name = name
        self.position = position


_FUNCTIONS = ("exp", "sin", "cos")
_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class NameContext:
    """Resolution scope: dependent-variable names plus declared parameters."""

    var_names: tuple[str, ...] = ("u",)
    extra_params: tuple[Param, ...] = ()

    def lookup_param(self, name: str) -> Optional[Param]:
        for p in self.extra_params:
            if p.name == name:
                return p
        return registry.get(name)

    def lookup_jet(self, name: str) -> Optional[JetVar]:
        for dep, base in enumerate(self.var_names):
            if not name.startswith(base):
                continue
            rest = name[len(base):]
            torder = 0
            if rest.endswith("t"):
                torder = 1
                rest = rest[:-1]
            if rest == "":
                return JetVar(dep, 0, torder)
            if rest.isdigit():
                return JetVar(dep, int(rest), torder)
        return None


@dataclass
class _Stream:
    tokens: list[tuple[str, str, int]]
    pos: int = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    out = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if m is None:
            stripped = src[i:].lstrip()
            if not stripped:
                break
            raise SyntaxIssue(f"unexpected character {stripped[0]!r}", i)
        i = m.end()
        for kind in ("num", "ident", "op"):
            text = m.group(kind)
            if text is not None:
                out.append((kind, text, m.start(kind)))
                break
    out.append(("end", "", len(src)))
    return out


def parse_expr(src: str, ctx: Optional[NameContext] = None) -> Expr:
    """Parse source text into a canonical expression."""
    ctx = ctx or NameContext()
    stream = _Stream(_tokenize(src))
    value = _parse_sum(stream, ctx)
    kind, text, pos = stream.peek()
    if kind != "end":
        raise SyntaxIssue(f"unexpected trailing {text!r}", pos)
    return value


def _parse_sum(s: _Stream, ctx: NameContext) -> Expr:
    value = _parse_product(s, ctx)
    while True:
        kind, text, _ = s.peek()
        if kind == "op" and text in "+-":
            s.next()
            rhs = _parse_product(s, ctx)
            value = value + rhs if text == "+" else value - rhs
        else:
            return value


def _parse_product(s: _Stream, ctx: NameContext) -> Expr:
    value = _parse_unary(s, ctx)
    while True:
        kind, text, pos = s.peek()
        if kind == "op" and text in "*/":
            s.next()
            rhs = _parse_unary(s, ctx)
            if text == "*":
                value = value * rhs
            else:
                try:
                    value = value / rhs
                except ZeroDivisionError:
                    raise SyntaxIssue("division by zero", pos) from None
                except NotInvertible as err:
                    raise SyntaxIssue(f"cannot divide: {err}", pos) from None
        else:
            return value


def _parse_unary(s: _Stream, ctx: NameContext) -> Expr:
    kind, text, _ = s.peek()
    if kind == "op" and text == "-":
        s.next()
        return -_parse_unary(s, ctx)
    return _parse_power(s, ctx)


def _parse_power(s: _Stream, ctx: NameContext) -> Expr:
    base = _parse_atom(s, ctx)
    kind, text, pos = s.peek()
    if kind == "op" and text == "^":
        s.next()
        try:
            return base ** _parse_exponent(s)
        except NotInvertible as err:
            raise SyntaxIssue(f"cannot invert: {err}", pos) from None
    return base


def _parse_exponent(s: _Stream) -> int:
    kind, text, pos = s.next()
    sign = 1
    if kind == "op" and text == "-":
        sign = -1
        kind, text, pos = s.next()
    if kind != "num":
        raise SyntaxIssue("expected an integer exponent", pos)
    value = int(text)
    kind2, text2, _ = s.peek()
    if kind2 == "op" and text2 == "^":
        s.next()
        value = value ** _parse_exponent(s)
    return sign * value


def _parse_atom(s: _Stream, ctx: NameContext) -> Expr:
    kind, text, pos = s.next()
    if kind == "num":
        return Expr.number(int(text))
    if kind == "op" and text == "(":
        inner = _parse_sum(s, ctx)
        kind, text, pos = s.next()
        if text != ")":
            raise SyntaxIssue("expected ')'", pos)
        return inner
    if kind == "ident":
        if text in _FUNCTIONS:
            kind2, text2, pos2 = s.next()
            if text2 != "(":
                raise SyntaxIssue(f"expected '(' after {text}", pos2)
            arg = _parse_sum(s, ctx)
            kind2, text2, pos2 = s.next()
            if text2 != ")":
                raise SyntaxIssue("expected ')'", pos2)
            return func_expr(text, arg)
        jet = ctx.lookup_jet(text)
        if jet is not None:
            return Expr.of_jet(jet)
        p = ctx.lookup_param(text)
        if p is not None:
            return Expr.of_param(p)
        raise UnknownIdentifier(text, pos)
    raise SyntaxIssue(f"unexpected token {text!r}", pos)


# --------------------------------------------------------------------------
# rendering (inverse of parsing, up to canonical form)
# --------------------------------------------------------------------------


def _jet_name(j: JetVar, ctx: NameContext) -> str:
    if j.dep >= len(ctx.var_names):
        raise ExprError(f"no name declared for dependent variable {j.dep}")
    base = ctx.var_names[j.dep]
    order = str(j.xorder) if j.xorder else ""
    return f"{base}{order}{'t' if j.torder else ''}"


def _render_factor(base: str, exp: int) -> str:
    if exp == 1:
        return base
    return f"{base}^{exp}" if exp >= 0 else f"{base}^-{-exp}"


def render_term(t: Term, ctx: NameContext) -> tuple[int, str]:
    """(sign, magnitude-text) of one term."""
    sign = 1 if t.coeff >= 0 else -1
    c = abs(t.coeff)
    factors = []
    for p, e in t.params:
        factors.append(_render_factor(p.name, e))
    for j, e in t.jets:
        factors.append(_render_factor(_jet_name(j, ctx), e))
    for f, e in t.funcs:
        factors.append(_render_factor(f"{f.kind}({render_expr(f.arg, ctx)})", e))
    if not factors:
        return sign, str(c)
    body = "*".join(factors)
    if c == 1:
        return sign, body
    return sign, f"{c}*{body}"


def render_expr(e: Expr, ctx: Optional[NameContext] = None) -> str:
    ctx = ctx or NameContext()
    if not e.terms:
        return "0"
    parts = []
    for i, t in enumerate(e.terms):
        sign, body = render_term(t, ctx)
        if i == 0:
            parts.append(body if sign > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if sign > 0 else f"- {body}")
    return " ".join(parts)
