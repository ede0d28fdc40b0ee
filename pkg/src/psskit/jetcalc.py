"""Total x-derivative on jet space and reduction of t-jets modulo an equation.

Equations are declared per dependent variable as one of three classes:

* ``evolution``  u_t = rhs            -> every t-jet is eliminated
* ``xt``         u_xt = rhs           -> u_t itself stays free
* ``ch``         u_t - u_xxt = rhs    -> u_t and u_xt stay free

with rhs free of t-jets.  Reduction rewrites the dependent t-jets to
exhaustion so downstream exterior derivatives live in the free coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .exprcore import Expr, ExprError, JetVar, as_expr

EVOLUTION = "evolution"
CH = "ch"
XT = "xt"
_KINDS = (EVOLUTION, CH, XT)


class UnreducibleJet(ExprError):
    """A dependent t-jet had no rewrite rule; the spec is malformed."""


class OrderCapExceeded(ExprError):
    """A reduction produced jets far beyond the equation order; runaway input."""


@dataclass(frozen=True)
class VarRule:
    kind: str
    rhs: Expr

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ExprError(f"unknown equation class {self.kind!r}")
        if self.rhs.has_tjets():
            raise ExprError("equation right-hand side may not contain t-jets")


@dataclass(frozen=True)
class EquationSpec:
    """One rewrite rule per dependent variable, plus the order cap."""

    rules: tuple[VarRule, ...]

    def __post_init__(self) -> None:
        if not self.rules:
            raise ExprError("at least one dependent variable is required")
        if any(r.kind == CH for r in self.rules) and len(self.rules) > 1:
            raise ExprError("the u_t - u_xxt class is supported for a single variable only")

    @property
    def nvars(self) -> int:
        return len(self.rules)

    @property
    def maxorder(self) -> int:
        return max(max(r.rhs.max_xorder(), 0) for r in self.rules)

    def order_cap(self) -> int:
        return self.maxorder + 4

    def is_free(self, j: JetVar) -> bool:
        if j.torder == 0:
            return True
        kind = self.rules[j.dep].kind
        if kind == EVOLUTION:
            return False
        if kind == XT:
            return j.xorder == 0
        return j.xorder <= 1


def evolution_eq(rhs, *more) -> EquationSpec:
    rules = tuple(VarRule(EVOLUTION, as_expr(r)) for r in (rhs, *more))
    return EquationSpec(rules)


def ch_eq(rhs) -> EquationSpec:
    return EquationSpec((VarRule(CH, as_expr(rhs)),))


def xt_eq(rhs) -> EquationSpec:
    return EquationSpec((VarRule(XT, as_expr(rhs)),))


@lru_cache(maxsize=None)
def _dx_pow_rhs(eq: EquationSpec, dep: int, k: int) -> Expr:
    if k == 0:
        return eq.rules[dep].rhs
    return total_dx(_dx_pow_rhs(eq, dep, k - 1), eq)


def _rewrite(j: JetVar, eq: EquationSpec) -> Expr:
    rule = eq.rules[j.dep]
    if rule.kind == EVOLUTION:
        return _dx_pow_rhs(eq, j.dep, j.xorder)
    if rule.kind == XT:
        if j.xorder < 1:
            raise UnreducibleJet(f"{j!r} is a free jet")
        return _dx_pow_rhs(eq, j.dep, j.xorder - 1)
    if j.xorder < 2:
        raise UnreducibleJet(f"{j!r} is a free jet")
    lower = JetVar(j.dep, j.xorder - 2, 1)
    return Expr.of_jet(lower) - _dx_pow_rhs(eq, j.dep, j.xorder - 2)


def reduce_tjets(a: Expr, eq: EquationSpec) -> Expr:
    """Rewrite every dependent t-jet until only free jets remain."""
    cap = eq.order_cap()
    while True:
        target = None
        for j in a.jet_vars():
            if j.xorder > cap + 1:
                raise OrderCapExceeded(f"jet order {j.xorder} exceeds cap {cap}")
            if j.torder and not eq.is_free(j):
                if target is None or j.xorder > target.xorder:
                    target = j
        if target is None:
            return a
        repl = reduce_tjets(_rewrite(target, eq), eq)
        a = a.subs_jet(target, repl)


def total_dx(a: Expr, eq: EquationSpec) -> Expr:
    """Derivation shifting every jet one x-order up, reduced afterwards."""
    cap = eq.order_cap()
    out = Expr.zero()
    for j in a.jet_vars():
        if j.xorder > cap:
            raise OrderCapExceeded(f"jet order {j.xorder + 1} would exceed cap {cap}")
        out = out + a.diff(j) * Expr.of_jet(j.shifted())
    return reduce_tjets(out, eq)


def total_dt(a: Expr, eq: EquationSpec) -> Expr:
    """t-derivative of a t-order-zero expression, reduced to free jets."""
    if a.has_tjets():
        raise ExprError("total_dt expects a t-order-zero expression")
    out = Expr.zero()
    for j in a.jet_vars():
        out = out + a.diff(j) * Expr.of_jet(JetVar(j.dep, j.xorder, 1))
    return reduce_tjets(out, eq)
