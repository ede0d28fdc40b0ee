"""Exterior calculus on the (x, t) plane with jet-expression coefficients.

One-forms are f dx + g dt; the single basis two-form is dx^dt (dt^dx carries a
sign flip).  The central objects are triads of one-forms that are checked
against the structure equations of a surface of constant curvature -delta:

    d w1 = w3 ^ w2,   d w2 = w1 ^ w3,   d w3 = delta * w1 ^ w2.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .exprcore import Expr, ExprError, JetVar, Param, as_expr, exact_div
from .jetcalc import EquationSpec, total_dt, total_dx


class NotACoframe(ExprError):
    """The first two structure equations fail, so no connection form exists."""


class NonDivisible(ExprError):
    """d(w3) is not an expression multiple of w1 ^ w2."""

    def __init__(self, numerator: Expr, denominator: Expr):
        super().__init__(f"cannot divide {numerator!r} by {denominator!r}")
        self.numerator = numerator
        self.denominator = denominator


@dataclass(frozen=True)
class OneForm:
    cx: Expr
    ct: Expr

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.cx + other.cx, self.ct + other.ct)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.cx - other.cx, self.ct - other.ct)

    def __neg__(self) -> "OneForm":
        return OneForm(-self.cx, -self.ct)

    def scaled(self, k) -> "OneForm":
        k = as_expr(k)
        return OneForm(self.cx * k, self.ct * k)

    def is_zero(self) -> bool:
        return self.cx.is_zero() and self.ct.is_zero()

    def equals(self, other: "OneForm") -> bool:
        return self.cx.equals(other.cx) and self.ct.equals(other.ct)

    @staticmethod
    def zero() -> "OneForm":
        return OneForm(Expr.zero(), Expr.zero())


@dataclass(frozen=True)
class TwoForm:
    """Coefficient on dx^dt."""

    c: Expr

    def __add__(self, other: "TwoForm") -> "TwoForm":
        return TwoForm(self.c + other.c)

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return TwoForm(self.c - other.c)

    def __neg__(self) -> "TwoForm":
        return TwoForm(-self.c)

    def scaled(self, k) -> "TwoForm":
        return TwoForm(self.c * as_expr(k))

    def is_zero(self) -> bool:
        return self.c.is_zero()

    @staticmethod
    def zero() -> "TwoForm":
        return TwoForm(Expr.zero())


def wedge(a: OneForm, b: OneForm) -> TwoForm:
    return TwoForm(a.cx * b.ct - a.ct * b.cx)


def d_scalar(h: Expr, eq: EquationSpec) -> OneForm:
    """Differential of a zero-form: (D_x h) dx + (D_t h) dt, reduced."""
    return OneForm(total_dx(h, eq), total_dt(h, eq))


def exterior_d(a: OneForm, eq: EquationSpec) -> TwoForm:
    """d(f dx + g dt) = (D_x g - D_t f) dx^dt, with t-jets reduced."""
    if a.cx.has_tjets() or a.ct.has_tjets():
        raise ExprError("one-form coefficients must be t-order zero")
    return TwoForm(total_dx(a.ct, eq) - total_dt(a.cx, eq))


@dataclass(frozen=True)
class Triad:
    """Candidate geometric data: three one-forms plus the curvature sign."""

    w1: OneForm
    w2: OneForm
    w3: OneForm
    delta: int
    eq: EquationSpec

    def __post_init__(self) -> None:
        if self.delta not in (1, -1):
            raise ExprError("delta must be +1 or -1")
        for w in (self.w1, self.w2, self.w3):
            for c in (w.cx, w.ct):
                if c.has_tjets():
                    raise ExprError("triad coefficients must be t-order zero")

    def forms(self) -> tuple[OneForm, OneForm, OneForm]:
        return (self.w1, self.w2, self.w3)

    def coeffs(self) -> tuple[Expr, ...]:
        return (self.w1.cx, self.w1.ct, self.w2.cx, self.w2.ct, self.w3.cx, self.w3.ct)

    def with_delta(self, delta: int) -> "Triad":
        return Triad(self.w1, self.w2, self.w3, delta, self.eq)


@dataclass(frozen=True)
class MetricForm:
    """g = E dx^2 + 2 F dx dt + G2 dt^2 built from the orthonormal coframe."""

    E: Expr
    F: Expr
    G2: Expr


def triad_from_coeffs(f11, f12, f21, f22, f31, f32, delta: int, eq: EquationSpec) -> Triad:
    return Triad(OneForm(as_expr(f11), as_expr(f12)),
                 OneForm(as_expr(f21), as_expr(f22)),
                 OneForm(as_expr(f31), as_expr(f32)), delta, eq)


def structure_residuals(t: Triad) -> tuple[TwoForm, TwoForm, TwoForm]:
    r1 = exterior_d(t.w1, t.eq) - wedge(t.w3, t.w2)
    r2 = exterior_d(t.w2, t.eq) - wedge(t.w1, t.w3)
    r3 = exterior_d(t.w3, t.eq) - wedge(t.w1, t.w2).scaled(t.delta)
    return (r1, r2, r3)


def determinant(t: Triad) -> Expr:
    return t.w1.cx * t.w2.ct - t.w1.ct * t.w2.cx


def sample_assignment(expr_or_exprs, rng: random.Random) -> dict:
    """Random real values for every jet variable and parameter involved.

    Nonzero-assumed parameters are kept away from zero; positive ones stay
    positive; radical parameters are derived from their squares at evaluation
    time and are not assigned here.
    """
    exprs = expr_or_exprs if isinstance(expr_or_exprs, (list, tuple)) else [expr_or_exprs]
    jets: set[JetVar] = set()
    params: set[Param] = set()
    for e in exprs:
        jets |= e.jet_vars()
        params |= e.params_used()
    # radicals are evaluated through their squares, which may involve
    # parameters not otherwise present
    frontier = list(params)
    while frontier:
        p = frontier.pop()
        if p.square is not None:
            for q in p.square.params_used():
                if q not in params:
                    params.add(q)
                    frontier.append(q)
    assignment: dict = {}
    for j in sorted(jets, key=JetVar.sort_key):
        assignment[j] = rng.uniform(-2.0, 2.0)
    for p in sorted(params, key=Param.sort_key):
        if p.square is not None:
            continue
        if p.positive:
            assignment[p] = rng.uniform(0.1, 2.0)
        elif p.nonzero:
            assignment[p] = rng.uniform(0.1, 2.0) * (1 if rng.random() < 0.5 else -1)
        else:
            assignment[p] = rng.uniform(-2.0, 2.0)
    return assignment


def nondegenerate(t: Triad, samples: int = 20, seed: int = 0,
                  threshold: float = 1e-6) -> tuple[bool, Optional[dict]]:
    """Check f11*f22 - f12*f21 is nonzero; returns (verdict, witness point)."""
    det = determinant(t)
    if det.is_zero():
        return (False, None)
    rng = random.Random(seed)
    for _ in range(samples):
        assignment = sample_assignment(det, rng)
        if abs(det.eval_at(assignment)) > threshold:
            return (True, assignment)
    return (False, None)


def gaussian_curvature(t: Triad) -> Expr:
    """Gaussian curvature of the metric w1^2 + w2^2 with connection form w3.

    The Gauss equation reads d(w3) = -K * w1 ^ w2, so K is minus the exact
    quotient of the two coefficients; every catalog triad yields -delta.
    """
    r1, r2, _ = structure_residuals(t)
    if not (r1.is_zero() and r2.is_zero()):
        raise NotACoframe("the first two structure equations do not hold")
    num = exterior_d(t.w3, t.eq).c
    den = wedge(t.w1, t.w2).c
    if den.is_zero():
        raise NonDivisible(num, den)
    q = exact_div(num, den)
    if q is None:
        raise NonDivisible(num, den)
    return -q


def metric_of(t: Triad) -> MetricForm:
    f11, f12, f21, f22 = t.w1.cx, t.w1.ct, t.w2.cx, t.w2.ct
    return MetricForm(f11 * f11 + f21 * f21,
                      f11 * f12 + f21 * f22,
                      f12 * f12 + f22 * f22)


def verifies(t: Triad, seed: int = 0) -> bool:
    """Structure equations hold and the coframe is nondegenerate."""
    if not all(r.is_zero() for r in structure_residuals(t)):
        return False
    ok, _ = nondegenerate(t, seed=seed)
    return ok
