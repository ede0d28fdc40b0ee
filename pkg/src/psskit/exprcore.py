"""Canonical-form symbolic expressions over jet variables and parameters.

An Expr is a flat sum of terms.  Each term is an exact rational coefficient
times a monomial in parameters (integer exponents, negative allowed), jet
variables (positive exponents) and elementary-function factors exp/sin/cos
whose arguments are again Exprs.  Normalization expands products, merges like
terms, rewrites declared radical parameters through their defining square,
and reduces to the empty term list exactly when the value is zero.  All
values are immutable; every operation returns a fresh Expr.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union


class ExprError(Exception):
    """Base class for expression-level failures."""


class MissingAssignment(ExprError):
    """Numeric evaluation hit a symbol without an assigned value."""


class DomainError(ExprError):
    """Numeric evaluation left the real domain (negative radicand etc.)."""


class NotInvertible(ExprError):
    """Division was requested by an expression with no exact inverse here."""


class ParamConflict(ExprError):
    """A parameter name was redeclared with different attributes."""


Rat = Union[int, Fraction]


@dataclass(frozen=True)
class Param:
    """A named scalar parameter with optional assumptions.

    ``square`` marks a radical parameter: the rewrite p**2 -> square is applied
    during normalization.  Radical parameters must be declared nonzero so that
    clearing denominators by powers of p preserves zero-ness.
    """

    name: str
    nonzero: bool = False
    positive: bool = False
    square: Optional["Expr"] = None

    def sort_key(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class JetVar:
    """A jet-space coordinate: x-derivative order ``xorder`` of dependent
    variable ``dep``, differentiated ``torder`` (0 or 1) times in t."""

    dep: int = 0
    xorder: int = 0
    torder: int = 0

    def __post_init__(self) -> None:
        if self.torder not in (0, 1):
            raise ExprError(f"torder must be 0 or 1, got {self.torder}")
        if self.xorder < 0 or self.dep < 0:
            raise ExprError("negative jet index")

    def sort_key(self) -> tuple[int, int, int]:
        return (self.dep, self.torder, self.xorder)

    def shifted(self, dx: int = 1) -> "JetVar":
        return JetVar(self.dep, self.xorder + dx, self.torder)

    def __repr__(self) -> str:
        name = "uvwpqrs"[self.dep] if self.dep < 7 else f"x{self.dep}_"
        order = str(self.xorder) if self.xorder else ""
        return f"{name}{order}{'t' if self.torder else ''}"


@dataclass(frozen=True)
class FuncFactor:
    """An elementary-function factor exp/sin/cos applied to a polynomial arg."""

    kind: str
    arg: "Expr"

    def __post_init__(self) -> None:
        if self.kind not in ("exp", "sin", "cos"):
            raise ExprError(f"unsupported function kind {self.kind!r}")

    def sort_key(self):
        return (self.kind, self.arg.sort_key())

    def __repr__(self) -> str:
        return f"{self.kind}({self.arg!r})"


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    params: tuple[tuple[Param, int], ...] = ()
    jets: tuple[tuple[JetVar, int], ...] = ()
    funcs: tuple[tuple[FuncFactor, int], ...] = ()

    def signature(self):
        return (self.params, self.jets, self.funcs)

    def jet_degree(self) -> int:
        return sum(e for _, e in self.jets)

    def sort_key(self):
        # graded, then lex from the highest jet variable down
        return (
            self.jet_degree(),
            tuple((j.sort_key(), e) for j, e in reversed(self.jets)),
            tuple((p.sort_key(), e) for p, e in self.params),
            tuple((f.sort_key(), e) for f, e in self.funcs),
        )

    def __repr__(self) -> str:
        bits = [] if self.coeff == 1 and (self.params or self.jets or self.funcs) else [str(self.coeff)]
        for p, e in self.params:
            bits.append(f"{p.name}^{e}" if e != 1 else p.name)
        for j, e in self.jets:
            bits.append(f"{j!r}^{e}" if e != 1 else repr(j))
        for f, e in self.funcs:
            bits.append(f"{f!r}^{e}" if e != 1 else repr(f))
        return "*".join(bits) or str(self.coeff)


def _merge_bases(pairs: Iterable[tuple]) -> list:
    acc: dict = {}
    for base, exp in pairs:
        acc[base] = acc.get(base, 0) + exp
    return [(b, e) for b, e in acc.items() if e != 0]


def _sorted_params(pairs) -> tuple:
    return tuple(sorted(pairs, key=lambda be: be[0].sort_key()))


def _sorted_jets(pairs) -> tuple:
    return tuple(sorted(pairs, key=lambda be: be[0].sort_key()))


def _sorted_funcs(pairs) -> tuple:
    return tuple(sorted(pairs, key=lambda be: be[0].sort_key()))


def _combine(a: Term, b: Term) -> Term:
    return Term(
        a.coeff * b.coeff,
        _sorted_params(_merge_bases(a.params + b.params)),
        _sorted_jets(_merge_bases(a.jets + b.jets)),
        _sorted_funcs(_merge_bases(a.funcs + b.funcs)),
    )


def _reduce_term(term: Term) -> list[Term]:
    """Fold constant-argument functions and rewrite radical squares.

    Exponential factors are stored with a sign-normalized argument (leading
    coefficient positive) and an integer multiplicity, so exp(x) and exp(-x)
    share a base and reciprocal pairs cancel on merge.  Returns the expanded
    list of terms equal to ``term``.
    """
    # exp(0)=1, cos(0)=1, sin(0)=0; only the zero argument is folded
    funcs = []
    for fac, mult in term.funcs:
        if fac.arg.is_zero():
            if fac.kind == "sin":
                return []
            continue  # exp/cos of 0 is 1
        if fac.kind == "exp":
            if fac.arg.terms[0].coeff < 0:
                fac, mult = FuncFactor("exp", -fac.arg), -mult
        elif mult < 0:
            raise ExprError("negative power of sin/cos is not representable")
        funcs.append((fac, mult))
    term = Term(term.coeff, term.params, term.jets, _sorted_funcs(_merge_bases(funcs)))

    for p, e in term.params:
        if p.square is not None and e >= 2:
            rest = tuple(pe for pe in term.params if pe[0] != p)
            if e % 2:
                rest = rest + ((p, 1),)
            stripped = Term(term.coeff, _sorted_params(rest), term.jets, term.funcs)
            expanded = Expr((stripped,)) * (p.square ** (e // 2))
            out = []
            for sub in expanded.terms:
                out.extend(_reduce_term(sub))
            return out
    return [term]


def _collect(terms: Iterable[Term]) -> tuple[Term, ...]:
    acc: dict = {}
    for t in terms:
        sig = t.signature()
        prev = acc.get(sig)
        if prev is None:
            acc[sig] = t
        else:
            c = prev.coeff + t.coeff
            if c == 0:
                del acc[sig]
            else:
                acc[sig] = Term(c, *sig)
    return tuple(sorted(acc.values(), key=Term.sort_key, reverse=True))


def _radical_clear(terms: tuple[Term, ...]) -> Optional[tuple[Term, ...]]:
    """Multiply by even powers of radicals so every radical exponent is >= 0.

    Returns the cleared term list, or None when no clearing is needed.  Since
    radicals are nonzero, the cleared expression vanishes iff the original one
    does.
    """
    shifts: dict[Param, int] = {}
    for t in terms:
        for p, e in t.params:
            if p.square is not None and e < 0:
                need = ((-e) + 1) // 2 * 2
                shifts[p] = max(shifts.get(p, 0), need)
    if not shifts:
        return None
    boosted = []
    for t in terms:
        extra = tuple((p, k) for p, k in shifts.items())
        boosted.append(_combine(t, Term(Fraction(1), _sorted_params(extra))))
    flat: list[Term] = []
    for t in boosted:
        flat.extend(_reduce_term(t))
    return _collect(flat)


def _build(raw: Iterable[Term]) -> "Expr":
    flat: list[Term] = []
    for t in raw:
        if t.coeff == 0:
            continue
        flat.extend(_reduce_term(t))
    terms = _collect(flat)
    if terms:
        cleared = _radical_clear(terms)
        if cleared is not None and not cleared:
            terms = ()
    return Expr(terms)


@dataclass(frozen=True)
class Expr:
    """Canonical sum of terms; the empty term list is the unique zero."""

    terms: tuple[Term, ...] = ()

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def zero() -> "Expr":
        return _ZERO

    @staticmethod
    def one() -> "Expr":
        return _ONE

    @staticmethod
    def number(x: Rat) -> "Expr":
        f = Fraction(x)
        return Expr((Term(f),)) if f else _ZERO

    @staticmethod
    def of_param(p: Param, exp: int = 1) -> "Expr":
        return _build([Term(Fraction(1), ((p, exp),))])

    @staticmethod
    def of_jet(j: JetVar, exp: int = 1) -> "Expr":
        return Expr((Term(Fraction(1), (), ((j, exp),)),))

    # -- ring operations -------------------------------------------------------

    def __add__(self, other) -> "Expr":
        other = as_expr(other)
        return _build(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(tuple(Term(-t.coeff, t.params, t.jets, t.funcs) for t in self.terms))

    def __sub__(self, other) -> "Expr":
        return self + (-as_expr(other))

    def __rsub__(self, other) -> "Expr":
        return as_expr(other) + (-self)

    def __mul__(self, other) -> "Expr":
        other = as_expr(other)
        if not self.terms or not other.terms:
            return _ZERO
        return _build([_combine(a, b) for a in self.terms for b in other.terms])

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int):
            raise ExprError("exponents must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        out = _ONE
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __truediv__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * Expr.number(Fraction(1, 1) / Fraction(other))
        other = as_expr(other)
        q = exact_div(self, other)
        if q is not None:
            return q
        return self * other.inverse()

    def inverse(self) -> "Expr":
        """Exact inverse for monomials in parameters and exp factors only."""
        if len(self.terms) != 1:
            raise NotInvertible(f"cannot invert a {len(self.terms)}-term expression")
        t = self.terms[0]
        if t.jets:
            raise NotInvertible("cannot invert a jet monomial")
        for p, _ in t.params:
            if not p.nonzero:
                raise NotInvertible(f"parameter {p.name} is not declared nonzero")
        funcs = []
        for fac, m in t.funcs:
            if fac.kind != "exp":
                raise NotInvertible("cannot invert sin/cos factors")
            funcs.append((fac, -m))
        return _build([Term(Fraction(1) / t.coeff,
                            tuple((p, -e) for p, e in t.params), (), tuple(funcs))])

    # -- predicates and views ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def equals(self, other) -> bool:
        """Mathematical equality: the difference normalizes to zero."""
        return (self - as_expr(other)).is_zero()

    def as_rational(self) -> Optional[Fraction]:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and self.terms[0].signature() == ((), (), ()):
            return self.terms[0].coeff
        return None

    def is_constant(self) -> bool:
        """No jet dependence anywhere, including function arguments."""
        return not self.jet_vars()

    def jet_vars(self) -> set[JetVar]:
        out: set[JetVar] = set()
        for t in self.terms:
            for j, _ in t.jets:
                out.add(j)
            for f, _ in t.funcs:
                out |= f.arg.jet_vars()
        return out

    def params_used(self) -> set[Param]:
        out: set[Param] = set()
        for t in self.terms:
            for p, _ in t.params:
                out.add(p)
            for f, _ in t.funcs:
                out |= f.arg.params_used()
        return out

    def has_tjets(self) -> bool:
        return any(j.torder for j in self.jet_vars())

    def max_xorder(self, dep: Optional[int] = None) -> int:
        orders = [j.xorder for j in self.jet_vars() if dep is None or j.dep == dep]
        return max(orders, default=-1)

    def depends_on(self, v: Union[JetVar, Param]) -> bool:
        return not self.diff(v).is_zero()

    def sort_key(self):
        return tuple(t.sort_key() + (t.coeff,) for t in self.terms)

    def coefficient(self, j: JetVar, exp: int = 1) -> "Expr":
        """Collect the coefficient of j**exp among terms with exactly that power
        (function arguments are not inspected)."""
        out = []
        for t in self.terms:
            got = 0
            rest = []
            for base, e in t.jets:
                if base == j:
                    got = e
                else:
                    rest.append((base, e))
            if got == exp:
                out.append(Term(t.coeff, t.params, tuple(rest), t.funcs))
        return _build(out)

    # -- calculus ----------------------------------------------------------------

    def diff(self, v: Union[JetVar, Param]) -> "Expr":
        out: list[Term] = []
        for t in self.terms:
            out.extend(_term_diff(t, v))
        return _build(out)

    def subs_jet(self, v: JetVar, r: "Expr") -> "Expr":
        return _substitute(self, v, as_expr(r), is_param=False)

    def subs_param(self, p: Param, r: "Expr") -> "Expr":
        return _substitute(self, p, as_expr(r), is_param=True)

    def eval_at(self, assignment: Mapping) -> float:
        total = 0.0
        for t in self.terms:
            val = float(t.coeff)
            for p, e in t.params:
                val *= _param_value(p, assignment) ** e
            for j, e in t.jets:
                if j not in assignment:
                    raise MissingAssignment(f"no value for {j!r}")
                val *= float(assignment[j]) ** e
            for f, m in t.funcs:
                inner = f.arg.eval_at(assignment)
                fn = {"exp": math.exp, "sin": math.sin, "cos": math.cos}[f.kind]
                val *= fn(inner) ** m
            total += val
        return total

    def magnitude_bound(self, assignment: Mapping) -> float:
        """Sum of absolute term values; scale reference for numeric zero tests."""
        total = 0.0
        for t in self.terms:
            val = abs(float(t.coeff))
            for p, e in t.params:
                val *= abs(_param_value(p, assignment)) ** e
            for j, e in t.jets:
                val *= abs(float(assignment[j])) ** e
            for f, m in t.funcs:
                inner = f.arg.eval_at(assignment)
                fn = {"exp": math.exp, "sin": math.sin, "cos": math.cos}[f.kind]
                val *= abs(fn(inner)) ** m
            total += val
        return total

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(repr(t) for t in self.terms)


def _param_value(p: Param, assignment: Mapping) -> float:
    if p in assignment:
        return float(assignment[p])
    if p.square is not None:
        radicand = p.square.eval_at(assignment)
        if radicand < 0:
            raise DomainError(f"negative radicand for {p.name}: {radicand}")
        return math.sqrt(radicand)
    raise MissingAssignment(f"no value for parameter {p.name}")


def _term_diff(t: Term, v) -> list[Term]:
    out: list[Term] = []
    if isinstance(v, JetVar):
        for j, e in t.jets:
            if j == v:
                rest = tuple(je for je in t.jets if je[0] != j)
                if e > 1:
                    rest = _sorted_jets(rest + ((j, e - 1),))
                out.append(Term(t.coeff * e, t.params, rest, t.funcs))
    elif isinstance(v, Param):
        for p, e in t.params:
            if p == v:
                rest = tuple(pe for pe in t.params if pe[0] != p)
                if e != 1:
                    rest = _sorted_params(rest + ((p, e - 1),))
                out.append(Term(t.coeff * e, rest, t.jets, t.funcs))
    else:
        raise ExprError(f"cannot differentiate by {v!r}")

    for fac, m in t.funcs:
        darg = fac.arg.diff(v)
        if darg.is_zero():
            continue
        others = tuple(fm for fm in t.funcs if fm[0] != fac)
        if fac.kind == "exp":
            chain = [(fac, m)]
            sign = 1
        elif fac.kind == "sin":
            chain = ([(fac, m - 1)] if m > 1 else []) + [(FuncFactor("cos", fac.arg), 1)]
            sign = 1
        else:  # cos
            chain = ([(fac, m - 1)] if m > 1 else []) + [(FuncFactor("sin", fac.arg), 1)]
            sign = -1
        base = Term(t.coeff * m * sign, t.params, t.jets,
                    _sorted_funcs(_merge_bases(others + tuple(chain))))
        for dterm in darg.terms:
            out.append(_combine(base, dterm))
    return out


def _substitute(expr: Expr, target, repl: Expr, is_param: bool) -> Expr:
    out: list[Term] = []
    for t in expr.terms:
        pieces = Expr((Term(t.coeff),))
        for p, e in t.params:
            if is_param and p == target:
                pieces = pieces * repl ** e
            else:
                pieces = pieces * Expr((Term(Fraction(1), ((p, e),)),))
        for j, e in t.jets:
            if not is_param and j == target:
                pieces = pieces * repl ** e
            else:
                pieces = pieces * Expr.of_jet(j, e)
        for f, m in t.funcs:
            arg = _substitute(f.arg, target, repl, is_param)
            pieces = pieces * func_expr(f.kind, arg) ** m
        out.extend(pieces.terms)
    return _build(out)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Expr.number(x)
    if isinstance(x, Param):
        return Expr.of_param(x)
    if isinstance(x, JetVar):
        return Expr.of_jet(x)
    raise ExprError(f"cannot coerce {x!r} to Expr")


def func_expr(kind: str, arg: Expr) -> Expr:
    """exp/sin/cos of a polynomial argument, with zero-argument folding."""
    arg = as_expr(arg)
    if arg.is_zero():
        return Expr.zero() if kind == "sin" else Expr.one()
    return _build([Term(Fraction(1), (), (), ((FuncFactor(kind, arg), 1),))])


def exp_of(arg) -> Expr:
    return func_expr("exp", as_expr(arg))


def sin_of(arg) -> Expr:
    return func_expr("sin", as_expr(arg))


def cos_of(arg) -> Expr:
    return func_expr("cos", as_expr(arg))


_ZERO = Expr(())
_ONE = Expr((Term(Fraction(1)),))


# -- exact division --------------------------------------------------------------


def _term_ratio(num: Term, den: Term) -> Optional[Term]:
    jets = dict(den.jets)
    out_jets = []
    for j, e in num.jets:
        d = jets.pop(j, 0)
        if e - d < 0:
            return None
        if e - d:
            out_jets.append((j, e - d))
    if jets:
        return None
    out_params = _merge_bases(num.params + tuple((p, -e) for p, e in den.params))
    funcs = dict(den.funcs)
    out_funcs = []
    for f, m in num.funcs:
        d = funcs.pop(f, 0)
        if m - d < 0 and f.kind != "exp":
            return None
        if m - d:
            out_funcs.append((f, m - d))
    for f, m in funcs.items():
        if f.kind != "exp":
            return None
        out_funcs.append((f, -m))
    return Term(num.coeff / den.coeff, _sorted_params(out_params),
                _sorted_jets(out_jets), _sorted_funcs(_merge_bases(out_funcs)))


def exact_div(num: Expr, den: Expr, max_steps: int = 4000) -> Optional[Expr]:
    """Quotient num/den when den divides num exactly; None otherwise."""
    den = as_expr(den)
    if den.is_zero():
        raise ZeroDivisionError("division by zero expression")
    c = den.as_rational()
    if c is not None:
        return num * Expr.number(Fraction(1) / c)
    rem = num
    quot: list[Term] = []
    lead = den.terms[0]
    for _ in range(max_steps):
        if rem.is_zero():
            return _build(quot)
        q = _term_ratio(rem.terms[0], lead)
        if q is None:
            return None
        quot.append(q)
        rem = rem - Expr((q,)) * den
    return None


# -- parameter registry ------------------------------------------------------------


class ParamRegistry:
    """Session-wide append-only registry of declared parameters."""

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._by_name: dict[str, Param] = {}

    def declare(self, name: str, nonzero: bool = False, positive: bool = False,
                square: Optional[Expr] = None) -> Param:
        if square is not None:
            nonzero = True
            for p in square.params_used():
                if p.square is not None:
                    raise ParamConflict("radical squares may not involve other radicals")
        p = Param(name, nonzero or positive, positive, square)
        with self._lock:
            existing = self._by_name.get(name)
            if existing is not None:
                if existing != p:
                    raise ParamConflict(f"parameter {name!r} already declared differently")
                return existing
            self._by_name[name] = p
            return p

    def get(self, name: str) -> Optional[Param]:
        with self._lock:
            return self._by_name.get(name)

    def names(self) -> list[str]:
        with self._lock:
            return sorted(self._by_name)

    def sqrt_of(self, square: Expr, hint: str) -> Expr:
        """Expression for the nonnegative square root of ``square``.

        Rational perfect squares come back as numbers; anything else becomes a
        declared positive radical parameter (reused when the same square was
        declared before).
        """
        square = as_expr(square)
        c = square.as_rational()
        if c is not None:
            if c < 0:
                raise DomainError(f"negative radicand {c}")
            root = Fraction(math.isqrt(c.numerator), math.isqrt(c.denominator))
            if root * root == c:
                return Expr.number(root)
        with self._lock:
            for p in self._by_name.values():
                if p.square is not None and p.square.equals(square):
                    return Expr.of_param(p)
        base = hint
        n = 0
        with self._lock:
            name = base
            while name in self._by_name:
                n += 1
                name = f"{base}{n}"
        return Expr.of_param(self.declare(name, positive=True, square=square))

    def reset(self) -> None:
        """Drop all declarations.  Test support; not part of the session model."""
        with self._lock:
            self._by_name.clear()


registry = ParamRegistry()


def param(name: str, nonzero: bool = False, positive: bool = False,
          square: Optional[Expr] = None) -> Param:
    return registry.declare(name, nonzero=nonzero, positive=positive, square=square)


def sqrt_of(square, hint: str = "s") -> Expr:
    return registry.sqrt_of(as_expr(square), hint)
