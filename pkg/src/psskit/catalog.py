"""Built-in named instances: equations, coframes, and expected verdicts.

Every triad stored here was verified against the structure equations; the
suite re-derives each verdict on every run, so the catalog doubles as the
regression backbone.  Entries marked with a family tag also pass the
existence-condition checker and classify into that family.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .classify import (T32, T33, T34, T35I, T35II, FamilySpec, generate_T35i,
                       generate_T35ii)
from .exprcore import Expr, JetVar, cos_of, exp_of, param, sin_of, sqrt_of
from .forms import Triad, triad_from_coeffs
from .jetcalc import EquationSpec, ch_eq, evolution_eq, xt_eq

_u = Expr.of_jet(JetVar(0, 0, 0))
_u1 = Expr.of_jet(JetVar(0, 1, 0))
_u2 = Expr.of_jet(JetVar(0, 2, 0))
_u3 = Expr.of_jet(JetVar(0, 3, 0))
_v = Expr.of_jet(JetVar(1, 0, 0))
_v1 = Expr.of_jet(JetVar(1, 1, 0))
_v2 = Expr.of_jet(JetVar(1, 2, 0))
_half = Fraction(1, 2)


@dataclass(frozen=True)
class Expected:
    verifies: Optional[bool]
    delta: Optional[int]
    lemma31: Optional[bool]  # None = not applicable to this equation class
    family: Optional[str]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    title: str
    eq: EquationSpec
    triad: Optional[Triad]
    expected: Expected
    lam: Optional[Expr] = None
    g: Optional[Expr] = None
    var_names: tuple[str, ...] = ("u",)
    note: str = ""


def _sg() -> CatalogEntry:
    eta = Expr.of_param(param("eta", nonzero=True))
    eq = xt_eq(sin_of(_u))
    triad = triad_from_coeffs(
        Expr.zero(), sin_of(_u) / eta,
        eta, cos_of(_u) / eta,
        _u1, Expr.zero(), 1, eq)
    return CatalogEntry(
        "sg", "sine-Gordon", eq, triad,
        Expected(True, 1, None, None),
        note="mixed-derivative class; the t-jet of u itself stays free")


def _dp() -> CatalogEntry:
    mu = Expr.of_param(param("mu"))
    s = sqrt_of(1 + mu ** 2, hint="s")
    rhs = _u * _u3 + 3 * _u1 * _u2 - 4 * _u * _u1
    eq = ch_eq(rhs)
    w = _u - _u2
    p = _u * _u2 - 2 * _u * _u1 + _u1 ** 2
    triad = triad_from_coeffs(
        w, p,
        mu * w + 2 * s, mu * p,
        s * w + 2 * mu, s * p, 1, eq)
    return CatalogEntry(
        "dp", "Degasperis-Procesi", eq, triad,
        Expected(True, 1, None, None),
        note="quadratic u*u3 class, outside the cubic classification; "
             "verified directly")


def _ch(sign: int) -> CatalogEntry:
    eta = Expr.of_param(param("eta", nonzero=True))
    rhs = _u * _u3 + 2 * _u1 * _u2 - 3 * _u * _u1
    eq = ch_eq(rhs)
    w = _u - _u2
    h2 = eta ** 2 * _half
    triad = triad_from_coeffs(
        w + h2 - 1, -_u * (w + h2) + sign * eta * _u1 - h2 + 1,
        eta, -eta * _u + sign * _u1 - eta,
        sign * (w + h2), -sign * _u * (w + h2) + eta * _u1 - sign * _u - sign * h2,
        1, eq)
    tag = "plus" if sign > 0 else "minus"
    return CatalogEntry(
        f"ch_{tag}", f"Camassa-Holm ({'+' if sign > 0 else '-'} branch)", eq, triad,
        Expected(True, 1, None, None),
        note="quadratic u*u3 class; third coframe leg rebalanced so the "
             "structure equations close")


def _nls_plus() -> CatalogEntry:
    eta = Expr.of_param(param("eta_s"))
    sq = _u ** 2 + _v ** 2
    eq = evolution_eq(-_v2 - 2 * sq * _v, _u2 + 2 * sq * _u)
    triad = triad_from_coeffs(
        2 * _v, 2 * (-2 * eta * _v + _u1),
        2 * eta, 2 * (-2 * eta ** 2 + sq),
        -2 * _u, 2 * (2 * eta * _u + _v1), -1, eq)
    return CatalogEntry(
        "nls_plus", "focusing Schrodinger flow", eq, triad,
        Expected(True, -1, None, None), var_names=("u", "v"),
        note="two-component evolution system; the only spherical entry")


def _gch() -> CatalogEntry:
    mu = Expr.of_param(param("mu"))
    s = sqrt_of(1 + mu ** 2, hint="s")
    g = (-_u ** 2 * _u2 - 3 * _u * _u1 ** 2 - 2 * _u ** 2 * _u1
         + 4 * _u * _u1 * _u2 + _u1 ** 3)
    eq = ch_eq(_u ** 2 * _u3 + g)
    w = _u - _u2
    phi = _u ** 2 * _u2 - 2 * _u ** 2 * _u1 + _u * _u1 ** 2
    triad = triad_from_coeffs(
        w, phi,
        mu * w + s, mu * phi,
        s * w + mu, s * phi, 1, eq)
    return CatalogEntry(
        "gch", "generalized Camassa-Holm", eq, triad,
        Expected(True, 1, True, T34), lam=Expr.one(), g=g)


def _ex32(tag: str, psi: Expr, g: Expr, title: str) -> CatalogEntry:
    a = Expr.of_param(param("a", nonzero=True))
    mu = Expr.of_param(param("mu"))
    s = sqrt_of(1 + mu ** 2, hint="s")
    eq = ch_eq(g)
    w = _u - _u2
    triad = triad_from_coeffs(
        w, psi,
        mu * w + s * a, mu * psi,
        s * w + mu * a, s * psi, 1, eq)
    return CatalogEntry(
        f"ex32_{tag}", title, eq, triad,
        Expected(True, 1, True, T32), lam=Expr.zero(), g=g)


def _ex32_entries() -> list[CatalogEntry]:
    a = Expr.of_param(param("a", nonzero=True))
    out = []
    psi = _u * _u1
    out.append(_ex32("i", psi, a * _u * _u1 + _u1 ** 2 + _u * _u2,
                     "transport source u*u1"))
    e = exp_of(_u * _u1)
    out.append(_ex32("ii", e, a * e + (_u1 ** 2 + _u * _u2) * e,
                     "exponential source exp(u*u1)"))
    out.append(_ex32("iii", _u ** 3, a * _u ** 3 + 3 * _u ** 2 * _u1,
                     "power source u^3"))
    out.append(_ex32("iv", _u1 ** 3, a * _u1 ** 3 + 3 * _u1 ** 2 * _u2,
                     "power source u1^3"))
    return out


def _ex33(tag: str, sign: int, f: Expr, g: Expr, title: str,
          note: str = "") -> CatalogEntry:
    # sign = +1 realizes the source scale -2, sign = -1 the scale +2
    mu = Expr.of_param(param("mu"))
    eta = Expr.of_param(param("eta", nonzero=True))
    eq = ch_eq(_u ** 2 * _u3 + g)
    mu3 = -sign * mu
    eta3 = -sign * eta
    gamma = sign * eta
    phi1 = -2 * eta * _u * _u1 * gamma.inverse()
    lam_u2 = _u ** 2
    f21 = mu * f + eta
    f31 = mu3 * f + eta3
    triad = triad_from_coeffs(
        f, -lam_u2 * f + phi1,
        f21, -lam_u2 * f21 + mu * phi1,
        f31, -lam_u2 * f31 + mu3 * phi1, 1, eq)
    return CatalogEntry(
        f"ex33_{tag}", title, eq, triad,
        Expected(True, 1, True, T33), lam=Expr.one(), g=g, note=note)


def _ex33_entries() -> list[CatalogEntry]:
    w = _u - _u2
    out = []
    g_i = -3 * _u ** 2 * _u1 + 2 * _u * _u1 * _u2 - 2 * (_u1 ** 2 + _u * _u2)
    out.append(_ex33("i", 1, w, g_i, "cubic flow, source scale -2"))
    g_ii = (-2 * _u * _u1 - _u ** 2 * _u1
            - 2 * (_u1 ** 2 + _u * _u2) * exp_of(_u2 - _u))
    out.append(_ex33("ii", 1, exp_of(w), g_ii, "exponential coframe slot"))
    g_iii = -3 * _u ** 2 * _u1 + 2 * _u * _u1 * _u2 + 2 * (_u1 ** 2 + _u * _u2)
    out.append(_ex33("iii", -1, w, g_iii, "power coframe slot, unit exponent",
                     note="the power-slot family leaves the polynomial language "
                          "for exponents beyond one; pinned at the unit exponent"))
    return out


def _ex34() -> CatalogEntry:
    eta = Expr.of_param(param("eta", nonzero=True))
    sigma = Expr.of_param(param("sigma"))
    spec = FamilySpec(T35I, params={"lambda": 1, "theta": 1, "nu": 1,
                                    "sigma": sigma, "C2": 0, "mu2": 0,
                                    "eta2": eta},
                      signs={"mu3": 1})
    fam = generate_T35i(spec)
    return CatalogEntry(
        "ex34", "drift family with exponential-in-u block off", fam.equation,
        fam.triad, Expected(True, 1, True, T35I), lam=fam.lam, g=fam.g)


def _ex35() -> CatalogEntry:
    eta = Expr.of_param(param("eta", nonzero=True))
    sigma = Expr.of_param(param("sigma"))
    tau = Expr.of_param(param("tau", positive=True))
    nu = Expr.of_param(param("nu", nonzero=True))
    lam = Expr.of_param(param("lambda"))
    spec = FamilySpec(T35II, params={"lambda": lam, "tau": tau, "nu": nu,
                                     "sigma": sigma, "mu2": 0, "eta2": eta},
                      slots={"phi": tau.inverse()},
                      signs={"branch": 1, "mu3": 1})
    fam = generate_T35ii(spec)
    return CatalogEntry(
        "ex35", "exponential-in-slope family with constant profile", fam.equation,
        fam.triad, Expected(True, 1, True, T35II), lam=fam.lam, g=fam.g,
        note="profile fixed to 1/tau; the slope coefficient stays symbolic")


def _novikov() -> CatalogEntry:
    g = -4 * _u ** 2 * _u1 + 3 * _u * _u1 * _u2
    eq = ch_eq(_u ** 2 * _u3 + g)
    return CatalogEntry(
        "novikov", "Novikov", eq, None,
        Expected(None, None, None, None), lam=Expr.one(), g=g,
        note="matches no family within the bounded ansatz")


def load_catalog() -> tuple[CatalogEntry, ...]:
    entries = [
        _sg(),
        _dp(),
        _nls_plus(),
        _ch(1),
        _ch(-1),
        _gch(),
        *_ex32_entries(),
        *_ex33_entries(),
        _ex34(),
        _ex35(),
        _novikov(),
    ]
    return tuple(entries)


def entry(name: str) -> CatalogEntry:
    for e in load_catalog():
        if e.name == name:
            return e
    raise KeyError(name)
