"""Classification machinery for the cubic family u_t - u_xxt = L*u^2*u_xxx + G.

Implements the affine-coefficient extraction, the existence-condition checker,
the derived classifier quantities, one generator per classification family,
and a matcher that tests whether a bare equation fits any family within a
bounded polynomial ansatz.

Throughout, the coframe data is written w_i = f_i1 dx + f_i2 dt with

    f_21 = mu2 f_11 + eta2,   f_31 = mu3 f_11 + eta3,
    f_i2 = -L u^2 f_i1 + phi_i(u, u_1),

and the derived quantities

    L_p = phi_p - mu_p phi_1,  M = mu2 phi3 - mu3 phi2,
    N = eta2 phi3 - eta3 phi2, Q = -(L_3 + mu2 M),
    gamma = mu2 mu3 eta2 - (1 + mu2^2) eta3,
    alpha = delta (1 + mu2^2) - mu3^2.

The (Q, L_2, gamma) zero-pattern selects the family: T32 (0,0,0),
T33 (0,0,!=0), T34 (0,!=0,0), T35 (!=0,!=0,!=0); other patterns admit no
equation of this shape.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .exprcore import (Expr, ExprError, JetVar, NotInvertible, Param, as_expr,
                       exact_div, exp_of, sqrt_of)
from .forms import OneForm, Triad, sample_assignment, structure_residuals, triad_from_coeffs
from .jetcalc import CH, EquationSpec, ch_eq

T32 = "T32"
T33 = "T33"
T34 = "T34"
T35I = "T35i"
T35II = "T35ii"
T35 = "T35"
THEOREMS = (T32, T33, T34, T35I, T35II)

U = JetVar(0, 0, 0)
U1 = JetVar(0, 1, 0)
U2 = JetVar(0, 2, 0)
U3 = JetVar(0, 3, 0)
_u = Expr.of_jet(U)
_u1 = Expr.of_jet(U1)
_u2 = Expr.of_jet(U2)
_u3 = Expr.of_jet(U3)


class ClassifyError(ExprError):
    pass


class NotAffinelyRelated(ClassifyError):
    """The dx-coefficients are not affine in f_11 with constant coefficients."""

    def __init__(self, message: str, obstruction: Optional[Expr] = None):
        super().__init__(message)
        self.obstruction = obstruction


class PhiNotRecoverable(ClassifyError):
    """f_i2 + L u^2 f_i1 depends on u_2 or higher, so no phi_i(u, u_1) exists."""


class MissingSlot(ClassifyError):
    pass


class AssumptionViolated(ClassifyError):
    pass


class ConstraintViolated(ClassifyError):
    pass


class UnrepresentableEquation(ClassifyError):
    """The generated right-hand side leaves the polynomial expression language."""


class UnsupportedAnsatz(ClassifyError):
    """The equation contains function factors outside the matcher's shapes."""


# --------------------------------------------------------------------------
# basic decompositions
# --------------------------------------------------------------------------


def split_cubic(rhs: Expr) -> tuple[Expr, Expr]:
    """Split a right-hand side as lam*u^2*u3 + G with G free of u3."""
    lam_u2 = rhs.coefficient(U3, 1)
    if lam_u2.is_zero():
        lam = Expr.zero()
    else:
        lam = exact_div(lam_u2, _u ** 2)
        if lam is None or not lam.is_constant():
            raise ClassifyError("the u3 coefficient is not a constant multiple of u^2")
    g = rhs - lam * _u ** 2 * _u3
    if g.max_xorder() > 2 or g.has_tjets():
        raise ClassifyError("remainder depends on jets beyond u2")
    return lam, g


def _term_is_constant(t) -> bool:
    return not t.jets and all(f.arg.is_constant() for f, _ in t.funcs)


def _jet_part(e: Expr) -> Expr:
    return Expr(tuple(t for t in e.terms if not _term_is_constant(t)))


def _const_part(e: Expr) -> Expr:
    return Expr(tuple(t for t in e.terms if _term_is_constant(t)))


def affine_match(f: Expr, base: Expr) -> tuple[Expr, Expr]:
    """Constants (mu, eta) with f = mu*base + eta, or NotAffinelyRelated."""
    fj, bj = _jet_part(f), _jet_part(base)
    if bj.is_zero():
        raise NotAffinelyRelated("the reference coefficient has no jet part", base)
    if fj.is_zero():
        mu = Expr.zero()
    else:
        mu = exact_div(fj, bj)
        if mu is None or not mu.is_constant():
            raise NotAffinelyRelated("jet parts are not proportional", fj)
    eta = f - mu * base
    if not eta.is_constant():
        raise NotAffinelyRelated("non-constant remainder", eta)
    return mu, eta


@dataclass(frozen=True)
class MuEta:
    mu2: Expr
    eta2: Expr
    mu3: Expr
    eta3: Expr


def extract_mu_eta(t: Triad) -> MuEta:
    mu2, eta2 = affine_match(t.w2.cx, t.w1.cx)
    mu3, eta3 = affine_match(t.w3.cx, t.w1.cx)
    return MuEta(mu2, eta2, mu3, eta3)


def recover_phis(t: Triad, lam: Expr) -> tuple[Expr, Expr, Expr]:
    """phi_i = f_i2 + lam u^2 f_i1, each required to depend on (u, u1) only."""
    out = []
    for w in t.forms():
        phi = w.ct + lam * _u ** 2 * w.cx
        bad = [j for j in phi.jet_vars() if j.torder or j.xorder >= 2]
        if bad:
            raise PhiNotRecoverable(f"recovered coefficient depends on {sorted(bad, key=JetVar.sort_key)!r}")
        out.append(phi)
    return tuple(out)


# --------------------------------------------------------------------------
# classifier quantities
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassifierQuantities:
    L2: Expr
    L3: Expr
    M: Expr
    N: Expr
    Q: Expr
    gamma: Expr
    alpha: Expr
    delta: int
    case: str


def _case_of(q_zero: bool, l2_zero: bool, gamma_zero: bool) -> str:
    table = {
        (True, True, True): T32,
        (True, True, False): T33,
        (True, False, True): T34,
        (False, False, False): T35,
    }
    return table.get((q_zero, l2_zero, gamma_zero), "excluded")


def quantities_from_parts(mu_eta: MuEta, phis: Sequence[Expr], delta: int) -> ClassifierQuantities:
    mu2, eta2, mu3, eta3 = mu_eta.mu2, mu_eta.eta2, mu_eta.mu3, mu_eta.eta3
    phi1, phi2, phi3 = phis
    l2 = phi2 - mu2 * phi1
    l3 = phi3 - mu3 * phi1
    m = mu2 * phi3 - mu3 * phi2
    n = eta2 * phi3 - eta3 * phi2
    q = -(l3 + mu2 * m)
    gamma = mu2 * mu3 * eta2 - (1 + mu2 ** 2) * eta3
    alpha = delta * (1 + mu2 ** 2) - mu3 ** 2
    return ClassifierQuantities(
        L2=l2, L3=l3, M=m, N=n, Q=q, gamma=gamma, alpha=alpha, delta=delta,
        case=_case_of(q.is_zero(), l2.is_zero(), gamma.is_zero()))


def quantities(t: Triad) -> ClassifierQuantities:
    """Classifier quantities of a triad attached to a cubic-class equation."""
    if t.eq.rules[0].kind != CH:
        raise ClassifyError("classification applies to the u_t - u_xxt class")
    lam, _ = split_cubic(t.eq.rules[0].rhs)
    mu_eta = extract_mu_eta(t)
    phis = recover_phis(t, lam)
    return quantities_from_parts(mu_eta, phis, t.delta)


# --------------------------------------------------------------------------
# the existence-condition checker
# --------------------------------------------------------------------------


def _nonzero_by_sampling(e: Expr, seed: int = 0, samples: int = 20,
                         threshold: float = 1e-6) -> tuple[bool, Optional[dict]]:
    if e.is_zero():
        return False, None
    rng = random.Random(seed)
    for _ in range(samples):
        a = sample_assignment(e, rng)
        if abs(e.eval_at(a)) > threshold:
            return True, a
    return False, None


@dataclass(frozen=True)
class Lemma31Report:
    conditions: Mapping[str, bool]
    mu_eta: Optional[MuEta]
    phis: Optional[tuple[Expr, Expr, Expr]]
    lam: Expr
    g: Expr
    details: Mapping[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.conditions.values())


CONDITION_NAMES = ("jet_structure", "travelling_argument", "phi_recovery",
                   "balance_1", "balance_2", "balance_3", "nondegeneracy")


def lemma31_check(t: Triad, eq: Optional[EquationSpec] = None, seed: int = 0) -> Lemma31Report:
    """Check the seven existence conditions for the cubic class against a triad.

    ``jet_structure``: dx-coefficients free of u1 and of u_k for k >= 3, and
    dt-coefficients free of u_k for k >= 3.  ``travelling_argument``: each
    dx-coefficient is a function of u - u2.  ``phi_recovery``: neveikia
    f_i2 + lam u^2 f_i1 depends only on (u, u1).  The three balance identities
    couple the recovered coefficients to the equation, and the final condition
    is the sampled nondegeneracy inequality.
    """
    eq = eq if eq is not None else t.eq
    if eq.rules[0].kind != CH:
        raise ClassifyError("the checker applies to the u_t - u_xxt class")
    lam, g = split_cubic(eq.rules[0].rhs)
    conds: dict[str, bool] = {}
    details: dict[str, str] = {}

    dxc = [w.cx for w in t.forms()]
    dtc = [w.ct for w in t.forms()]
    ok = True
    for c in dxc:
        if c.depends_on(U1) or c.max_xorder() > 2:
            ok = False
    for c in dtc:
        if c.max_xorder() > 2:
            ok = False
    conds["jet_structure"] = ok
    conds["travelling_argument"] = all((c.diff(U) + c.diff(U2)).is_zero() for c in dxc)

    mu_eta: Optional[MuEta] = None
    try:
        mu_eta = extract_mu_eta(t)
    except NotAffinelyRelated as err:
        details["affine"] = str(err)

    phis: Optional[tuple[Expr, Expr, Expr]] = None
    try:
        phis = recover_phis(t, lam)
        conds["phi_recovery"] = True
    except PhiNotRecoverable as err:
        conds["phi_recovery"] = False
        details["phi_recovery"] = str(err)

    if mu_eta is None or phis is None:
        for name in ("balance_1", "balance_2", "balance_3", "nondegeneracy"):
            conds[name] = False
        return Lemma31Report(conds, mu_eta, phis, lam, g, details)

    mu2, eta2, mu3, eta3 = mu_eta.mu2, mu_eta.eta2, mu_eta.mu3, mu_eta.eta3
    phi1, phi2, phi3 = phis
    qs = quantities_from_parts(mu_eta, phis, t.delta)
    f11 = t.w1.cx

    b1 = (-g * f11.diff(U)
          + (-2 * lam * _u * f11 - lam * _u ** 2 * f11.diff(U) + phi1.diff(U)) * _u1
          + phi1.diff(U1) * _u2 + qs.M * f11 + qs.N)
    conds["balance_1"] = b1.is_zero()

    b2 = (qs.Q * f11 + qs.L2.diff(U) * _u1 + qs.L2.diff(U1) * _u2
          - 2 * lam * eta2 * _u * _u1 - mu2 * qs.N + eta3 * phi1)
    conds["balance_2"] = b2.is_zero()

    b3 = (-(t.delta * qs.L2 + mu3 * qs.M) * f11 + qs.L3.diff(U) * _u1
          + qs.L3.diff(U1) * _u2 - 2 * lam * eta3 * _u * _u1
          - mu3 * qs.N + t.delta * eta2 * phi1)
    conds["balance_3"] = b3.is_zero()

    ineq = -qs.L2 * f11 + eta2 * phi1
    nz, _witness = _nonzero_by_sampling(ineq, seed=seed)
    conds["nondegeneracy"] = nz
    return Lemma31Report(conds, mu_eta, phis, lam, g, details)


# --------------------------------------------------------------------------
# family generators
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    theorem: str
    params: Mapping[str, Expr] = field(default_factory=dict)
    slots: Mapping[str, Expr] = field(default_factory=dict)
    signs: Mapping[str, int] = field(default_factory=dict)
    delta: int = 1

    def param(self, name: str, default=None) -> Expr:
        if name in self.params:
            return as_expr(self.params[name])
        if default is None:
            raise MissingSlot(f"parameter {name!r} is required for {self.theorem}")
        return as_expr(default)

    def slot(self, name: str) -> Expr:
        if name not in self.slots:
            raise MissingSlot(f"slot {name!r} is required for {self.theorem}")
        return as_expr(self.slots[name])

    def sign(self, name: str) -> int:
        if name not in self.signs:
            raise MissingSlot(f"sign choice {name!r} is required for {self.theorem}")
        s = self.signs[name]
        if s not in (1, -1):
            raise MissingSlot(f"sign {name!r} must be +1 or -1")
        return s


@dataclass(frozen=True)
class ConstraintRecord:
    name: str
    value: Expr
    holds: bool


@dataclass(frozen=True)
class GeneratedFamily:
    spec: FamilySpec
    lam: Expr
    g: Expr
    equation: EquationSpec
    triad: Triad
    quantities: ClassifierQuantities
    constraints: tuple[ConstraintRecord, ...]
    extras: Mapping[str, Expr] = field(default_factory=dict)

    @property
    def rhs(self) -> Expr:
        return self.equation.rules[0].rhs


def _require_nonzero(e: Expr, what: str) -> None:
    if e.is_zero():
        raise AssumptionViolated(f"{what} must be nonzero")


def _invert(e: Expr, what: str) -> Expr:
    try:
        return e.inverse()
    except NotInvertible as err:
        raise AssumptionViolated(f"{what} is not invertible here: {err}") from err


def _check_slot_f(f: Expr) -> Expr:
    """Validate a function-of-(u - u2) slot; returns f' (= df/du)."""
    if f.depends_on(U1) or f.max_xorder() > 2 or f.has_tjets():
        raise AssumptionViolated("the coframe slot must depend on u - u2 only")
    if not (f.diff(U) + f.diff(U2)).is_zero():
        raise AssumptionViolated("the coframe slot must be a function of u - u2")
    fp = f.diff(U)
    _require_nonzero(fp, "the slot derivative")
    return fp


def _check_slot_uu1(phi: Expr, what: str) -> None:
    bad = [j for j in phi.jet_vars() if j.torder or j.xorder >= 2]
    if bad:
        raise AssumptionViolated(f"{what} must depend on u and u1 only")


def _assemble(spec: FamilySpec, lam: Expr, f11: Expr, mu_eta: MuEta,
              phis: tuple[Expr, Expr, Expr],
              constraints: list[ConstraintRecord],
              extras: Optional[dict] = None) -> GeneratedFamily:
    mu2, eta2, mu3, eta3 = mu_eta.mu2, mu_eta.eta2, mu_eta.mu3, mu_eta.eta3
    phi1, phi2, phi3 = phis
    m = mu2 * phi3 - mu3 * phi2
    n = eta2 * phi3 - eta3 * phi2
    f11_u = f11.diff(U)
    num = ((-2 * lam * _u * f11 - lam * _u ** 2 * f11_u + phi1.diff(U)) * _u1
           + phi1.diff(U1) * _u2 + m * f11 + n)
    g = exact_div(num, f11_u)
    if g is None:
        try:
            g = num * _invert(f11_u, "the slot derivative")
        except AssumptionViolated:
            g = None
    if g is None or g.max_xorder() > 2:
        raise UnrepresentableEquation(
            "the induced right-hand side is not polynomial in the jet variables")
    _require_nonzero(g, "the non-cubic part of the equation")
    rhs = lam * _u ** 2 * _u3 + g
    eq = ch_eq(rhs)
    f21 = mu2 * f11 + eta2
    f31 = mu3 * f11 + eta3
    lam_u2 = lam * _u ** 2
    triad = triad_from_coeffs(
        f11, -lam_u2 * f11 + phi1,
        f21, -lam_u2 * f21 + phi2,
        f31, -lam_u2 * f31 + phi3,
        spec.delta, eq)
    qs = quantities_from_parts(mu_eta, phis, spec.delta)
    return GeneratedFamily(spec, lam, g, eq, triad, qs, tuple(constraints),
                           dict(extras or {}))


def _reject_spherical(spec: FamilySpec) -> None:
    if spec.delta != 1:
        raise AssumptionViolated(
            "no equation of this class fits a curvature sign of -1")


def generate_T32(spec: FamilySpec) -> GeneratedFamily:
    """Families with Q = L2 = 0 and gamma = 0; the cubic coefficient is zero."""
    _reject_spherical(spec)
    lam = spec.param("lambda", Expr.zero())
    if not lam.is_zero():
        raise AssumptionViolated("this family forces a vanishing cubic coefficient")
    f = spec.slot("f")
    _check_slot_f(f)
    phi1 = spec.slot("phi1")
    _check_slot_uu1(phi1, "phi1")
    _require_nonzero(phi1, "phi1")
    mu2 = spec.param("mu2", Expr.zero())
    eta2 = spec.param("eta2")
    _require_nonzero(eta2, "eta2")
    sgn = spec.sign("mu3")
    s = sqrt_of(1 + mu2 ** 2)
    mu3 = sgn * s
    eta3 = mu2 * eta2 * _invert(mu3, "mu3")
    mu_eta = MuEta(mu2, eta2, mu3, eta3)
    phis = (phi1, mu2 * phi1, mu3 * phi1)
    gamma = mu2 * mu3 * eta2 - (1 + mu2 ** 2) * eta3
    constraints = [ConstraintRecord("gamma_vanishes", gamma, gamma.is_zero())]
    return _assemble(spec, Expr.zero(), f, mu_eta, phis, constraints)


def generate_T33(spec: FamilySpec) -> GeneratedFamily:
    """Families with Q = L2 = 0 and gamma != 0; lam*eta2 must be nonzero."""
    _reject_spherical(spec)
    lam = spec.param("lambda")
    _require_nonzero(lam, "lambda")
    f = spec.slot("f")
    _check_slot_f(f)
    mu2 = spec.param("mu2", Expr.zero())
    mu3 = spec.param("mu3")
    eta2 = spec.param("eta2")
    eta3 = spec.param("eta3")
    _require_nonzero(eta2, "eta2")
    ident = eta2 ** 2 - eta3 ** 2 - (mu2 * eta3 - mu3 * eta2) ** 2
    if not ident.is_zero():
        raise ConstraintViolated(
            "the parameters must satisfy eta2^2 - eta3^2 - (mu2 eta3 - mu3 eta2)^2 = 0")
    gamma = mu2 * mu3 * eta2 - (1 + mu2 ** 2) * eta3
    _require_nonzero(gamma, "gamma")
    ginv = _invert(gamma, "gamma")
    phi1 = -2 * lam * eta2 * _u * _u1 * ginv
    mu_eta = MuEta(mu2, eta2, mu3, eta3)
    phis = (phi1, mu2 * phi1, mu3 * phi1)
    constraints = [ConstraintRecord("eta_identity", ident, True),
                   ConstraintRecord("gamma_nonzero", gamma, True)]
    return _assemble(spec, lam, f, mu_eta, phis, constraints)


def generate_T34(spec: FamilySpec) -> GeneratedFamily:
    """Families with Q = 0, L2 != 0, gamma = 0; L2 = lam*eta2*u^2 + C1."""
    _reject_spherical(spec)
    lam = spec.param("lambda")
    c1 = spec.param("C1", Expr.zero())
    f = spec.slot("f")
    _check_slot_f(f)
    phi1 = as_expr(spec.slots.get("phi1", Expr.zero()))
    _check_slot_uu1(phi1, "phi1")
    mu2 = spec.param("mu2", Expr.zero())
    eta2 = spec.param("eta2")
    sgn = spec.sign("mu3")
    gate = (lam * eta2) ** 2 + c1 ** 2
    if gate.is_zero():
        raise AssumptionViolated("(lambda*eta2)^2 + C1^2 must be nonzero")
    s = sqrt_of(1 + mu2 ** 2)
    mu3 = sgn * s
    mu3_inv = _invert(mu3, "mu3")
    eta3 = mu2 * eta2 * mu3_inv
    l2 = lam * eta2 * _u ** 2 + c1
    phis = (phi1, mu2 * phi1 + l2, mu3 * phi1 + mu2 * l2 * mu3_inv)
    mu_eta = MuEta(mu2, eta2, mu3, eta3)
    constraints = [ConstraintRecord("l2_nonzero_gate", gate, True)]
    return _assemble(spec, lam, f, mu_eta, phis, constraints)


def generate_T35i(spec: FamilySpec) -> GeneratedFamily:
    """Exponential-in-u families with Q, L2, gamma all nonzero."""
    _reject_spherical(spec)
    lam = spec.param("lambda", Expr.zero())
    theta = spec.param("theta")
    nu = spec.param("nu")
    sigma = spec.param("sigma", Expr.zero())
    c2 = spec.param("C2", Expr.zero())
    mu2 = spec.param("mu2", Expr.zero())
    eta2 = spec.param("eta2")
    sgn = spec.sign("mu3")
    _require_nonzero(theta, "theta")
    _require_nonzero(nu, "nu")
    gate = lam ** 2 + c2 ** 2
    if gate.is_zero():
        raise AssumptionViolated("lambda^2 + C2^2 must be nonzero")

    theta_inv = _invert(theta, "theta")
    nu_inv = _invert(nu, "nu")
    s = sqrt_of(1 + mu2 ** 2)
    mu3 = sgn * s
    mu3_inv = _invert(mu3, "mu3")
    gamma = -theta * mu3 * nu_inv
    gamma_inv = _invert(gamma, "gamma")
    eta3 = (mu2 * eta2 + theta * nu_inv) * mu3_inv

    e_u = exp_of(theta * _u)
    drift = 2 * lam * theta_inv - theta * c2 * e_u + 2 * lam * _u
    phi1 = (mu3 * gamma_inv * (2 * lam - theta ** 2 * c2 * e_u) * _u1 ** 2
            - drift * ((eta2 * gamma_inv + mu2 * mu3_inv) * _u1
                       + (nu * _u - sigma) * theta_inv))
    phi2 = mu2 * phi1 + drift * (mu3 * _u1 - eta2 * theta_inv)
    phi3 = mu3 * phi1 + drift * (mu2 * _u1 - eta3 * theta_inv)
    f11 = nu * (_u - _u2) - sigma

    c = 1 + mu2 ** 2
    sinv2 = Expr.of_param(s.terms[0].params[0][0], -2) if s.as_rational() is None \
        else Expr.number(1) / s.as_rational() ** 2
    zeta1 = (2 * sigma * nu_inv - theta_inv - theta * nu_inv ** 2 * sinv2
             - eta2 * (2 * theta * mu2 - nu * eta2) * theta_inv * nu_inv * sinv2)

    mu_eta = MuEta(mu2, eta2, mu3, eta3)
    gam_expr = mu2 * mu3 * eta2 - c * eta3
    constraints = [ConstraintRecord("gamma_nonzero", gam_expr, not gam_expr.is_zero()),
                   ConstraintRecord("l2_gate", gate, True)]
    return _assemble(spec, lam, f11, mu_eta, (phi1, phi2, phi3), constraints,
                     extras={"zeta1": zeta1})


def generate_T35ii(spec: FamilySpec) -> GeneratedFamily:
    """Exponential-in-u1 families with Q, L2, gamma all nonzero."""
    _reject_spherical(spec)
    lam = spec.param("lambda", Expr.zero())
    tau = spec.param("tau")
    nu = spec.param("nu")
    sigma = spec.param("sigma", Expr.zero())
    mu2 = spec.param("mu2", Expr.zero())
    eta2 = spec.param("eta2")
    branch = spec.sign("branch")
    sgn3 = spec.sign("mu3")
    phi = spec.slot("phi")
    if phi.jet_vars() - {U}:
        raise AssumptionViolated("the phi slot must depend on u only")
    _require_nonzero(phi, "phi")
    _require_nonzero(tau, "tau")
    _require_nonzero(nu, "nu")
    _require_nonzero(eta2, "eta2")
    tq = tau.as_rational()
    if tq is not None and tq <= 0:
        raise AssumptionViolated("tau must be positive")

    c = (1 + mu2 ** 2).as_rational()
    if c is None:
        raise AssumptionViolated("mu2 must be an exact rational in this family")

    tau_inv = _invert(tau, "tau")
    nu_inv = _invert(nu, "nu")
    radicand = c * nu ** 2 - tau ** 2
    rq = radicand.as_rational()
    if rq is not None and rq < 0:
        raise AssumptionViolated("tau^2 may not exceed (1 + mu2^2) nu^2")
    r = sqrt_of(radicand, hint="r")
    mu3 = sgn3 * r * nu_inv
    gamma = branch * tau * eta2 * nu_inv
    eta3 = (mu2 * mu3 * eta2 - gamma) / c

    e_u1 = exp_of(branch * tau * _u1)
    phi_d = phi.diff(U)
    phi1 = ((branch * tau * (nu * _u - sigma) * phi + nu * phi_d * _u1) * e_u1
            - branch * 2 * lam * nu * tau_inv * _u * _u1)
    phi2 = mu2 * phi1 + branch * tau * eta2 * phi * e_u1
    phi3 = mu3 * phi1 + branch * tau * eta3 * phi * e_u1
    f11 = nu * (_u - _u2) - sigma
    zeta2 = sigma * nu_inv - branch * (mu3 * eta2 - mu2 * eta3) * tau_inv

    mu_eta = MuEta(mu2, eta2, mu3, eta3)
    gam_expr = mu2 * mu3 * eta2 - c * eta3
    constraints = [ConstraintRecord("gamma_nonzero", gam_expr, not gam_expr.is_zero())]
    return _assemble(spec, lam, f11, mu_eta, (phi1, phi2, phi3), constraints,
                     extras={"zeta2": zeta2})


GENERATORS = {
    T32: generate_T32,
    T33: generate_T33,
    T34: generate_T34,
    T35I: generate_T35i,
    T35II: generate_T35ii,
}


def generate(spec: FamilySpec) -> GeneratedFamily:
    if spec.theorem not in GENERATORS:
        raise ClassifyError(f"unknown family {spec.theorem!r}")
    return GENERATORS[spec.theorem](spec)
