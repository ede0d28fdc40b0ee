"""Decide whether a bare equation u_t - u_xxt = L u^2 u_xxx + G fits a family.

Matching works against each family's displayed shape with a bounded ansatz:
the coframe slot is affine in u - u2, polynomial slots have total degree at
most ``degree``, and undetermined leading constants must come out rational.
Verdicts are per family: matched (with a generating spec), no_match (with the
first inconsistent piece), or unsupported when the equation leaves the ansatz.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .classify import (T32, T33, T34, T35I, T35II, THEOREMS, ClassifyError,
                       FamilySpec, UnsupportedAnsatz, U, U1, U2, _u, _u1, _u2,
                       generate)
from .exprcore import (Expr, NotInvertible, Param, Term, as_expr, registry,
                       sqrt_of)

Mono = tuple[int, int, int]  # exponents of (u, u1, u2)


@dataclass(frozen=True)
class FamilyMatch:
    theorem: str
    verdict: str  # "matched" | "no_match" | "unsupported"
    detail: str
    spec: Optional[FamilySpec] = None

    @property
    def matched(self) -> bool:
        return self.verdict == "matched"


@dataclass(frozen=True)
class MatchReport:
    lam: Expr
    g: Expr
    degree: int
    results: tuple[FamilyMatch, ...]

    def result(self, theorem: str) -> FamilyMatch:
        for r in self.results:
            if r.theorem == theorem:
                return r
        raise KeyError(theorem)

    def matches(self) -> tuple[FamilyMatch, ...]:
        return tuple(r for r in self.results if r.matched)


# --------------------------------------------------------------------------
# polynomial views of the target equation
# --------------------------------------------------------------------------


def _mono_of(term: Term) -> Optional[Mono]:
    out = [0, 0, 0]
    for j, e in term.jets:
        if j == U:
            out[0] = e
        elif j == U1:
            out[1] = e
        elif j == U2:
            out[2] = e
        else:
            return None
    return tuple(out)


def _mono_name(m: Mono) -> str:
    bits = []
    for name, e in zip(("u", "u1", "u2"), m):
        if e == 1:
            bits.append(name)
        elif e > 1:
            bits.append(f"{name}^{e}")
    return "*".join(bits) or "1"


def _poly_dict(e: Expr) -> dict[Mono, Expr]:
    """{(i,j,k): coefficient Expr}; function-free terms only."""
    out: dict[Mono, Expr] = {}
    for t in e.terms:
        m = _mono_of(t)
        if m is None:
            raise UnsupportedAnsatz(f"jet {t!r} outside (u, u1, u2)")
        coeff = Expr((Term(t.coeff, t.params),))
        out[m] = out.get(m, Expr.zero()) + coeff
    return {m: c for m, c in out.items() if not c.is_zero()}


def _split_exp(g: Expr) -> tuple[Expr, dict[Expr, Expr]]:
    """Split into the function-free part and {exp argument: cofactor}."""
    plain: list[Term] = []
    buckets: dict = {}
    for t in g.terms:
        if not t.funcs:
            plain.append(t)
            continue
        if len(t.funcs) != 1 or t.funcs[0][1] != 1 or t.funcs[0][0].kind != "exp":
            raise UnsupportedAnsatz("only plain exponential factors fit the family shapes")
        arg = t.funcs[0][0].arg
        rest = Term(t.coeff, t.params, t.jets)
        buckets.setdefault(arg, []).append(rest)
    return Expr(tuple(plain)), {a: Expr(tuple(ts)) for a, ts in buckets.items()}


def _linear_arg(arg: Expr, var) -> Optional[Expr]:
    """Coefficient c with arg = c*var (no constant part), else None."""
    c = arg.coefficient(var, 1)
    if c.is_zero() or not c.is_constant():
        return None
    if not (arg - c * Expr.of_jet(var)).is_zero():
        return None
    return c


# --------------------------------------------------------------------------
# small exact solvers
# --------------------------------------------------------------------------


def rational_roots(coeffs: list[Fraction]) -> set[Fraction]:
    """Rational roots of sum(coeffs[k] * x^k); exact, by divisor enumeration."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if not coeffs:
        return set()
    shift = 0
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
        shift = 1
    if not coeffs:
        return set()
    den = 1
    for c in coeffs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = _gcd(g, abs(c))
    if g:
        ints = [c // g for c in ints]
    lead, tail = ints[-1], ints[0]
    roots: set[Fraction] = set()
    if shift:
        roots.add(Fraction(0))
    for p in _divisors(abs(tail)):
        for q in _divisors(abs(lead)):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if sum(c * cand ** k for k, c in enumerate(ints)) == 0:
                    roots.add(cand)
    return roots


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n: int) -> list[int]:
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def solve_linear(rows: list[tuple[dict, Fraction]], unknowns: list) -> Optional[dict]:
    """Gaussian elimination over the rationals.

    ``rows`` are (coefficients-by-unknown, rhs).  Returns an assignment with
    free unknowns at zero, or None when inconsistent.
    """
    idx = {x: i for i, x in enumerate(unknowns)}
    mat = []
    for coeffs, rhs in rows:
        row = [Fraction(0)] * len(unknowns)
        for x, c in coeffs.items():
            row[idx[x]] = Fraction(c)
        mat.append((row, Fraction(rhs)))
    pivots = {}
    r = 0
    for c in range(len(unknowns)):
        pivot = next((i for i in range(r, len(mat)) if mat[i][0][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        row, rhs = mat[r]
        inv = 1 / row[c]
        row = [v * inv for v in row]
        rhs = rhs * inv
        mat[r] = (row, rhs)
        for i in range(len(mat)):
            if i != r and mat[i][0][c] != 0:
                f = mat[i][0][c]
                mat[i] = ([a - f * b for a, b in zip(mat[i][0], row)], mat[i][1] - f * rhs)
        pivots[c] = r
        r += 1
    for i in range(r, len(mat)):
        if mat[i][1] != 0:
            return None
    out = {x: Fraction(0) for x in unknowns}
    for c, ri in pivots.items():
        out[unknowns[c]] = mat[ri][1]
    return out


# --------------------------------------------------------------------------
# the shift operator psi -> u1 psi_u + u2 psi_{u1} on (u, u1) polynomials
# --------------------------------------------------------------------------


def _shift_apply(psi: dict[tuple[int, int], Expr]) -> dict[Mono, Expr]:
    out: dict[Mono, Expr] = {}
    for (i, j), c in psi.items():
        if i:
            key = (i - 1, j + 1, 0)
            out[key] = out.get(key, Expr.zero()) + i * c
        if j:
            key = (i, j - 1, 1)
            out[key] = out.get(key, Expr.zero()) + j * c
    return {k: v for k, v in out.items() if not v.is_zero()}


def _grade(m: Mono) -> int:
    return m[1] + 2 * m[2]


def _solve_source(h: dict[Mono, Expr], a_val: Expr,
                  degree: int) -> Optional[dict[tuple[int, int], Expr]]:
    """Solve (shift + a) psi = h for a polynomial psi(u, u1), given a != 0.

    Grades strictly increase under the shift operator, so psi is determined
    grade by grade; returns None as soon as a residue falls outside the image.
    """
    if any(k > 1 for (_, _, k) in h):
        return None
    gmax = max((_grade(m) for m in h), default=-1)
    a_inv = Expr.one() / a_val
    psi: dict[tuple[int, int], Expr] = {}
    prev: dict[tuple[int, int], Expr] = {}
    for g in range(0, gmax + 2):
        carry = _shift_apply(prev)
        target: dict[Mono, Expr] = {}
        for m, c in h.items():
            if _grade(m) == g:
                target[m] = c
        for m, c in carry.items():
            target[m] = target.get(m, Expr.zero()) - c
        cur: dict[tuple[int, int], Expr] = {}
        bad = False
        for m, c in target.items():
            if c.is_zero():
                continue
            if m[2]:
                bad = True
                break
            if m[0] + m[1] > degree:
                bad = True
                break
            cur[(m[0], m[1])] = c * a_inv
        if bad:
            return None
        if g == gmax + 1 and cur:
            return None
        psi.update(cur)
        prev = cur
    return psi


def _psi_expr(psi: dict[tuple[int, int], Expr]) -> Expr:
    out = Expr.zero()
    for (i, j), c in psi.items():
        out = out + c * _u ** i * _u1 ** j
    return out


def _laurent_in(e: Expr, p: Param) -> Optional[dict[int, Fraction]]:
    """View e as a Laurent polynomial in p with rational coefficients."""
    out: dict[int, Fraction] = {}
    for t in e.terms:
        if t.jets or t.funcs:
            return None
        k = 0
        for q, exp in t.params:
            if q == p:
                k = exp
            else:
                return None
        out[k] = out.get(k, Fraction(0)) + t.coeff
    return out


def _candidate_values(constraints: list[Expr], p: Param) -> Optional[set[Fraction]]:
    """Nonzero rational roots shared form; None when coefficients are symbolic."""
    cands: set[Fraction] = set()
    saw_poly = False
    for c in constraints:
        if c.is_zero():
            continue
        lau = _laurent_in(c, p)
        if lau is None:
            return None
        saw_poly = True
        lo = min(lau)
        coeffs = [lau.get(k + lo, Fraction(0)) for k in range(max(lau) - lo + 1)]
        cands |= {r for r in rational_roots(coeffs) if r != 0}
    if not saw_poly:
        return set()
    return cands


# --------------------------------------------------------------------------
# per-family matchers
# --------------------------------------------------------------------------


def _no(theorem: str, detail: str) -> FamilyMatch:
    return FamilyMatch(theorem, "no_match", detail)


def _unsup(theorem: str, detail: str) -> FamilyMatch:
    return FamilyMatch(theorem, "unsupported", detail)


def _confirm(spec: FamilySpec, lam: Expr, g: Expr, detail: str) -> Optional[FamilyMatch]:
    """Accept a candidate spec only if regenerating it reproduces the input."""
    try:
        fam = generate(spec)
    except ClassifyError:
        return None
    if fam.lam.equals(lam) and fam.g.equals(g):
        return FamilyMatch(spec.theorem, "matched", detail, spec)
    return None


def _shift_image_residual(g: Expr, psi: dict[tuple[int, int], Expr], a_val: Expr) -> Expr:
    got = Expr.zero()
    for m, c in _shift_apply(psi).items():
        got = got + c * _u ** m[0] * _u1 ** m[1] * _u2 ** m[2]
    return g - got - a_val * _psi_expr(psi)


def _match_T32(lam: Expr, g: Expr, degree: int) -> FamilyMatch:
    if not lam.is_zero():
        return _no(T32, "the cubic coefficient must vanish for this family")
    plain, buckets = _split_exp(g)
    if buckets:
        return _no(T32, "exponential factors do not fit this family's polynomial ansatz")
    try:
        h = _poly_dict(plain)
    except UnsupportedAnsatz as err:
        return _unsup(T32, str(err))
    a_sym = registry.declare("_match_a")
    sym = _solve_symbolic_shift(h, a_sym, degree)
    if sym is None:
        return _no(T32, "the source term is not shift-generated at this degree")
    constraints = sym["constraints"]
    cands = _candidate_values(constraints, a_sym)
    if cands is None:
        cands = {Fraction(1), Fraction(-1), Fraction(2), Fraction(-2)}
    if not cands:
        cands = {Fraction(1)}
    for a_val in sorted(cands):
        psi = _solve_source(h, Expr.number(a_val), degree)
        if psi is None or not psi:
            continue
        if not _shift_image_residual(g, psi, Expr.number(a_val)).is_zero():
            continue
        spec = FamilySpec(T32, params={"mu2": Expr.zero(), "eta2": Expr.number(a_val)},
                          slots={"f": _u - _u2, "phi1": _psi_expr(psi)},
                          signs={"mu3": 1})
        got = _confirm(spec, lam, g, f"a = {a_val}")
        if got is not None:
            return got
    return _no(T32, "no admissible leading constant")


def _solve_symbolic_shift(h: dict[Mono, Expr], a_sym: Param, degree: int,
                          extra: Optional[dict[Mono, Expr]] = None) -> Optional[dict]:
    """Run the grade recursion with a symbolic leading constant.

    Collects the constraint expressions that must vanish for a match; the
    recursion itself never fails, it just records obstructions.
    """
    total: dict[Mono, Expr] = dict(h)
    for m, c in (extra or {}).items():
        total[m] = total.get(m, Expr.zero()) + c
    if any(k > 1 for (_, _, k) in total):
        return None
    a_expr = Expr.of_param(a_sym)
    a_inv = Expr.of_param(a_sym, -1)
    gmax = max((_grade(m) for m in total if not total[m].is_zero()), default=-1)
    constraints: list[Expr] = []
    psi: dict[tuple[int, int], Expr] = {}
    prev: dict[tuple[int, int], Expr] = {}
    for g in range(0, gmax + 2):
        carry = _shift_apply(prev)
        target: dict[Mono, Expr] = {}
        for m, c in total.items():
            if _grade(m) == g and not c.is_zero():
                target[m] = c
        for m, c in carry.items():
            target[m] = target.get(m, Expr.zero()) - c
        cur: dict[tuple[int, int], Expr] = {}
        for m, c in target.items():
            if c.is_zero():
                continue
            if m[2] or m[0] + m[1] > degree:
                constraints.append(c)
                continue
            cur[(m[0], m[1])] = c * a_inv
        if g == gmax + 1:
            constraints.extend(cur.values())
        psi.update(cur)
        prev = cur
    return {"psi": psi, "constraints": constraints, "a": a_expr}


def _match_T33(lam: Expr, g: Expr, degree: int) -> FamilyMatch:
    if lam.is_zero():
        return _no(T33, "this family needs a nonzero cubic coefficient")
    plain, buckets = _split_exp(g)
    if buckets:
        return _no(T33, "exponential factors do not fit this family's shape")
    try:
        h = _poly_dict(plain)
    except UnsupportedAnsatz as err:
        return _unsup(T33, str(err))
    expect = {
        (2, 1, 0): -3 * lam,
        (1, 1, 1): 2 * lam,
    }
    for m, c in expect.items():
        got = h.get(m, Expr.zero())
        if not got.equals(c):
            return _no(T33, f"coefficient of {_mono_name(m)} is {got!r}, expected {c!r}")
    d_u11 = h.get((0, 2, 0), Expr.zero())
    d_uu2 = h.get((1, 0, 1), Expr.zero())
    if not d_u11.equals(d_uu2):
        return _no(T33, "the u1^2 and u*u2 coefficients must agree")
    if d_u11.is_zero():
        return _no(T33, "the u1^2 + u*u2 block must be present")
    c_uu1 = h.get((1, 1, 0), Expr.zero())
    known = {(2, 1, 0), (1, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 0)}
    for m, c in h.items():
        if m not in known and not c.is_zero():
            return _no(T33, f"unexpected monomial {_mono_name(m)}")
    try:
        lam_inv = lam.inverse()
    except NotInvertible:
        return _unsup(T33, "cannot normalize by a non-invertible cubic coefficient")
    big_d = -d_u11 * lam_inv
    big_c = -c_uu1 * lam_inv
    # realize with mu2 = mu3 = 0, eta2 = eta3 = 1 (gamma = -1, block scale -2),
    # stretching the slot: f = p (u - u2) + q absorbs any (D, C)
    try:
        d_inv = big_d.inverse()
    except NotInvertible:
        return _unsup(T33, "the source block scale is not invertible")
    p = -2 * d_inv
    q = -big_c * d_inv
    spec = FamilySpec(T33, params={"lambda": lam, "mu2": Expr.zero(),
                                   "mu3": Expr.zero(),
                                   "eta2": Expr.number(1), "eta3": Expr.number(1)},
                      slots={"f": p * (_u - _u2) + q})
    got = _confirm(spec, lam, g, f"block scale {big_d!r}, drift {big_c!r}")
    if got is not None:
        return got
    return _no(T33, "shape constraints hold but no realization was found")


def _t34_fixed_part(lam: Expr, a_sym: Param, b_sym: Param) -> dict[Mono, Expr]:
    a = Expr.of_param(a_sym)
    b = Expr.of_param(b_sym)
    return {
        (2, 1, 0): 3 * lam,
        (1, 1, 1): -2 * lam,
        (3, 0, 0): a * lam,
        (2, 0, 1): -a * lam,
        (1, 0, 0): b,
        (0, 0, 1): -b,
    }


def _match_T34(lam: Expr, g: Expr, degree: int) -> FamilyMatch:
    plain, buckets = _split_exp(g)
    if buckets:
        return _no(T34, "exponential factors do not fit this family's polynomial ansatz")
    try:
        h = _poly_dict(plain)
    except UnsupportedAnsatz as err:
        return _unsup(T34, str(err))
    a_sym = registry.declare("_match_a")
    b_sym = registry.declare("_match_b")
    sym = _solve_symbolic_shift(h, a_sym, degree, extra=_t34_fixed_part(lam, a_sym, b_sym))
    if sym is None:
        return _no(T34, "the source term is quadratic in u2")
    pairs = []
    for c in sym["constraints"]:
        if c.is_zero():
            continue
        p_part = c.subs_param(b_sym, Expr.zero())
        q_part = (c - p_part).subs_param(b_sym, Expr.one())
        pairs.append((p_part, q_part))
    cand_ab: list[tuple[Fraction, Fraction]] = []
    pivot = next(((p, q) for p, q in pairs if not q.is_zero()), None)
    if pivot is None:
        a_cands = _candidate_values([p for p, _ in pairs], a_sym)
    else:
        p0, q0 = pivot
        eliminated = [p * q0 - p0 * q for p, q in pairs]
        # roots of the pivot column itself cover values where b is unconstrained
        a_cands = _candidate_values(eliminated + [p for p, _ in pairs], a_sym)
    if a_cands is None:
        a_cands = {Fraction(1), Fraction(-1), Fraction(2), Fraction(-2)}
    for av in sorted(a_cands):
        b_cands = {Fraction(0)}
        ok = True
        for p, q in pairs:
            pv = _eval_laurent(p, a_sym, av)
            qv = _eval_laurent(q, a_sym, av)
            if pv is None or qv is None:
                ok = False
                break
            if qv != 0:
                b_cands.add(-pv / qv)
        if not ok:
            continue
        for bv in sorted(b_cands):
            cand_ab.append((av, bv))
    if not cand_ab:
        cand_ab = [(Fraction(1), Fraction(0)), (Fraction(-1), Fraction(0))]
    for av, bv in cand_ab:
        if av == 0:
            continue
        total = dict(h)
        for m, c in _t34_fixed_part(lam, a_sym, b_sym).items():
            cc = c.subs_param(a_sym, Expr.number(av)).subs_param(b_sym, Expr.number(bv))
            total[m] = total.get(m, Expr.zero()) + cc
        total = {m: c for m, c in total.items() if not c.is_zero()}
        psi = _solve_source(total, Expr.number(av), degree)
        if psi is None:
            continue
        residual = Expr.zero()
        for m, c in total.items():
            residual = residual + c * _u ** m[0] * _u1 ** m[1] * _u2 ** m[2]
        if not _shift_image_residual(residual, psi, Expr.number(av)).is_zero():
            continue
        spec = FamilySpec(T34, params={"lambda": lam, "mu2": Expr.zero(),
                                       "eta2": Expr.number(av), "C1": Expr.number(bv)},
                          slots={"f": _u - _u2, "phi1": _psi_expr(psi)},
                          signs={"mu3": 1})
        got = _confirm(spec, lam, g, f"a = {av}, b = {bv}")
        if got is not None:
            return got
    return _no(T34, "no admissible constants for the displayed shape")


def _eval_laurent(e: Expr, p: Param, v: Fraction) -> Optional[Fraction]:
    lau = _laurent_in(e, p)
    if lau is None:
        return None
    return sum(c * v ** k for k, c in lau.items())


def _match_T35i(lam: Expr, g: Expr, degree: int) -> FamilyMatch:
    plain, buckets = _split_exp(g)
    try:
        h = _poly_dict(plain)
    except UnsupportedAnsatz as err:
        return _unsup(T35I, str(err))
    if len(buckets) > 1:
        return _no(T35I, "more than one exponential block")
    theta = None
    if buckets:
        arg = next(iter(buckets))
        theta = _linear_arg(arg, U)
        if theta is None:
            return _no(T35I, "the exponential argument is not a multiple of u")
    if not lam.is_zero():
        c12 = h.get((0, 1, 1), Expr.zero())
        if c12.is_zero():
            return _no(T35I, "missing u1*u2 monomial")
        try:
            theta_from_poly = (-2 * lam) / c12
        except NotInvertible:
            return _unsup(T35I, "cannot normalize the u1*u2 coefficient")
        if theta is not None and not theta.equals(theta_from_poly):
            return _no(T35I, "the exponential scale disagrees with the u1*u2 coefficient")
        theta = theta_from_poly
    if theta is None or theta.is_zero():
        return _no(T35I, "no admissible exponential scale")
    try:
        theta_inv = theta.inverse()
    except NotInvertible:
        return _unsup(T35I, "non-invertible exponential scale")

    if lam.is_zero():
        if h:
            return _no(T35I, "a vanishing cubic coefficient forces a pure exponential source")
        zeta1 = None
    else:
        for m, c in {(2, 1, 0): -5 * lam, (1, 1, 1): 4 * lam}.items():
            if not h.get(m, Expr.zero()).equals(c):
                return _no(T35I, f"coefficient of {_mono_name(m)} is "
                                 f"{h.get(m, Expr.zero())!r}, expected {c!r}")
        try:
            lam_inv = lam.inverse()
        except NotInvertible:
            return _unsup(T35I, "cannot normalize by the cubic coefficient")
        zeta1 = (h.get((1, 1, 0), Expr.zero()) * lam_inv + 4 * theta_inv) / 2
        if not h.get((0, 1, 0), Expr.zero()).equals(2 * lam * zeta1 * theta_inv):
            return _no(T35I, "the u1 coefficient disagrees with the u*u1 coefficient")
        known = {(0, 1, 1), (2, 1, 0), (1, 1, 1), (1, 1, 0), (0, 1, 0)}
        for m, c in h.items():
            if m not in known and not c.is_zero():
                return _no(T35I, f"unexpected monomial {_mono_name(m)}")

    c2 = Expr.zero()
    if buckets:
        block = next(iter(buckets.values()))
        try:
            bd = _poly_dict(block)
        except UnsupportedAnsatz as err:
            return _unsup(T35I, str(err))
        lead = bd.get((0, 3, 0), Expr.zero())
        c2 = lead * theta_inv * theta_inv
        if zeta1 is None:
            z_term = bd.get((0, 1, 0), Expr.zero())
            if c2.is_zero():
                return _no(T35I, "the exponential block lacks its cubic term")
            try:
                zeta1 = -z_term * theta_inv * c2.inverse()
            except NotInvertible:
                return _unsup(T35I, "cannot normalize the exponential block")
        expect = (theta * _u1 ** 3 + 2 * _u * _u1 + _u1 * _u2 - zeta1 * _u1) * theta * c2
        if not block.equals(expect):
            return _no(T35I, "the exponential block has the wrong shape")
    if lam.is_zero() and c2.is_zero():
        return _no(T35I, "both the cubic coefficient and the exponential block vanish")

    sigma = (zeta1 + theta) / 2
    spec = FamilySpec(T35I, params={"lambda": lam, "theta": theta, "nu": Expr.number(1),
                                    "sigma": sigma, "C2": c2, "mu2": Expr.zero(),
                                    "eta2": Expr.number(1)},
                      signs={"mu3": 1})
    got = _confirm(spec, lam, g, f"theta = {theta!r}, C2 = {c2!r}")
    if got is not None:
        return got
    return _no(T35I, "shape constraints hold but no realization was found")


def _match_T35ii(lam: Expr, g: Expr, degree: int) -> FamilyMatch:
    plain, buckets = _split_exp(g)
    try:
        h = _poly_dict(plain)
    except UnsupportedAnsatz as err:
        return _unsup(T35II, str(err))
    if not buckets:
        return _no(T35II, "this family always carries an exponential block")
    if len(buckets) > 1:
        return _no(T35II, "more than one exponential block")
    arg = next(iter(buckets))
    c = _linear_arg(arg, U1)
    if c is None:
        return _no(T35II, "the exponential argument is not a multiple of u1")
    cq = c.as_rational()
    if cq is None:
        return _unsup(T35II, "symbolic exponential scales are outside the ansatz")
    branch = 1 if cq > 0 else -1
    tau = Expr.number(abs(cq))
    tau_inv = Expr.one() / abs(cq)

    if lam.is_zero():
        return _unsup(T35II, "a vanishing cubic coefficient is outside the matcher's ansatz")
    try:
        lam_inv = lam.inverse()
    except NotInvertible:
        return _unsup(T35II, "cannot normalize by the cubic coefficient")
    for m, cc in {(2, 1, 0): -3 * lam, (1, 1, 1): 2 * lam,
                  (0, 2, 0): -2 * branch * lam * tau_inv,
                  (1, 0, 1): -2 * branch * lam * tau_inv}.items():
        if not h.get(m, Expr.zero()).equals(cc):
            return _no(T35II, f"coefficient of {_mono_name(m)} is "
                              f"{h.get(m, Expr.zero())!r}, expected {cc!r}")
    zeta2 = h.get((1, 1, 0), Expr.zero()) * lam_inv / 2
    known = {(2, 1, 0), (1, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 0)}
    for m, cc in h.items():
        if m not in known and not cc.is_zero():
            return _no(T35II, f"unexpected monomial {_mono_name(m)}")

    # exponential block == phi'' u1^2 + tau(tau u u2 + e u1 - zeta2 tau u2) phi
    #                     + e(tau u u1 + tau u1 u2 + e u2 - zeta2 tau u1) phi'
    block = buckets[arg]
    try:
        bd = _poly_dict(block)
    except UnsupportedAnsatz as err:
        return _unsup(T35II, str(err))
    z2q = zeta2.as_rational()
    rational_mode = z2q is not None and all(v.as_rational() is not None for v in bd.values())
    if not rational_mode:
        return _unsup(T35II, "symbolic data in the exponential block is outside the ansatz")
    unknowns = list(range(degree + 1))  # phi = sum phi_k u^k
    rows: list[tuple[dict, Fraction]] = []
    model: dict[Mono, dict[int, Fraction]] = {}

    def add(m: Mono, k: int, val: Fraction):
        model.setdefault(m, {})[k] = model.get(m, {}).get(k, Fraction(0)) + val

    tq = abs(cq)
    for k in unknowns:
        if k >= 2:
            add((k - 2, 2, 0), k, Fraction(k * (k - 1)))  # phi'' u1^2
        add((k + 1, 0, 1), k, tq * tq)                    # tau^2 u u2 phi
        add((k, 1, 0), k, Fraction(branch) * tq)          # tau e u1 phi
        add((k, 0, 1), k, -z2q * tq * tq)                 # -zeta2 tau^2 u2 phi
        if k >= 1:
            add((k, 1, 0), k, Fraction(branch) * tq * k)          # e tau u u1 phi'
            add((k - 1, 1, 1), k, Fraction(branch) * tq * k)      # e tau u1 u2 phi'
            add((k - 1, 0, 1), k, Fraction(k))                    # e^2 u2 phi'
            add((k - 1, 1, 0), k, -Fraction(branch) * z2q * tq * k)  # -e zeta2 tau u1 phi'
    monos = set(model) | set(bd)
    for m in sorted(monos):
        rhs = bd.get(m, Expr.zero()).as_rational() or Fraction(0)
        rows.append((model.get(m, {}), rhs))
    sol = solve_linear(rows, unknowns)
    if sol is None:
        return _no(T35II, "the exponential block is not generated by any u-profile")
    phi = Expr.zero()
    for k, v in sol.items():
        phi = phi + Expr.number(v) * _u ** k
    if phi.is_zero():
        return _no(T35II, "only the zero profile fits the exponential block")
    # realization: mu2 = 0, nu = 2 tau, sigma solved back from zeta2
    nu = 2 * tau
    mu3 = sqrt_of(nu ** 2 - tau ** 2, hint="r") / nu
    sigma = nu * (zeta2 + branch * mu3 / tau)
    spec = FamilySpec(T35II, params={"lambda": lam, "tau": tau, "nu": nu,
                                     "sigma": sigma, "mu2": Expr.zero(),
                                     "eta2": Expr.number(1)},
                      slots={"phi": phi}, signs={"branch": branch, "mu3": 1})
    got = _confirm(spec, lam, g, f"tau = {tq}, branch = {branch:+d}")
    if got is not None:
        return got
    return _no(T35II, "shape constraints hold but no realization was found")


_MATCHERS = {
    T32: _match_T32,
    T33: _match_T33,
    T34: _match_T34,
    T35I: _match_T35i,
    T35II: _match_T35ii,
}


def match_family(lam, g, degree: int = 4) -> MatchReport:
    """Try every family against u_t - u_xxt = lam u^2 u3 + g."""
    lam = as_expr(lam)
    g = as_expr(g)
    if not lam.is_constant():
        raise UnsupportedAnsatz("the cubic coefficient must be constant")
    bad = [j for j in g.jet_vars() if j.torder or j.xorder > 2]
    if bad:
        raise UnsupportedAnsatz(f"the source may depend on u, u1, u2 only, got {bad!r}")
    for t in g.terms:
        for f, _m in t.funcs:
            if f.kind != "exp":
                raise UnsupportedAnsatz("sin/cos factors are outside every family shape")
    results = tuple(_MATCHERS[th](lam, g, degree) for th in THEOREMS)
    return MatchReport(lam, g, degree, results)
