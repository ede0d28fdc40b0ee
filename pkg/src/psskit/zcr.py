"""Matrix-valued connection forms, zero-curvature residuals, gauge moves,
and extraction of the scattering-problem data from a triad.

The 2x2 form packs the triad as

    W = 1/2 [[w2, w1 - w3], [w1 + w3, -w2]]

and its flatness dW - W^W = 0 is entrywise a fixed rational combination of the
three structure residuals (taken with curvature sign +1).  A formal parameter
``i`` with i**2 -> -1 encodes the complex entries appearing after the standard
gauge rotation into the skew-hermitian pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exprcore import Expr, ExprError, as_expr, param
from .forms import OneForm, Triad, TwoForm, exterior_d, structure_residuals, wedge
from .jetcalc import EquationSpec, total_dt, total_dx

SL2R = "sl2r"
SU2 = "su2"
SO21 = "so21"
SO3 = "so3"
GENERAL = "general"


class NotUnimodular(ExprError):
    """Gauge matrices must have determinant +1 or -1, checked exactly."""


def imaginary_unit() -> Expr:
    """The formal square root of -1, confined to gauge computations."""
    return Expr.of_param(param("i", nonzero=True, square=Expr.number(-1)))


@dataclass(frozen=True)
class MatrixForm:
    """Square grid of one-forms tagged with the Lie algebra it realizes."""

    algebra: str
    entries: tuple[tuple[OneForm, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> OneForm:
        return self.entries[i][j]

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)


@dataclass(frozen=True)
class AknsData:
    """Scattering data recovered from a triad with the weight fixed to one."""

    q: Expr
    r: Expr
    B: Expr
    C: Expr
    A: Expr
    F: Expr


def omega_sl2(t: Triad) -> MatrixForm:
    half = Fraction(1, 2)
    w1, w2, w3 = t.forms()
    rows = ((w2.scaled(half), (w1 - w3).scaled(half)),
            ((w1 + w3).scaled(half), w2.scaled(-half)))
    return MatrixForm(SL2R, rows)


def omega_so(t: Triad) -> MatrixForm:
    """The 3x3 skew form; flat exactly when the structure equations hold."""
    w1, w2, w3 = t.forms()
    d = t.delta
    zero = OneForm.zero()
    rows = ((zero, w1, w2),
            (w1.scaled(d), zero, w3),
            (w2.scaled(d), w3.scaled(-1), zero))
    return MatrixForm(SO21 if d == 1 else SO3, rows)


def su2_pattern(t: Triad) -> MatrixForm:
    """The skew-hermitian pattern produced by the standard gauge rotation."""
    i = imaginary_unit()
    half = Fraction(1, 2)
    w1, w2, w3 = t.forms()
    iw2 = w2.scaled(i)
    iw3 = w3.scaled(i)
    rows = ((iw3.scaled(half), (w1 - iw2).scaled(half)),
            ((w1 + iw2).scaled(half), iw3.scaled(-half)))
    return MatrixForm(SU2, rows)


def standard_su2_gauge() -> tuple[tuple[Expr, ...], ...]:
    """The constant rotation taking the real form to the skew-hermitian one."""
    i = imaginary_unit()
    rt2 = Expr.of_param(param("sqrt2", positive=True, square=Expr.number(2)))
    h = rt2 / 2
    return ((h * (-i), h * Expr.one()),
            (h * Expr.one(), h * (-i)))


def zc_residual(m: MatrixForm, eq: EquationSpec) -> tuple[tuple[TwoForm, ...], ...]:
    """Entrywise dW - W^W with the matrix wedge product."""
    n = m.n
    out = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = exterior_d(m.entry(i, k), eq)
            for j in range(n):
                acc = acc - wedge(m.entry(i, j), m.entry(j, k))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _det2(a) -> Expr:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def _inv2(a, det: Expr) -> tuple[tuple[Expr, ...], ...]:
    # det is +-1, so 1/det = det and the adjugate needs only a scaling
    return ((a[1][1] * det, -a[0][1] * det),
            (-a[1][0] * det, a[0][0] * det))


def gauge_transform(m: MatrixForm, a) -> MatrixForm:
    """Conjugate a 2x2 connection by a constant matrix of determinant +-1."""
    if m.n != 2:
        raise ExprError("gauge transforms are implemented for 2x2 forms")
    a = tuple(tuple(as_expr(x) for x in row) for row in a)
    for row in a:
        for x in row:
            if not x.is_constant():
                raise ExprError("gauge matrices must be constant")
    det = _det2(a)
    if not (det.equals(1) or det.equals(-1)):
        raise NotUnimodular(f"determinant is {det!r}, expected +1 or -1")
    det = Expr.one() if det.equals(1) else -Expr.one()
    ainv = _inv2(a, det)

    def cell(i, k):
        cx = Expr.zero()
        ct = Expr.zero()
        for j in range(2):
            for l in range(2):
                coef = a[i][j] * ainv[l][k]
                cx = cx + coef * m.entry(j, l).cx
                ct = ct + coef * m.entry(j, l).ct
        return OneForm(cx, ct)

    rows = tuple(tuple(cell(i, k) for k in range(2)) for i in range(2))
    return MatrixForm(GENERAL, rows)


def conjugate_residual(res, a) -> tuple[tuple[TwoForm, ...], ...]:
    """A * res * A^-1 for a constant unimodular 2x2 matrix."""
    a = tuple(tuple(as_expr(x) for x in row) for row in a)
    det = _det2(a)
    det = Expr.one() if det.equals(1) else -Expr.one()
    ainv = _inv2(a, det)
    out = []
    for i in range(2):
        row = []
        for k in range(2):
            c = Expr.zero()
            for j in range(2):
                for l in range(2):
                    c = c + a[i][j] * ainv[l][k] * res[j][l].c
            row.append(TwoForm(c))
        out.append(tuple(row))
    return tuple(out)


def sl2_residual_combination(t: Triad) -> tuple[tuple[TwoForm, ...], ...]:
    """The documented residual combination for the 2x2 real form.

    With R1, R2 the first two structure residuals and R3' = d(w3) - w1^w2
    (curvature sign +1 regardless of the triad's delta):

        [[R2/2, (R1 - R3')/2], [(R1 + R3')/2, -R2/2]]
    """
    r1, r2, _ = structure_residuals(t)
    r3p = exterior_d(t.w3, t.eq) - wedge(t.w1, t.w2)
    half = Fraction(1, 2)
    return ((r2.scaled(half), (r1 - r3p).scaled(half)),
            ((r1 + r3p).scaled(half), r2.scaled(-half)))


def akns_extract(t: Triad) -> tuple[AknsData, tuple[bool, bool, bool]]:
    """Recover the scattering data and check its compatibility system.

    Returns the data plus three booleans stating that, modulo the equation,

        D_x A + (r B - q C) = 0
        D_t q - D_x B + 2 F B - 2 q A = 0
        D_t r - D_x C + 2 r A - 2 F C = 0
    """
    half = Fraction(1, 2)
    f11, f12 = t.w1.cx, t.w1.ct
    f21, f22 = t.w2.cx, t.w2.ct
    f31, f32 = t.w3.cx, t.w3.ct
    data = AknsData(
        q=(f11 - f31) * half,
        r=(f11 + f31) * half,
        B=(f12 - f32) * half,
        C=(f12 + f32) * half,
        A=f22 * half,
        F=f21 * half,
    )
    eq = t.eq
    e1 = total_dx(data.A, eq) + (data.r * data.B - data.q * data.C)
    e2 = total_dt(data.q, eq) - total_dx(data.B, eq) + 2 * data.F * data.B - 2 * data.q * data.A
    e3 = total_dt(data.r, eq) - total_dx(data.C, eq) + 2 * data.r * data.A - 2 * data.F * data.C
    return data, (e1.is_zero(), e2.is_zero(), e3.is_zero())
