"""Quantum spectra of the Pais-Uhlenbeck oscillator and its relatives.

Builds the Hamiltonians and the conserved charge as differential
operators, constructs every eigenfunction family (ghost, positive
realization, equal-frequency degenerate, truncated continuum,
non-stationary descendants) and measures eigen-residuals as coefficient
norms after exact operator application, so no grids or quadrature enter
the verification.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import Exact
from .polyalg import (DiffOp, ExpPolyFn, MultiPoly, QuadExponent,
                      exp_diff_apply, hermite, scalar_tools)

QX = ("q", "x")
QXT = ("q", "x", "t")
XY = ("x", "y")


class EqualFrequencyError(ValueError):
    """Raised by constructions that degenerate at equal frequencies."""


@dataclass(frozen=True)
class SpectrumParams:
    """Frequency pair with the convention omega1 >= omega2 > 0."""

    omega1: float | Fraction
    omega2: float | Fraction

    def __post_init__(self):
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise ValueError("frequencies must be positive")
        if self.omega1 < self.omega2:
            raise ValueError("expected omega1 >= omega2")

    @property
    def delta(self):
        return self.omega1 - self.omega2

    def require_unequal(self):
        if self.omega1 == self.omega2:
            raise EqualFrequencyError(
                "construction is singular at equal frequencies")


@dataclass
class EigenResult:
    """A wavefunction with its eigenvalue and measured residual."""

    wavefunction: ExpPolyFn
    energy: complex
    residual: float
    labels: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def energy(kind: str, n: int, m: int, params: SpectrumParams):
    """Level energy: ghost (n+1/2)w1 - (m+1/2)w2, positive realization
    (n+1/2)w1 + (m+1/2)w2, or the degenerate equal-frequency w(n-m)."""
    if n < 0 or m < 0:
        raise ValueError("level indices must be nonnegative")
    om1, om2 = params.omega1, params.omega2
    if kind == "ghost":
        return (2 * n + 1) * om1 / 2 - (2 * m + 1) * om2 / 2
    if kind == "positive":
        return (2 * n + 1) * om1 / 2 + (2 * m + 1) * om2 / 2
    if kind == "degenerate":
        if om1 != om2:
            raise EqualFrequencyError("degenerate spectrum needs omega1 == omega2")
        return om1 * (n - m)
    raise ValueError(f"unknown spectrum kind {kind!r}")


def density_scan(omega1, omega2, target: float, nmax: int):
    """Exhaustive min over n, m <= nmax of |E_nm(ghost) - target|."""
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    best = None
    arg = (0, 0)
    for n in range(nmax + 1):
        en = (n + 0.5) * omega1
        for m in range(nmax + 1):
            gap = abs(en - (m + 0.5) * omega2 - target)
            if best is None or gap < best:
                best, arg = gap, (n, m)
    return DensityScanResult(min_gap=best, n=arg[0], m=arg[1],
                             target=target, nmax=nmax)


@dataclass
class DensityScanResult:
    min_gap: float
    n: int
    m: int
    target: float
    nmax: int


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

OPERATOR_NAMES = ("H_pu", "H_tilde", "H_interacting", "O_xy", "O_zw", "O_eq",
                  "L_charge", "H_free_particle")


def build_operator(name: str, *, omega1=None, omega2=None, omega=None,
                   alpha=0, beta=0, gamma=0, exact: bool = False) -> DiffOp:
    """Quantum operators with momenta realized as -i d/dv."""
    num, sqrt, i_ = scalar_tools(exact)
    half = Fraction(1, 2) if exact else 0.5

    if name == "H_pu":
        if omega1 is None or omega2 is None:
            raise ValueError("H_pu needs omega1 and omega2")
        om1 = Fraction(omega1) if exact else float(omega1)
        om2 = Fraction(omega2) if exact else float(omega2)
        x_dq = DiffOp.coordinate("x", QX, exact) * DiffOp.derivative("q", QX, exact)
        dxx = DiffOp.derivative("x", QX, exact, order=2)
        x2 = DiffOp.coordinate("x", QX, exact) ** 2
        q2 = DiffOp.coordinate("q", QX, exact) ** 2
        return (-i_) * x_dq - dxx * num(half) \
            + x2 * num((om1 ** 2 + om2 ** 2) * half) \
            - q2 * num(om1 ** 2 * om2 ** 2 * half)

    if name in ("H_tilde", "H_interacting"):
        if omega is None:
            raise ValueError(f"{name} needs omega")
        om = Fraction(omega) if exact else float(omega)
        dxx = DiffOp.derivative("x", QX, exact, order=2)
        q_dx = DiffOp.coordinate("q", QX, exact) * DiffOp.derivative("x", QX, exact)
        x_dq = DiffOp.coordinate("x", QX, exact) * DiffOp.derivative("q", QX, exact)
        op = -dxx * num(half) + i_ * num(om ** 2) * q_dx - i_ * x_dq
        if name == "H_interacting":
            q4 = DiffOp.coordinate("q", QX, exact) ** 4
            x4 = DiffOp.coordinate("x", QX, exact) ** 4
            q2x2 = (DiffOp.coordinate("q", QX, exact) ** 2) \
                * (DiffOp.coordinate("x", QX, exact) ** 2)
            op = op + q4 * num(alpha) + q2x2 * num(beta) + x4 * num(gamma)
        return op

    if name == "O_xy":
        if omega1 is None or omega2 is None:
            raise ValueError("O_xy needs omega1 and omega2")
        om1 = Fraction(omega1) if exact else float(omega1)
        om2 = Fraction(omega2) if exact else float(omega2)
        dxx = DiffOp.derivative("x", XY, exact, order=2)
        x_dy = DiffOp.coordinate("x", XY, exact) * DiffOp.derivative("y", XY, exact)
        x_dx = DiffOp.coordinate("x", XY, exact) * DiffOp.derivative("x", XY, exact)
        y_dx = DiffOp.coordinate("y", XY, exact) * DiffOp.derivative("x", XY, exact)
        return -dxx * num(half) - x_dy + x_dx * num(om1 + om2) \
            + y_dx * num(om1 * om2) \
            + DiffOp.identity(XY, exact) * num((om1 + om2) * half)

    if name == "O_zw":
        if omega1 is None or omega2 is None:
            raise ValueError("O_zw needs omega1 and omega2")
        if omega1 == omega2:
            raise EqualFrequencyError(
                "O_zw is stated for distinct z, w variables")
        om1 = Fraction(omega1) if exact else float(omega1)
        om2 = Fraction(omega2) if exact else float(omega2)
        zw = ("z", "w")
        dz = DiffOp.derivative("z", zw, exact)
        dw = DiffOp.derivative("w", zw, exact)
        z_dz = DiffOp.coordinate("z", zw, exact) * dz
        w_dw = DiffOp.coordinate("w", zw, exact) * dw
        return (dz * dz * num(-half) + z_dz) * num(om1) \
            + (dw * dw * num(-half) + w_dw) * num(om2) \
            - (dz * dw) * sqrt(om1 * om2) \
            + DiffOp.identity(zw, exact) * num((om1 + om2) * half)

    if name == "O_eq":
        if omega is None:
            raise ValueError("O_eq needs omega")
        om = Fraction(omega) if exact else float(omega)
        zz = ("z",)
        dz = DiffOp.derivative("z", zz, exact)
        z_dz = DiffOp.coordinate("z", zz, exact) * dz
        return (-(dz * dz) + z_dz * 2 + DiffOp.identity(zz, exact)) * num(om)

    if name == "L_charge":
        if omega is None:
            raise ValueError("L_charge needs omega")
        om = Fraction(omega) if exact else float(omega)
        quarter = Fraction(1, 4) if exact else 0.25
        px = DiffOp.momentum("x", QX, exact)
        pq = DiffOp.momentum("q", QX, exact)
        x_op = DiffOp.coordinate("x", QX, exact)
        q_op = DiffOp.coordinate("q", QX, exact)
        return x_op * pq * num(half / om) - q_op * px * num(om * half) \
            + (px * px - pq * pq * num(1 / om ** 2 if exact else om ** -2)) \
            * num(quarter / om) \
            + (x_op * x_op) * num(3 * om * quarter) \
            - (q_op * q_op) * num(3 * om ** 3 * quarter)

    if name == "H_free_particle":
        xx = ("x",)
        return DiffOp.derivative("x", xx, exact, order=2) * num(-half)

    raise ValueError(f"unknown operator {name!r}; expected one of {OPERATOR_NAMES}")


def commutator_check(omega, exact: bool = False) -> float:
    """Max coefficient norm of [H_pu(w, w), L(w)]; zero when L is conserved."""
    h = build_operator("H_pu", omega1=omega, omega2=omega, exact=exact)
    l_op = build_operator("L_charge", omega=omega, exact=exact)
    return h.commutator(l_op).max_norm()


# ---------------------------------------------------------------------------
# eigenfunction families
# ---------------------------------------------------------------------------

def _residual(op: DiffOp, fn: ExpPolyFn, energy_value, relative: bool = True) -> float:
    """coeff_max_norm((op - E) fn), scaled by coeff_max_norm(E fn) if E != 0."""
    out = op.apply(fn)
    shifted = out.poly - fn.poly * energy_value
    r = shifted.max_norm()
    if not relative:
        return r
    scale = (fn.poly * energy_value).max_norm()
    return r / scale if scale > 0 else r


def _hermite_args_ghost(params: SpectrumParams, exact: bool, vars=QX):
    """Arguments of the two Hermite families of the ghost eigenfunctions."""
    num, sqrt, i_ = scalar_tools(exact)
    om1 = Fraction(params.omega1) if exact else float(params.omega1)
    om2 = Fraction(params.omega2) if exact else float(params.omega2)
    s1 = sqrt(om1)
    s2 = sqrt(om2)
    # H+ argument i sqrt(w1) (w2 q - i x); H- argument sqrt(w2) (w1 q + i x)
    arg_plus = MultiPoly.linear({"q": i_ * s1 * num(om2), "x": s1}, vars, exact)
    arg_minus = MultiPoly.linear({"q": s2 * num(om1), "x": i_ * s2}, vars, exact)
    return arg_plus, arg_minus


def _ghost_exponent(params: SpectrumParams, exact: bool, vars=QX) -> QuadExponent:
    num, _, i_ = scalar_tools(exact)
    om1 = Fraction(params.omega1) if exact else float(params.omega1)
    om2 = Fraction(params.omega2) if exact else float(params.omega2)
    half = Fraction(1, 2) if exact else 0.5
    delta = om1 - om2
    return QuadExponent.from_pairs({
        ("q", "x"): -i_ * num(om1 * om2),
        ("x", "x"): num(-delta * half),
        ("q", "q"): num(-delta * om1 * om2 * half),
    }, vars, exact)


def _mixed_sum(n: int, m: int, lam, h_first: list[MultiPoly],
               h_second: list[MultiPoly], vars, exact: bool) -> MultiPoly:
    """Common double-Hermite sum of both eigenfunction families.

    For n >= m:  sum_k lam^k m!(n-m)!/((m-k)! k! (n-m+k)!) F_{n-m+k} S_k,
    and the mirrored sum with the roles of the families swapped otherwise.
    """
    if n < m:
        return _mixed_sum(m, n, lam, h_second, h_first, vars, exact)
    total = MultiPoly.zero(vars, exact)
    for k in range(m + 1):
        if exact:
            c = (lam ** k) * Fraction(
                math.factorial(m) * math.factorial(n - m),
                math.factorial(m - k) * math.factorial(k)
                * math.factorial(n - m + k))
        else:
            c = (lam ** k) * math.factorial(m) * math.factorial(n - m) \
                / (math.factorial(m - k) * math.factorial(k)
                   * math.factorial(n - m + k))
        total = total + h_first[n - m + k] * h_second[k] * c
    return total


def ghost_wavefunction(n: int, m: int, params: SpectrumParams,
                       exact: bool = False) -> ExpPolyFn:
    """Normalizable eigenfunction of the unequal-frequency oscillator."""
    params.require_unequal()
    num, sqrt, i_ = scalar_tools(exact)
    om1 = Fraction(params.omega1) if exact else float(params.omega1)
    om2 = Fraction(params.omega2) if exact else float(params.omega2)
    arg_plus, arg_minus = _hermite_args_ghost(params, exact)
    kmax = max(n, m)
    h_plus = [hermite(j, arg_plus) for j in range(kmax + 1)]
    h_minus = [hermite(j, arg_minus) for j in range(kmax + 1)]
    quarter = Fraction(1, 4) if exact else 0.25
    lam = i_ * num(om1 - om2) * sqrt(1 / (om1 * om2)) * num(quarter)
    poly = _mixed_sum(n, m, lam, h_plus, h_minus, QX, exact)
    return ExpPolyFn(poly, _ghost_exponent(params, exact))


def positive_polynomial(n: int, m: int, params: SpectrumParams,
                        exact: bool = False) -> MultiPoly:
    """Polynomial eigenfunction of the positive-spectrum realization."""
    params.require_unequal()
    num, sqrt, i_ = scalar_tools(exact)
    om1 = Fraction(params.omega1) if exact else float(params.omega1)
    om2 = Fraction(params.omega2) if exact else float(params.omega2)
    z = MultiPoly.linear({"x": sqrt(om1), "y": sqrt(om1) * num(om2)}, XY, exact)
    w = MultiPoly.linear({"x": sqrt(om2), "y": sqrt(om2) * num(om1)}, XY, exact)
    kmax = max(n, m)
    hz = [hermite(j, z) for j in range(kmax + 1)]
    hw = [hermite(j, w) for j in range(kmax + 1)]
    quarter = Fraction(1, 4) if exact else 0.25
    mu = -(num(om1 + om2) * sqrt(1 / (om1 * om2)) * num(quarter))
    return _mixed_sum(n, m, mu, hz, hw, XY, exact)


def eigenfunction(kind: str, n: int, m: int, params: SpectrumParams,
                  exact: bool = False) -> EigenResult:
    """Eigenfunction with its residual against the owning operator.

    ``ghost`` applies the full position-space Hamiltonian to the Gaussian
    wavefunction; ``positive`` applies the phase-stripped operator in the
    (x, y) variables to the bare polynomial.
    """
    if n < 0 or m < 0:
        raise ValueError("level indices must be nonnegative")
    if kind == "ghost":
        fn = ghost_wavefunction(n, m, params, exact)
        h = build_operator("H_pu", omega1=params.omega1, omega2=params.omega2,
                           exact=exact)
        e = energy("ghost", n, m, params)
        res = _residual(h, fn, e, relative=True)
        return EigenResult(fn, e, res, {"n": n, "m": m, "kind": kind})
    if kind == "positive":
        poly = positive_polynomial(n, m, params, exact)
        fn = ExpPolyFn(poly)
        o = build_operator("O_xy", omega1=params.omega1, omega2=params.omega2,
                           exact=exact)
        e = energy("positive", n, m, params)
        res = _residual(o, fn, e, relative=True)
        return EigenResult(fn, e, res, {"n": n, "m": m, "kind": kind})
    raise ValueError(f"unknown eigenfunction kind {kind!r}")


def eigen_suite(kind: str, params: SpectrumParams, nmax: int, mmax: int = None,
                exact: bool = False) -> list[EigenResult]:
    """All residuals for n <= nmax, m <= mmax, sharing Hermite tables."""
    if mmax is None:
        mmax = nmax
    params.require_unequal()
    num, sqrt, i_ = scalar_tools(exact)
    om1 = Fraction(params.omega1) if exact else float(params.omega1)
    om2 = Fraction(params.omega2) if exact else float(params.omega2)
    quarter = Fraction(1, 4) if exact else 0.25
    kmax = max(nmax, mmax)
    if kind == "ghost":
        a_first, a_second = _hermite_args_ghost(params, exact)
        vars = QX
        lam = i_ * num(om1 - om2) * sqrt(1 / (om1 * om2)) * num(quarter)
        op = build_operator("H_pu", omega1=params.omega1,
                            omega2=params.omega2, exact=exact)
        exponent = _ghost_exponent(params, exact)
    elif kind == "positive":
        a_first = MultiPoly.linear({"x": sqrt(om1), "y": sqrt(om1) * num(om2)},
                                   XY, exact)
        a_second = MultiPoly.linear({"x": sqrt(om2), "y": sqrt(om2) * num(om1)},
                                    XY, exact)
        vars = XY
        lam = -(num(om1 + om2) * sqrt(1 / (om1 * om2)) * num(quarter))
        op = build_operator("O_xy", omega1=params.omega1,
                            omega2=params.omega2, exact=exact)
        exponent = None
    else:
        raise ValueError(f"unknown eigenfunction kind {kind!r}")
    h_first = [hermite(j, a_first) for j in range(kmax + 1)]
    h_second = [hermite(j, a_second) for j in range(kmax + 1)]
    out = []
    for n in range(nmax + 1):
        for m in range(mmax + 1):
            poly = _mixed_sum(n, m, lam, h_first, h_second, vars, exact)
            fn = ExpPolyFn(poly, exponent)
            e = energy(kind, n, m, params)
            res = _residual(op, fn, e, relative=True)
            out.append(EigenResult(fn, e, res, {"n": n, "m": m, "kind": kind}))
    return out


def degenerate_level(level: int, omega, exact: bool = False) -> EigenResult:
    """Equal-frequency representative at n - m = level (either sign)."""
    num, sqrt, i_ = scalar_tools(exact)
    om = Fraction(omega) if exact else float(omega)
    params = SpectrumParams(om, om)
    arg_plus, arg_minus = _hermite_args_ghost(params, exact)
    poly = hermite(abs(level), arg_plus if level >= 0 else arg_minus)
    exponent = QuadExponent.from_pairs({("q", "x"): -i_ * num(om ** 2)}, QX, exact)
    fn = ExpPolyFn(poly, exponent)
    e = om * level
    h = build_operator("H_pu", omega1=om, omega2=om, exact=exact)
    res = _residual(h, fn, e, relative=True)
    return EigenResult(fn, e, res, {"level": level, "kind": "degenerate"})


def degenerate_family(levels, omega, exact: bool = False) -> list[EigenResult]:
    return [degenerate_level(n, omega, exact) for n in levels]


# ---------------------------------------------------------------------------
# non-stationary descendants
# ---------------------------------------------------------------------------

def descendant(order: int, omega, exact: bool = False) -> ExpPolyFn:
    """Polynomial-in-time solutions sitting over the zero-energy level.

    Orders 0, 1, 2 are the k^0, k^2, k^4 expansion terms of the continuum
    wavefunctions; each satisfies the time-dependent Schroedinger equation
    with the equal-frequency Hamiltonian.
    """
    if order not in (0, 1, 2):
        raise ValueError("descendant order must be 0, 1, or 2")
    num, sqrt, i_ = scalar_tools(exact)
    om = Fraction(omega) if exact else float(omega)
    half = Fraction(1, 2) if exact else 0.5
    eighth = Fraction(1, 8) if exact else 0.125
    q = MultiPoly.var("q", QXT, exact)
    x = MultiPoly.var("x", QXT, exact)
    t = MultiPoly.var("t", QXT, exact)
    u = x * x + q * q * num(om ** 2)
    if order == 0:
        poly = MultiPoly.const(1, QXT, exact)
    elif order == 1:
        poly = t - i_ * u
    else:
        poly = t * t - (t * u) * (i_ * 2) - (u * u) * num(half) \
            - (q * x) * i_ + MultiPoly.const(num(eighth / om ** 2), QXT, exact)
    exponent = QuadExponent.from_pairs({("q", "x"): -i_ * num(om ** 2)},
                                       QXT, exact)
    return ExpPolyFn(poly, exponent)


def descendant_time_residual(fn: ExpPolyFn, omega, exact: bool = False) -> float:
    """coeff_max_norm(i d/dt fn - H_pu fn) for equal frequencies."""
    _, _, i_ = scalar_tools(exact)
    dt = DiffOp.derivative("t", fn.poly.vars, exact)
    h = build_operator("H_pu", omega1=omega, omega2=omega, exact=exact)
    lhs = (dt * i_).apply(fn)
    rhs = h.apply(fn)
    return (lhs.poly - rhs.poly).max_norm()


FREE_DESCENDANT_ORDERS = (0, 1, 2, 3, 4)


def free_descendant(order: int, exact: bool = False) -> ExpPolyFn:
    """Free-particle analogues: 1, x, t - i x^2, xt - i x^3/3,
    t^2 - 2 i t x^2 - x^4/3."""
    if order not in FREE_DESCENDANT_ORDERS:
        raise ValueError("free descendant order must be in 0..4")
    _, _, i_ = scalar_tools(exact)
    third = Fraction(1, 3) if exact else (1.0 / 3.0)
    xt = ("x", "t")
    x = MultiPoly.var("x", xt, exact)
    t = MultiPoly.var("t", xt, exact)
    polys = {
        0: MultiPoly.const(1, xt, exact),
        1: x,
        2: t - (x * x) * i_,
        3: x * t - (x * x * x) * (i_ * third),
        4: t * t - (t * x * x) * (i_ * 2) - (x ** 4) * third,
    }
    return ExpPolyFn(polys[order])


def free_descendant_time_residual(fn: ExpPolyFn, exact: bool = False) -> float:
    _, _, i_ = scalar_tools(exact)
    dt = DiffOp.derivative("t", fn.poly.vars, exact)
    h = build_operator("H_free_particle", exact=exact)
    lhs = (dt * i_).apply(fn)
    rhs = h.apply(fn)
    return (lhs.poly - rhs.poly).max_norm()


# ---------------------------------------------------------------------------
# continuum wavefunctions
# ---------------------------------------------------------------------------

def continuum_eigenfunction(l: int, k: float, omega: float,
                            truncation: int = 12) -> EigenResult:
    """Truncated continuum wavefunction at angular label l and momentum k.

    Sums the double-Hermite series through m = truncation; the residual of
    (H - l*omega - k^2/4) applied to the truncation is tail-dominated and
    falls rapidly with the truncation order.  Negative l swaps the roles
    of the two Hermite arguments.
    """
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    om = float(omega)
    kk = float(k)
    sq = math.sqrt(om)
    z = MultiPoly.linear({"x": sq, "q": 1j * sq * om}, QX)
    w = MultiPoly.linear({"x": 1j * sq, "q": sq * om}, QX)
    if l < 0:
        z, w = w, z
        l = -l
        sign_l = -1
    else:
        sign_l = 1
    jmax = l + truncation
    hz = [hermite(j, z) for j in range(jmax + 1)]
    hw = [hermite(j, w) for j in range(truncation + 1)]
    total = MultiPoly.zero(QX)
    for m in range(truncation + 1):
        c = (1j * kk ** 2 / om) ** m / (4.0 ** (2 * m + l)
                                        * math.factorial(m)
                                        * math.factorial(l + m))
        total = total + hz[l + m] * hw[m] * c
    exponent = QuadExponent.from_pairs({("q", "x"): -1j * om ** 2}, QX)
    fn = ExpPolyFn(total, exponent)
    e = sign_l * l * om + kk ** 2 / 4.0
    h = build_operator("H_pu", omega1=om, omega2=om)
    res = _residual(h, fn, e, relative=False)
    return EigenResult(fn, e, res,
                       {"l": sign_l * l, "k": kk, "truncation": truncation})


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def hermite_sum_identity(n: int, m: int) -> bool:
    """H_{n+m}(z) == sum_j (-2)^j n! m! / (j! (n-j)! (m-j)!) H_{n-j} H_{m-j},
    decided in exact rational arithmetic."""
    if n < 0 or m < 0:
        raise ValueError("indices must be nonnegative")
    zz = ("z",)
    z = MultiPoly.var("z", zz, exact=True)
    table = [hermite(j, z) for j in range(n + m + 1)]
    lhs = table[n + m]
    rhs = MultiPoly.zero(zz, exact=True)
    for j in range(min(n, m) + 1):
        c = Exact.rational(Fraction(
            (-2) ** j * math.factorial(n) * math.factorial(m),
            math.factorial(j) * math.factorial(n - j) * math.factorial(m - j)))
        rhs = rhs + table[n - j] * table[m - j] * c
    return lhs == rhs


def exp_hermite_identity(n: int) -> bool:
    """exp(-d^2/dz^2 / 4) z^n == 2^-n H_n(z), exact."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    zz = ("z",)
    z = MultiPoly.var("z", zz, exact=True)
    op = DiffOp.derivative("z", zz, exact=True, order=2)
    lhs = exp_diff_apply(op, Fraction(-1, 4), z ** n)
    rhs = hermite(n, z) * Fraction(1, 2 ** n)
    return lhs == rhs


# ---------------------------------------------------------------------------
# degeneracy of the positive family at the exceptional point
# ---------------------------------------------------------------------------

def gram_minimum_singular_values(level: int, deltas, base_omega=1.0) -> list[float]:
    """Smallest singular value of the Gram matrix of the level-N positive
    family at omega1 = base + delta, omega2 = base, one value per delta.

    The family {phi_nm : n+m = N} collapses onto a single polynomial as
    delta -> 0, so the reported values decrease toward zero.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    out = []
    for delta in deltas:
        if not delta > 0:
            raise ValueError("deltas must be positive")
        if level == 0:
            out.append(1.0)
            continue
        params = SpectrumParams(base_omega + delta, base_omega)
        polys = [positive_polynomial(n, level - n, params)
                 for n in range(level + 1)]
        monos = sorted({m for p in polys for m in p.terms})
        vecs = []
        for p in polys:
            v = np.array([complex(p.terms.get(m, 0.0)) for m in monos])
            vecs.append(v / np.linalg.norm(v))
        vmat = np.array(vecs)
        gram = vmat @ vmat.conj().T
        out.append(float(np.linalg.svd(gram, compute_uv=False)[-1]))
    return out


# ---------------------------------------------------------------------------
# finite Jordan block demonstration
# ---------------------------------------------------------------------------

def jordan_norm_sq(a: complex, b: complex, t: float,
                   metric: str = "euclidean") -> float:
    """Squared norm of the evolved two-level Jordan-block state.

    The state is a*(1,0)e^{-it} + b*(-it,1)e^{-it}; the euclidean norm
    grows polynomially whenever b != 0 while the degenerate metric
    diag(0, 1) sees the constant |b|^2.
    """
    phase = cmath.exp(-1j * t)
    psi1 = (a - 1j * b * t) * phase
    psi2 = b * phase
    if metric == "euclidean":
        return abs(psi1) ** 2 + abs(psi2) ** 2
    if metric == "degenerate":
        return abs(psi2) ** 2
    raise ValueError(f"unknown metric {metric!r}")
