"""Sparse complex polynomials, Gaussian-kernel functions, and normal-ordered
differential operators.

Everything downstream is built on three closed classes:

* :class:`MultiPoly` -- sparse multivariate polynomial over a fixed, ordered
  variable registry, with either ``complex`` coefficients (float mode) or
  :class:`~puosc.exact.Exact` coefficients (rational mode).
* :class:`ExpPolyFn` -- polynomial times ``exp(Q)`` for a quadratic form
  ``Q``; closed under differentiation, so applying any operator returns a
  member of the same class with the same exponent.
* :class:`DiffOp` -- polynomial differential operator kept in normal order
  (multiplications to the left of derivatives); composition re-normalizes
  through the product rule, so the zero operator has an empty term map.

The registry of a value is fixed at construction.  Mixing registries (or
mixing float and rational coefficients) raises
:class:`VariableMismatchError` / :class:`TypeError` instead of guessing an
embedding; widening is the explicit :meth:`MultiPoly.embed`.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .exact import Exact

# Float-mode pruning threshold.  Only true underflow is dropped so that
# residual norms reflect genuine cancellation error.
PRUNE_EPS = 1e-300


class VariableMismatchError(ValueError):
    """Raised when two values with incompatible variable registries meet."""


# ---------------------------------------------------------------------------
# coefficient helpers (complex in float mode, Exact in rational mode)
# ---------------------------------------------------------------------------

def as_coeff(value, exact: bool):
    """Coerce a scalar into the coefficient domain of the requested mode."""
    if exact:
        return Exact.coerce(value)
    if isinstance(value, Exact):
        return value.to_complex()
    if isinstance(value, Fraction):
        return complex(value)
    return complex(value)


def coeff_is_zero(c) -> bool:
    if isinstance(c, Exact):
        return c.is_zero
    return abs(c) < PRUNE_EPS


def coeff_abs(c) -> float:
    return abs(c)


def to_complex(c) -> complex:
    return c.to_complex() if isinstance(c, Exact) else complex(c)


def scalar_tools(exact: bool):
    """Return (num, sqrt, i) constructors for the requested mode."""
    if exact:
        return Exact.coerce, Exact.sqrt, Exact.imag_unit()
    return (lambda v: complex(float(Fraction(v)) if isinstance(v, Fraction) else v),
            lambda v: complex(math.sqrt(float(v))),
            1j)


def _mono_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# MultiPoly
# ---------------------------------------------------------------------------

class MultiPoly:
    """Sparse polynomial: map from exponent multi-index to coefficient.

    Parameters
    ----------
    vars : sequence of str
        Ordered variable registry.  All arithmetic partners must share it.
    terms : dict, optional
        Map ``exponent tuple -> coefficient``; zero coefficients are pruned.
    exact : bool
        Rational mode flag; coefficients are then :class:`Exact`.
    """

    __slots__ = ("vars", "terms", "exact")

    def __init__(self, vars, terms=None, exact: bool = False):
        self.vars = tuple(vars)
        self.exact = bool(exact)
        clean = {}
        if terms:
            nv = len(self.vars)
            for mono, c in terms.items():
                mono = tuple(mono)
                if len(mono) != nv:
                    raise VariableMismatchError(
                        f"exponent {mono} does not match registry {self.vars}")
                if not coeff_is_zero(c):
                    clean[mono] = clean[mono] + c if mono in clean else c
        self.terms = {m: c for m, c in clean.items() if not coeff_is_zero(c)}

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, vars, exact: bool = False) -> "MultiPoly":
        return cls(vars, {}, exact)

    @classmethod
    def const(cls, value, vars, exact: bool = False) -> "MultiPoly":
        c = as_coeff(value, exact)
        return cls(vars, {(0,) * len(tuple(vars)): c}, exact)

    @classmethod
    def var(cls, name, vars, exact: bool = False) -> "MultiPoly":
        vars = tuple(vars)
        if name not in vars:
            raise VariableMismatchError(f"{name!r} not in registry {vars}")
        mono = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {mono: as_coeff(1, exact)}, exact)

    @classmethod
    def linear(cls, coeffs: dict, vars, exact: bool = False) -> "MultiPoly":
        """Linear form sum(coeffs[name] * name)."""
        vars = tuple(vars)
        terms = {}
        for name, value in coeffs.items():
            if name not in vars:
                raise VariableMismatchError(f"{name!r} not in registry {vars}")
            mono = tuple(1 if v == name else 0 for v in vars)
            terms[mono] = as_coeff(value, exact)
        return cls(vars, terms, exact)

    # -- bookkeeping ------------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if self.vars != other.vars:
            raise VariableMismatchError(
                f"registries differ: {self.vars} vs {other.vars}")
        if self.exact != other.exact:
            raise TypeError("cannot mix float-mode and rational-mode polynomials")

    def is_zero(self, tol: float = 0.0) -> bool:
        if tol == 0.0:
            return not self.terms
        return all(coeff_abs(c) <= tol for c in self.terms.values())

    def max_norm(self) -> float:
        """Largest coefficient magnitude (0 for the zero polynomial)."""
        return max((coeff_abs(c) for c in self.terms.values()), default=0.0)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def coefficient(self, mono: tuple):
        """Coefficient of the given exponent multi-index (0 if absent)."""
        c = self.terms.get(tuple(mono))
        if c is None:
            return as_coeff(0, self.exact)
        return c

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            out = dict(self.terms)
            for mono, c in other.terms.items():
                out[mono] = out[mono] + c if mono in out else c
            return MultiPoly(self.vars, out, self.exact)
        try:
            return self + MultiPoly.const(other, self.vars, self.exact)
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {m: -c for m, c in self.terms.items()},
                         self.exact)

    def __sub__(self, other):
        res = self + (-other if isinstance(other, MultiPoly)
                      else -as_coeff(other, self.exact))
        return res

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            out = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    mono = _mono_add(m1, m2)
                    c = c1 * c2
                    out[mono] = out[mono] + c if mono in out else c
            return MultiPoly(self.vars, out, self.exact)
        try:
            c = as_coeff(other, self.exact)
        except TypeError:
            return NotImplemented
        return MultiPoly(self.vars, {m: v * c for m, v in self.terms.items()},
                         self.exact)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        c = as_coeff(scalar, self.exact)
        inv = c.inverse() if isinstance(c, Exact) else 1.0 / c
        return self * inv

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = MultiPoly.const(1, self.vars, self.exact)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.vars == other.vars and self.exact == other.exact
                and self.terms == other.terms)

    def max_diff(self, other: "MultiPoly") -> float:
        """Largest coefficient magnitude of self - other."""
        return (self - other).max_norm()

    # -- calculus / substitution -------------------------------------------

    def diff(self, name: str) -> "MultiPoly":
        if name not in self.vars:
            raise VariableMismatchError(f"{name!r} not in registry {self.vars}")
        i = self.vars.index(name)
        out = {}
        for mono, c in self.terms.items():
            e = mono[i]
            if e:
                m = list(mono)
                m[i] = e - 1
                mono2 = tuple(m)
                c2 = c * e
                out[mono2] = out[mono2] + c2 if mono2 in out else c2
        return MultiPoly(self.vars, out, self.exact)

    def subs(self, mapping: dict) -> "MultiPoly":
        """Substitute every variable by a polynomial over a common registry."""
        missing = [v for v in self.vars if v not in mapping]
        if missing:
            raise VariableMismatchError(f"substitution misses variables {missing}")
        images = [mapping[v] for v in self.vars]
        target = images[0].vars
        exact = images[0].exact
        for img in images:
            if img.vars != target or img.exact != exact:
                raise VariableMismatchError(
                    "substitution images must share one registry and mode")
        if exact != self.exact:
            raise TypeError("substitution images must match the source mode")
        result = MultiPoly.zero(target, exact)
        cache: dict[tuple[int, int], MultiPoly] = {}

        def power(i: int, e: int) -> MultiPoly:
            key = (i, e)
            if key not in cache:
                cache[key] = images[i] ** e
            return cache[key]

        for mono, c in self.terms.items():
            term = MultiPoly.const(c, target, exact)
            for i, e in enumerate(mono):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def embed(self, new_vars) -> "MultiPoly":
        """Widen to a superset registry (explicit, never implicit)."""
        new_vars = tuple(new_vars)
        pos = []
        for v in self.vars:
            if v not in new_vars:
                raise VariableMismatchError(f"{v!r} missing from {new_vars}")
            pos.append(new_vars.index(v))
        out = {}
        for mono, c in self.terms.items():
            m = [0] * len(new_vars)
            for p, e in zip(pos, mono):
                m[p] = e
            out[tuple(m)] = c
        return MultiPoly(new_vars, out, self.exact)

    def eval(self, point: dict) -> complex:
        """Numeric evaluation (float semantics in both modes)."""
        vals = [complex(point[v]) for v in self.vars]
        total = 0j
        for mono, c in self.terms.items():
            term = to_complex(c)
            for v, e in zip(vals, mono):
                if e:
                    term *= v ** e
            total += term
        return total

    def to_float(self) -> "MultiPoly":
        if not self.exact:
            return self
        return MultiPoly(self.vars,
                         {m: to_complex(c) for m, c in self.terms.items()},
                         exact=False)

    def __repr__(self):
        if not self.terms:
            return "MultiPoly(0)"
        bits = []
        for mono in sorted(self.terms, key=lambda m: (sum(m), m), reverse=True):
            c = self.terms[mono]
            factors = [f"{v}^{e}" if e > 1 else v
                       for v, e in zip(self.vars, mono) if e]
            bits.append("*".join([repr(c)] + factors) if factors else repr(c))
        return "MultiPoly(" + " + ".join(bits) + ")"


# ---------------------------------------------------------------------------
# QuadExponent and ExpPolyFn
# ---------------------------------------------------------------------------

class QuadExponent:
    """Quadratic form Q over a subset of the registry; the kernel exp(Q).

    Stored as ``(i, j) -> c`` with ``i <= j`` meaning the monomial
    ``c * v_i * v_j``.  No linear or constant part, so d/dv exp(Q) is an
    exact linear form times exp(Q) and the function class is closed under
    differentiation.
    """

    __slots__ = ("vars", "coeffs", "exact")

    def __init__(self, vars, coeffs=None, exact: bool = False):
        self.vars = tuple(vars)
        self.exact = bool(exact)
        clean = {}
        if coeffs:
            for (i, j), c in coeffs.items():
                if not 0 <= i <= j < len(self.vars):
                    raise VariableMismatchError(f"bad index pair {(i, j)}")
                if not coeff_is_zero(c):
                    clean[(i, j)] = c
        self.coeffs = clean

    @classmethod
    def from_pairs(cls, entries: dict, vars, exact: bool = False) -> "QuadExponent":
        """Build from ``{(name_a, name_b): value}`` monomial coefficients."""
        vars = tuple(vars)
        coeffs = {}
        for (a, b), value in entries.items():
            i, j = vars.index(a), vars.index(b)
            if i > j:
                i, j = j, i
            key = (i, j)
            c = as_coeff(value, exact)
            coeffs[key] = coeffs[key] + c if key in coeffs else c
        return cls(vars, coeffs, exact)

    @classmethod
    def zero(cls, vars, exact: bool = False) -> "QuadExponent":
        return cls(vars, {}, exact)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def gradient(self, name: str) -> MultiPoly:
        """dQ/dname as a linear MultiPoly over the registry."""
        if name not in self.vars:
            raise VariableMismatchError(f"{name!r} not in registry {self.vars}")
        k = self.vars.index(name)
        out = MultiPoly.zero(self.vars, self.exact)
        for (i, j), c in self.coeffs.items():
            if i == j == k:
                out = out + MultiPoly.var(name, self.vars, self.exact) * (c * 2)
            elif i == k:
                out = out + MultiPoly.var(self.vars[j], self.vars, self.exact) * c
            elif j == k:
                out = out + MultiPoly.var(self.vars[i], self.vars, self.exact) * c
        return out

    def as_poly(self) -> MultiPoly:
        out = MultiPoly.zero(self.vars, self.exact)
        for (i, j), c in self.coeffs.items():
            mono = [0] * len(self.vars)
            mono[i] += 1
            mono[j] += 1
            out = out + MultiPoly(self.vars, {tuple(mono): c}, self.exact)
        return out

    def __eq__(self, other):
        if not isinstance(other, QuadExponent):
            return NotImplemented
        return (self.vars == other.vars and self.exact == other.exact
                and self.coeffs == other.coeffs)

    def __repr__(self):
        return f"QuadExponent({self.as_poly()!r})"


class ExpPolyFn:
    """poly(vars) * exp(Q(vars)); the carrier for every wavefunction."""

    __slots__ = ("poly", "exponent")

    def __init__(self, poly: MultiPoly, exponent: QuadExponent | None = None):
        if exponent is None:
            exponent = QuadExponent.zero(poly.vars, poly.exact)
        if exponent.vars != poly.vars or exponent.exact != poly.exact:
            raise VariableMismatchError(
                "polynomial and exponent must share registry and mode")
        self.poly = poly
        self.exponent = exponent

    def _check(self, other: "ExpPolyFn"):
        if self.exponent != other.exponent:
            raise VariableMismatchError(
                "functions with different exponents cannot be combined")

    def __add__(self, other: "ExpPolyFn") -> "ExpPolyFn":
        self._check(other)
        return ExpPolyFn(self.poly + other.poly, self.exponent)

    def __sub__(self, other: "ExpPolyFn") -> "ExpPolyFn":
        self._check(other)
        return ExpPolyFn(self.poly - other.poly, self.exponent)

    def __mul__(self, scalar) -> "ExpPolyFn":
        return ExpPolyFn(self.poly * scalar, self.exponent)

    __rmul__ = __mul__

    def __neg__(self) -> "ExpPolyFn":
        return ExpPolyFn(-self.poly, self.exponent)

    def __eq__(self, other):
        if not isinstance(other, ExpPolyFn):
            return NotImplemented
        return self.exponent == other.exponent and self.poly == other.poly

    def __repr__(self):
        return f"ExpPolyFn({self.poly!r}, exp={self.exponent!r})"


def coeff_max_norm(f) -> float:
    """Largest coefficient magnitude of a function or polynomial."""
    if isinstance(f, ExpPolyFn):
        return f.poly.max_norm()
    return f.max_norm()


# ---------------------------------------------------------------------------
# DiffOp
# ---------------------------------------------------------------------------

class DiffOp:
    """Normal-ordered polynomial differential operator.

    Terms are ``(mult, deriv) -> c`` standing for ``c * v^mult * D^deriv``
    with all derivatives acting first.  Products re-normalize through
    ``D^n v^m = sum_k k! C(n,k) C(m,k) v^(m-k) D^(n-k)`` applied per
    variable, so equality of operators is equality of term maps.
    """

    __slots__ = ("vars", "terms", "exact")

    def __init__(self, vars, terms=None, exact: bool = False):
        self.vars = tuple(vars)
        self.exact = bool(exact)
        clean = {}
        nv = len(self.vars)
        if terms:
            for (mult, deriv), c in terms.items():
                mult, deriv = tuple(mult), tuple(deriv)
                if len(mult) != nv or len(deriv) != nv:
                    raise VariableMismatchError("term indices do not match registry")
                if not coeff_is_zero(c):
                    key = (mult, deriv)
                    clean[key] = clean[key] + c if key in clean else c
        self.terms = {k: c for k, c in clean.items() if not coeff_is_zero(c)}

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, vars, exact: bool = False) -> "DiffOp":
        return cls(vars, {}, exact)

    @classmethod
    def identity(cls, vars, exact: bool = False) -> "DiffOp":
        vars = tuple(vars)
        z = (0,) * len(vars)
        return cls(vars, {(z, z): as_coeff(1, exact)}, exact)

    @classmethod
    def coordinate(cls, name, vars, exact: bool = False) -> "DiffOp":
        """Multiplication by a coordinate."""
        vars = tuple(vars)
        z = (0,) * len(vars)
        mult = tuple(1 if v == name else 0 for v in vars)
        if sum(mult) != 1:
            raise VariableMismatchError(f"{name!r} not in registry {vars}")
        return cls(vars, {(mult, z): as_coeff(1, exact)}, exact)

    @classmethod
    def derivative(cls, name, vars, exact: bool = False, order: int = 1) -> "DiffOp":
        vars = tuple(vars)
        z = (0,) * len(vars)
        deriv = tuple(order if v == name else 0 for v in vars)
        if sum(deriv) != order:
            raise VariableMismatchError(f"{name!r} not in registry {vars}")
        return cls(vars, {(z, deriv): as_coeff(1, exact)}, exact)

    @classmethod
    def momentum(cls, name, vars, exact: bool = False) -> "DiffOp":
        """-i d/dname, the quantum momentum conjugate to a coordinate."""
        i = Exact.imag_unit() if exact else 1j
        return cls.derivative(name, vars, exact) * (-i)

    @classmethod
    def from_poly(cls, poly: MultiPoly) -> "DiffOp":
        """Multiplication operator by a polynomial."""
        z = (0,) * len(poly.vars)
        return cls(poly.vars, {(mono, z): c for mono, c in poly.terms.items()},
                   poly.exact)

    # -- algebra ----------------------------------------------------------

    def _check(self, other: "DiffOp"):
        if self.vars != other.vars:
            raise VariableMismatchError(
                f"registries differ: {self.vars} vs {other.vars}")
        if self.exact != other.exact:
            raise TypeError("cannot mix float-mode and rational-mode operators")

    def __add__(self, other):
        if isinstance(other, DiffOp):
            self._check(other)
            out = dict(self.terms)
            for key, c in other.terms.items():
                out[key] = out[key] + c if key in out else c
            return DiffOp(self.vars, out, self.exact)
        return self + DiffOp.identity(self.vars, self.exact) * other

    __radd__ = __add__

    def __neg__(self):
        return DiffOp(self.vars, {k: -c for k, c in self.terms.items()}, self.exact)

    def __sub__(self, other):
        return self + (-(other if isinstance(other, DiffOp)
                         else DiffOp.identity(self.vars, self.exact) * other))

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return self._compose(other)
        try:
            c = as_coeff(other, self.exact)
        except TypeError:
            return NotImplemented
        return DiffOp(self.vars, {k: v * c for k, v in self.terms.items()},
                      self.exact)

    def __rmul__(self, other):
        # scalars commute with the whole operator
        return self * other

    def _compose(self, other: "DiffOp") -> "DiffOp":
        """Operator product self . other in normal order."""
        self._check(other)
        out = {}
        for (m1, d1), c1 in self.terms.items():
            for (m2, d2), c2 in other.terms.items():
                # commute d1 past m2 variable by variable
                ranges = [range(min(n, m) + 1) for n, m in zip(d1, m2)]
                for k in itertools.product(*ranges):
                    factor = 1
                    for kv, nv, mv in zip(k, d1, m2):
                        if kv:
                            factor *= math.factorial(kv) * math.comb(nv, kv) \
                                * math.comb(mv, kv)
                    mult = tuple(a + b - kv for a, b, kv in zip(m1, m2, k))
                    deriv = tuple(a + b - kv for a, b, kv in zip(d1, d2, k))
                    c = c1 * c2 * factor
                    key = (mult, deriv)
                    out[key] = out[key] + c if key in out else c
        return DiffOp(self.vars, out, self.exact)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("operator powers must be nonnegative integers")
        result = DiffOp.identity(self.vars, self.exact)
        for _ in range(n):
            result = result * self
        return result

    def commutator(self, other: "DiffOp") -> "DiffOp":
        """[self, other] = self.other - other.self, normal ordered."""
        return self._compose(other) - other._compose(self)

    def embed(self, new_vars) -> "DiffOp":
        new_vars = tuple(new_vars)
        pos = []
        for v in self.vars:
            if v not in new_vars:
                raise VariableMismatchError(f"{v!r} missing from {new_vars}")
            pos.append(new_vars.index(v))
        out = {}
        for (mult, deriv), c in self.terms.items():
            m = [0] * len(new_vars)
            d = [0] * len(new_vars)
            for p, e in zip(pos, mult):
                m[p] = e
            for p, e in zip(pos, deriv):
                d[p] = e
            out[(tuple(m), tuple(d))] = c
        return DiffOp(new_vars, out, self.exact)

    # -- action -----------------------------------------------------------

    def apply(self, f):
        """Apply to an ExpPolyFn (or bare MultiPoly); exponent is preserved."""
        bare = isinstance(f, MultiPoly)
        if bare:
            f = ExpPolyFn(f)
        op = self
        if op.vars != f.poly.vars:
            if not set(op.vars) <= set(f.poly.vars):
                raise VariableMismatchError(
                    f"operator variables {op.vars} not contained in "
                    f"function registry {f.poly.vars}")
            op = op.embed(f.poly.vars)
        if op.exact != f.poly.exact:
            raise TypeError("operator and function must share arithmetic mode")
        vars = f.poly.vars
        grads = {}
        if not f.exponent.is_zero:
            grads = {v: f.exponent.gradient(v) for v in vars}
        result = MultiPoly.zero(vars, op.exact)
        for (mult, deriv), c in op.terms.items():
            g = f.poly
            for name, order in zip(vars, deriv):
                for _ in range(order):
                    g = g.diff(name) + g * grads[name] if grads \
                        else g.diff(name)
            if any(mult):
                g = g * MultiPoly(vars, {tuple(mult): as_coeff(1, op.exact)},
                                  op.exact)
            result = result + g * c
        return result if bare else ExpPolyFn(result, f.exponent)

    # -- inspection ---------------------------------------------------------

    def max_norm(self) -> float:
        return max((coeff_abs(c) for c in self.terms.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        if tol == 0.0:
            return not self.terms
        return all(coeff_abs(c) <= tol for c in self.terms.values())

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (self.vars == other.vars and self.exact == other.exact
                and self.terms == other.terms)

    def __repr__(self):
        if not self.terms:
            return "DiffOp(0)"
        bits = []
        for (mult, deriv) in sorted(self.terms,
                                    key=lambda k: (sum(k[1]), sum(k[0]), k)):
            c = self.terms[(mult, deriv)]
            factors = [f"{v}^{e}" if e > 1 else v
                       for v, e in zip(self.vars, mult) if e]
            factors += [f"d{v}^{e}" if e > 1 else f"d{v}"
                        for v, e in zip(self.vars, deriv) if e]
            bits.append("*".join([repr(c)] + factors) if factors else repr(c))
        return "DiffOp(" + " + ".join(bits) + ")"


# ---------------------------------------------------------------------------
# named operations
# ---------------------------------------------------------------------------

def diffop_apply(op: DiffOp, f):
    """Functional alias for :meth:`DiffOp.apply`."""
    return op.apply(f)


def diffop_commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    """Functional alias for :meth:`DiffOp.commutator`."""
    return a.commutator(b)


def hermite(n: int, arg: MultiPoly) -> MultiPoly:
    """Physicists' Hermite polynomial H_n evaluated at a linear form.

    Uses H_0 = 1, H_1 = 2z and H_{n+1} = 2 z H_n - 2 n H_{n-1}; the result
    is expanded over the argument's registry and is exact in rational mode.
    """
    if n < 0:
        raise ValueError("Hermite index must be nonnegative")
    if n > 0 and arg.is_zero():
        raise ValueError("Hermite argument must have a nonzero coefficient")
    one = MultiPoly.const(1, arg.vars, arg.exact)
    if n == 0:
        return one
    prev, cur = one, arg * 2
    for k in range(1, n):
        prev, cur = cur, arg * cur * 2 - prev * (2 * k)
    return cur


def exp_diff_apply(op: DiffOp, scale, p: MultiPoly) -> MultiPoly:
    """Finite expansion of exp(scale * op) applied to a polynomial.

    ``op`` must consist of pure derivative monomials of order >= 1, so that
    each application strictly lowers the degree and the series terminates.
    """
    for (mult, deriv), _ in op.terms.items():
        if any(mult) or not any(deriv):
            raise ValueError(
                "exp_diff_apply needs a pure derivative operator of order >= 1")
    scale = as_coeff(scale, p.exact)
    total = p
    term = p
    k = 1
    while True:
        term = op.apply(term)
        if term.is_zero():
            break
        if p.exact:
            term = term * (scale * Fraction(1, k))
        else:
            term = term * (scale / k)
        total = total + term
        k += 1
    return total
