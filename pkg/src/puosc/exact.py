"""Exact complex coefficients with square roots of positive rationals.

Rational-mode computations carry every coefficient as a finite sum

    sum_k  (a_k + i b_k) * sqrt(d_k)

with Gaussian-rational weights and pairwise distinct squarefree positive
integer radicands d_k.  The set is closed under addition and
multiplication (sqrt(a)*sqrt(b) reduces by extracting the square part of
a*b), which is all the polynomial algebra needs; division is supported
for denominators of at most two radical terms, which covers every
coefficient the canonical maps and eigenfunction families produce.
Zero tests are exact, so "the commutator vanishes" and "the two
Hamiltonians coincide" are decided without tolerances.
"""

from __future__ import annotations

import math
from fractions import Fraction

_F0 = Fraction(0)
_F1 = Fraction(1)


def squarefree_split(n: int) -> tuple[int, int]:
    """Split n > 0 as s*s*d with d squarefree; return (s, d)."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, d = 1, 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
    return s, d * n


class Exact:
    """An element of Q(i) extended by square roots of positive rationals.

    Stored as a map radicand -> (re, im) with Fraction components; the
    radicands are squarefree positive integers and 1 denotes the rational
    part.  Instances are immutable.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[int, tuple[Fraction, Fraction]] | None = None):
        clean: dict[int, tuple[Fraction, Fraction]] = {}
        if terms:
            for d, (re, im) in terms.items():
                if re or im:
                    clean[d] = (re, im)
        self._terms = clean

    # -- construction -------------------------------------------------

    @classmethod
    def rational(cls, re, im=0) -> "Exact":
        return cls({1: (Fraction(re), Fraction(im))})

    @classmethod
    def imag_unit(cls) -> "Exact":
        return cls({1: (_F0, _F1)})

    @classmethod
    def sqrt(cls, value) -> "Exact":
        """Exact square root of a nonnegative rational."""
        v = Fraction(value)
        if v < 0:
            raise ValueError("Exact.sqrt needs a nonnegative rational")
        if v == 0:
            return cls()
        # sqrt(p/q) = sqrt(p*q)/q
        s, d = squarefree_split(v.numerator * v.denominator)
        return cls({d: (Fraction(s, v.denominator), _F0)})

    @classmethod
    def coerce(cls, value) -> "Exact":
        if isinstance(value, Exact):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        if isinstance(value, float):
            if value.is_integer():
                return cls.rational(int(value))
            raise TypeError(f"cannot coerce non-integral float {value!r} to Exact; "
                            "pass a Fraction")
        if isinstance(value, complex):
            if value.real.is_integer() and value.imag.is_integer():
                return cls.rational(int(value.real), int(value.imag))
            raise TypeError(f"cannot coerce non-integral complex {value!r} to Exact")
        raise TypeError(f"cannot coerce {type(value).__name__} to Exact")

    # -- predicates / conversions -------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def to_complex(self) -> complex:
        out = 0j
        for d, (re, im) in self._terms.items():
            out += complex(re, im) * math.sqrt(d)
        return out

    __complex__ = to_complex

    def __abs__(self) -> float:
        return abs(self.to_complex())

    def real_part(self) -> "Exact":
        return Exact({d: (re, _F0) for d, (re, _) in self._terms.items()})

    def imag_part(self) -> "Exact":
        """Exact y in x + i*y (a real radical sum)."""
        return Exact({d: (im, _F0) for d, (_, im) in self._terms.items()})

    def conjugate(self) -> "Exact":
        return Exact({d: (re, -im) for d, (re, im) in self._terms.items()})

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other) -> "Exact":
        try:
            other = Exact.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for d, (re, im) in other._terms.items():
            cur = out.get(d)
            out[d] = (cur[0] + re, cur[1] + im) if cur else (re, im)
        return Exact(out)

    __radd__ = __add__

    def __neg__(self) -> "Exact":
        return Exact({d: (-re, -im) for d, (re, im) in self._terms.items()})

    def __sub__(self, other) -> "Exact":
        try:
            other = Exact.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Exact":
        return Exact.coerce(other) - self

    def __mul__(self, other) -> "Exact":
        try:
            other = Exact.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[int, tuple[Fraction, Fraction]] = {}
        for d1, (a1, b1) in self._terms.items():
            for d2, (a2, b2) in other._terms.items():
                g = math.gcd(d1, d2)
                d = (d1 // g) * (d2 // g)
                re = (a1 * a2 - b1 * b2) * g
                im = (a1 * b2 + b1 * a2) * g
                cur = out.get(d)
                out[d] = (cur[0] + re, cur[1] + im) if cur else (re, im)
        return Exact(out)

    __rmul__ = __mul__

    def inverse(self) -> "Exact":
        """Multiplicative inverse for at most two radical terms."""
        items = sorted(self._terms.items())
        if not items:
            raise ZeroDivisionError("inverse of exact zero")
        if len(items) == 1:
            d, (re, im) = items[0]
            # 1/(c sqrt(d)) = conj(c) sqrt(d) / (|c|^2 d)
            n = (re * re + im * im) * d
            return Exact({d: (re / n, -im / n)})
        if len(items) == 2:
            (d1, c1), (d2, c2) = items
            conj = Exact({d1: c1, d2: (-c2[0], -c2[1])})
            reduced = self * conj  # single rational term: c1^2 d1 - c2^2 d2
            return conj * reduced.inverse()
        raise ArithmeticError(
            "division by a sum of more than two radicals is not supported")

    def __truediv__(self, other) -> "Exact":
        try:
            other = Exact.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Exact":
        return Exact.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "Exact":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = Exact.rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / display ------------------------------------------

    def __eq__(self, other) -> bool:
        try:
            other = Exact.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "Exact(0)"
        parts = []
        for d in sorted(self._terms):
            re, im = self._terms[d]
            c = f"({re}+{im}j)" if im else f"{re}"
            parts.append(c if d == 1 else f"{c}*sqrt({d})")
        return "Exact(" + " + ".join(parts) + ")"
