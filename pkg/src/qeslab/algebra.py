"""Exact sparse polynomial and power-sum arithmetic.

Two representations back all symbolic work in this package:

``RationalPoly``
    A polynomial in the algebraic variable with non-negative integer degrees
    and exact ``Fraction`` coefficients, stored sparsely as degree -> coefficient.
    The zero polynomial is the empty map and its degree is ``-inf``.

``PowerSum``
    A finite sum ``sum(c * x**e)`` whose exponents ``e`` are exact rationals
    and whose coefficients are either exact rationals or multiprecision reals
    (``mpmath.mpf``).  Exponents stay exact even in real-coefficient mode,
    because coordinate substitutions act on exponents and must not round.

Coefficients prune to canonical form eagerly: no zero terms are ever stored,
so structural equality is semantic equality.  All values are immutable after
construction and every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from mpmath import mp, mpf

from .errors import QeslabError

Rational = Fraction
Scalar = Union[Fraction, mpf]

NEG_INFINITY = float("-inf")


class NonRationalPower(QeslabError):
    """An exact rational power was requested but the result is irrational."""


def to_mpf(value: Scalar) -> mpf:
    """Convert a scalar to a multiprecision real at the working precision."""
    if isinstance(value, Fraction):
        return mpf(value.numerator) / mpf(value.denominator)
    return mpf(value)


def mpf_to_fraction(value: mpf) -> Fraction:
    """Exact rational value of a binary float (mantissa * 2**exponent)."""
    sign, man, exp, _ = mp.mpf(value)._mpf_
    frac = Fraction(man) * Fraction(2) ** exp
    return -frac if sign else frac


def _int_nth_root(n: int, k: int) -> int | None:
    """Exact k-th root of a non-negative integer, or None if not a power."""
    if n < 0:
        return None
    if n in (0, 1) or k == 1:
        return n
    lo, hi = 0, 1 << (n.bit_length() // k + 2)
    while lo <= hi:
        mid = (lo + hi) // 2
        v = mid**k
        if v == n:
            return mid
        if v < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def rational_root(value: Fraction, k: int) -> Fraction | None:
    """Exact k-th root of a non-negative rational, or None."""
    num = _int_nth_root(value.numerator, k)
    if num is None:
        return None
    den = _int_nth_root(value.denominator, k)
    if den is None:
        return None
    return Fraction(num, den)


def scalar_pow(base: Scalar, exponent: Fraction, *, require_exact: bool = False) -> Scalar:
    """Raise a scalar to an exact rational power.

    Integer exponents are always exact.  Fractional exponents of a
    ``Fraction`` stay exact when the root is rational; otherwise the result
    falls back to a multiprecision real, or raises ``NonRationalPower`` when
    ``require_exact`` is set.  Negative bases are only valid with integer
    exponents.
    """
    exponent = Fraction(exponent)
    if exponent.denominator == 1:
        e = int(exponent)
        if isinstance(base, Fraction):
            if base == 0 and e < 0:
                raise ZeroDivisionError("0 raised to a negative power")
            return base**e
        return to_mpf(base) ** e
    if isinstance(base, Fraction):
        if base == 0:
            if exponent > 0:
                return Fraction(0)
            raise ZeroDivisionError("0 raised to a negative power")
        if base < 0:
            raise NonRationalPower(f"negative base {base} with fractional exponent {exponent}")
        root = rational_root(base, exponent.denominator)
        if root is not None:
            return root ** exponent.numerator
        if require_exact:
            raise NonRationalPower(f"{base}**({exponent}) is irrational")
        return to_mpf(base) ** to_mpf(Fraction(exponent))
    if base < 0:
        raise NonRationalPower(f"negative base with fractional exponent {exponent}")
    return to_mpf(base) ** to_mpf(Fraction(exponent))


def scalar_sqrt(value: Scalar, *, require_exact: bool = False) -> Scalar:
    return scalar_pow(value, Fraction(1, 2), require_exact=require_exact)


def add_scalars(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return to_mpf(a) + to_mpf(b)


def mul_scalars(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return to_mpf(a) * to_mpf(b)


# ---------------------------------------------------------------------------
# RationalPoly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalPoly:
    """Sparse exact polynomial: degree -> Fraction, zero terms never stored."""

    coeffs: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for deg, c in self.coeffs.items():
            if deg < 0 or int(deg) != deg:
                raise ValueError(f"invalid degree {deg!r}")
            c = Fraction(c)
            if c != 0:
                clean[int(deg)] = c
        object.__setattr__(self, "coeffs", clean)

    # -- constructors

    @classmethod
    def zero(cls) -> "RationalPoly":
        return cls({})

    @classmethod
    def one(cls) -> "RationalPoly":
        return cls({0: Fraction(1)})

    @classmethod
    def monomial(cls, degree: int, coeff: Scalar = Fraction(1)) -> "RationalPoly":
        return cls({degree: Fraction(coeff)})

    # -- structure

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int | float:
        """Degree, with -inf for the zero polynomial."""
        return max(self.coeffs) if self.coeffs else NEG_INFINITY

    def coefficient(self, degree: int) -> Fraction:
        return self.coeffs.get(degree, Fraction(0))

    def items(self) -> list[tuple[int, Fraction]]:
        return sorted(self.coeffs.items())

    # -- arithmetic

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        out = dict(self.coeffs)
        for deg, c in other.coeffs.items():
            out[deg] = out.get(deg, Fraction(0)) + c
        return RationalPoly(out)

    def __neg__(self) -> "RationalPoly":
        return RationalPoly({d: -c for d, c in self.coeffs.items()})

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + (-other)

    def __mul__(self, other: "RationalPoly | Fraction | int") -> "RationalPoly":
        if isinstance(other, (Fraction, int)):
            k = Fraction(other)
            return RationalPoly({d: c * k for d, c in self.coeffs.items()})
        out: dict[int, Fraction] = {}
        for da, ca in self.coeffs.items():
            for db, cb in other.coeffs.items():
                d = da + db
                out[d] = out.get(d, Fraction(0)) + ca * cb
        return RationalPoly(out)

    __rmul__ = __mul__

    def derive(self) -> "RationalPoly":
        """Exact derivative d/dxi."""
        return RationalPoly({d - 1: c * d for d, c in self.coeffs.items() if d > 0})

    def __call__(self, point: Fraction) -> Fraction:
        point = Fraction(point)
        total = Fraction(0)
        for d, c in self.coeffs.items():
            total += c * point**d
        return total

    def to_powersum(self) -> "PowerSum":
        return PowerSum({Fraction(d): c for d, c in self.coeffs.items()})

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = [f"{c}*xi^{d}" if d else f"{c}" for d, c in self.items()]
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# PowerSum
# ---------------------------------------------------------------------------


def _is_zero_scalar(c: Scalar) -> bool:
    return c == 0


@dataclass(frozen=True)
class PowerSum:
    """Finite sum of c * x**e with exact rational exponents.

    Coefficients are ``Fraction`` in exact mode and ``mpmath.mpf`` once an
    irrational scalar has entered; the two kinds may coexist term-wise.
    """

    terms: Mapping[Fraction, Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for e, c in self.terms.items():
            e = Fraction(e)
            if isinstance(c, (int, Fraction)):
                c = Fraction(c)
            if not _is_zero_scalar(c):
                clean[e] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def zero(cls) -> "PowerSum":
        return cls({})

    @classmethod
    def constant(cls, value: Scalar) -> "PowerSum":
        return cls({Fraction(0): value})

    @classmethod
    def term(cls, coeff: Scalar, exponent: Fraction) -> "PowerSum":
        return cls({Fraction(exponent): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exponent: Fraction) -> Scalar:
        return self.terms.get(Fraction(exponent), Fraction(0))

    def exponents(self) -> list[Fraction]:
        return sorted(self.terms)

    def items(self) -> list[tuple[Fraction, Scalar]]:
        return sorted(self.terms.items())

    def __add__(self, other: "PowerSum") -> "PowerSum":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = add_scalars(out[e], c) if e in out else c
        return PowerSum(out)

    def __neg__(self) -> "PowerSum":
        return PowerSum({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "PowerSum") -> "PowerSum":
        return self + (-other)

    def __mul__(self, other: "PowerSum") -> "PowerSum":
        out: dict[Fraction, Scalar] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = ea + eb
                c = mul_scalars(ca, cb)
                out[e] = add_scalars(out[e], c) if e in out else c
        return PowerSum(out)

    def scale(self, factor: Scalar) -> "PowerSum":
        if _is_zero_scalar(factor):
            return PowerSum.zero()
        return PowerSum({e: mul_scalars(c, factor) for e, c in self.terms.items()})

    def shift_exponents(self, offset: Fraction) -> "PowerSum":
        offset = Fraction(offset)
        return PowerSum({e + offset: c for e, c in self.terms.items()})

    def derive(self) -> "PowerSum":
        """Exact derivative d/dx: c * x**e -> c*e * x**(e-1)."""
        out = {}
        for e, c in self.terms.items():
            if e != 0:
                out[e - 1] = mul_scalars(c, e)
        return PowerSum(out)

    def substitute(self, scale: Scalar, power: Fraction, *, require_exact: bool = False) -> "PowerSum":
        """Rewrite under x = scale * t**power; returns the sum in t.

        Each term c * x**e becomes c * scale**e * t**(power*e).  Terms whose
        new exponents collide are merged.  Raises ``NonRationalPower`` when an
        exact result is demanded but scale**e is irrational.
        """
        power = Fraction(power)
        if power == 0:
            raise ValueError("substitution power must be nonzero")
        if _is_zero_scalar(scale):
            raise ValueError("substitution scale must be nonzero")
        out: dict[Fraction, Scalar] = {}
        for e, c in self.terms.items():
            factor = scalar_pow(scale, e, require_exact=require_exact)
            new_e = power * e
            c_new = mul_scalars(c, factor)
            out[new_e] = add_scalars(out[new_e], c_new) if new_e in out else c_new
        return PowerSum(out)

    def integrate(self) -> tuple["PowerSum", Scalar]:
        """Term-wise antiderivative.

        Returns ``(powers, c_log)`` where the x**-1 term integrates to the
        logarithmic slot: integral = powers(x) + c_log * ln(x).
        """
        out: dict[Fraction, Scalar] = {}
        c_log: Scalar = Fraction(0)
        for e, c in self.terms.items():
            if e == -1:
                c_log = add_scalars(c_log, c)
            else:
                out[e + 1] = mul_scalars(c, Fraction(1, 1) / (e + 1))
        return PowerSum(out), c_log

    def evaluate(self, x):
        """Numeric evaluation at float or numpy-array points (x > 0)."""
        total = 0.0 * x
        for e, c in self.terms.items():
            total = total + float(c) * x ** float(e)
        return total

    def constant_term(self) -> Scalar:
        return self.coefficient(Fraction(0))

    def without_constant(self) -> "PowerSum":
        return PowerSum({e: c for e, c in self.terms.items() if e != 0})

    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.terms.values())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*x^{e}" for e, c in self.items())


def powersum_substitute(p: PowerSum, scale: Scalar, power: Fraction, *, require_exact: bool = False) -> PowerSum:
    """Module-level alias for PowerSum.substitute (x = scale * t**power)."""
    return p.substitute(scale, power, require_exact=require_exact)


# ---------------------------------------------------------------------------
# String forms used by the JSON interfaces
# ---------------------------------------------------------------------------


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(str(text).strip())


def format_real_17(value) -> str:
    """Decimal string with 17 significant digits (lossless for doubles)."""
    return f"{float(value):.17g}"


def format_scalar(value: Scalar) -> str:
    if isinstance(value, Fraction):
        return format_rational(value)
    return format_real_17(value)


def powersum_to_json(p: PowerSum) -> dict[str, str]:
    return {format_rational(e): format_scalar(c) for e, c in p.items()}


def powersum_from_json(data: Mapping[str, str]) -> PowerSum:
    terms: dict[Fraction, Scalar] = {}
    for e_str, c_str in data.items():
        coeff: Scalar
        try:
            coeff = Fraction(c_str)
        except ValueError:
            coeff = mpf(c_str)
        terms[parse_rational(e_str)] = coeff
    return PowerSum(terms)


def poly_to_json(p: RationalPoly) -> dict[str, str]:
    return {str(d): format_rational(c) for d, c in p.items()}


def poly_from_json(data: Mapping[str, str]) -> RationalPoly:
    return RationalPoly({int(d): parse_rational(c) for d, c in data.items()})
