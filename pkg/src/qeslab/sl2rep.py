"""Finite-dimensional SL(2) generators on polynomials of bounded degree.

The three generators act on the monomial basis {1, xi, ..., xi**(2j)} as

    T+ = 2j*xi - xi**2 d/dxi        (degree raising, annihilates xi**(2j))
    T0 = -j + xi d/dxi              (diagonal, entries m - j)
    T- = d/dxi                      (degree lowering)

with j a semi-integer stored as ``twice_j`` to keep the bookkeeping exact.
Matrices are dense tuples of Fractions; column m holds the image of xi**m.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import RationalPoly
from .errors import QeslabError

GENERATORS = ("+", "0", "-")

Matrix = tuple[tuple[Fraction, ...], ...]


class DegreeOverflow(QeslabError):
    """Polynomial degree exceeds the 2j sector bound."""


@dataclass(frozen=True)
class SpinLabel:
    """Spin j stored as the integer 2j; representation dimension is 2j + 1."""

    twice_j: int

    def __post_init__(self) -> None:
        if self.twice_j < 0 or int(self.twice_j) != self.twice_j:
            raise ValueError(f"twice_j must be a non-negative integer, got {self.twice_j!r}")

    @property
    def j(self) -> Fraction:
        return Fraction(self.twice_j, 2)

    @property
    def k(self) -> Fraction:
        """k = 2j - 1."""
        return Fraction(self.twice_j - 1)

    @property
    def dim(self) -> int:
        return self.twice_j + 1


@dataclass(frozen=True)
class GeneratorMatrix:
    which: str
    spin: SpinLabel
    entries: Matrix


def generator_action(which: str, spin: SpinLabel) -> tuple[RationalPoly, RationalPoly]:
    """First-order form (f, g) with T = f(xi) d/dxi + g(xi)."""
    j = spin.j
    if which == "+":
        return RationalPoly({2: Fraction(-1)}), RationalPoly({1: 2 * j})
    if which == "0":
        return RationalPoly({1: Fraction(1)}), RationalPoly({0: -j})
    if which == "-":
        return RationalPoly({0: Fraction(1)}), RationalPoly.zero()
    raise ValueError(f"unknown generator {which!r}")


def apply_generator(which: str, spin: SpinLabel, p: RationalPoly) -> RationalPoly:
    """Exact image of p under the generator; sector degree is preserved."""
    if p.degree() > spin.twice_j:
        raise DegreeOverflow(f"degree {p.degree()} exceeds sector bound 2j = {spin.twice_j}")
    f, g = generator_action(which, spin)
    return f * p.derive() + g * p


def generator_matrix(which: str, spin: SpinLabel) -> GeneratorMatrix:
    """Exact matrix of the generator; column m is the image of xi**m."""
    dim = spin.dim
    cols = []
    for m in range(dim):
        image = apply_generator(which, spin, RationalPoly.monomial(m))
        cols.append([image.coefficient(i) for i in range(dim)])
    entries = tuple(tuple(cols[m][i] for m in range(dim)) for i in range(dim))
    return GeneratorMatrix(which, spin, entries)


# -- exact dense matrix helpers (dimensions stay tiny: 2j + 1 <= ~11)


def mat_zero(dim: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(dim)) for _ in range(dim))


def mat_identity(dim: int) -> Matrix:
    return tuple(tuple(Fraction(1 if i == k else 0) for k in range(dim)) for i in range(dim))


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: Matrix, k: Fraction) -> Matrix:
    k = Fraction(k)
    return tuple(tuple(x * k for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    dim = len(a)
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a
    )


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


@dataclass(frozen=True)
class AlgebraReport:
    spin: SpinLabel
    commutators_ok: bool
    casimir: Matrix
    casimir_ok: bool
    failures: tuple[str, ...]


def verify_algebra(spin: SpinLabel) -> AlgebraReport:
    """Check [T0, T+-] = +-T+- and [T+, T-] = 2 T0 as exact identities.

    Also returns the Casimir T0*T0 + (T+T- + T-T+)/2, which must equal
    j(j+1) times the identity.
    """
    tp = generator_matrix("+", spin).entries
    t0 = generator_matrix("0", spin).entries
    tm = generator_matrix("-", spin).entries

    failures = []
    if commutator(t0, tp) != tp:
        failures.append("[T0,T+] != T+")
    if commutator(t0, tm) != mat_scale(tm, Fraction(-1)):
        failures.append("[T0,T-] != -T-")
    if commutator(tp, tm) != mat_scale(t0, Fraction(2)):
        failures.append("[T+,T-] != 2*T0")

    anti = mat_add(mat_mul(tp, tm), mat_mul(tm, tp))
    casimir = mat_add(mat_mul(t0, t0), mat_scale(anti, Fraction(1, 2)))
    j = spin.j
    casimir_ok = casimir == mat_scale(mat_identity(spin.dim), j * (j + 1))
    if not casimir_ok:
        failures.append("Casimir != j(j+1) * I")

    return AlgebraReport(
        spin=spin,
        commutators_ok=not any(f.startswith("[") for f in failures),
        casimir=casimir,
        casimir_ok=casimir_ok,
        failures=tuple(failures),
    )
