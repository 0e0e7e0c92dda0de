"""Hamiltonians as quadratic forms in the SL(2) generators.

An operator H = sum(C_ab T^a T^b) + sum(C_a T^a) acts on the (2j+1)-dim
polynomial sector both as an exact matrix and as the second-order form

    H = -1/2 P4(xi) d2/dxi2 + P3(xi) d/dxi + P2(xi).

When P4 is a single monomial p * xi**n (n in {0, 1, 3, 4}) the coordinate
x = c * xi**((2-n)/2) with c = (2/(2-n)) / sqrt(p) brings H to the radial
form -1/2 d2/dx2 + A(x) d/dx + dV(x), from which the quasi-gauge and the
physical potential follow:

    A  = (P4'/4 + P3) / sqrt(P4)   restricted to xi = xi(x)
    dV = P2(xi(x))
    V  = dV + A**2/2 - A'/2

The similarity transform psi -> exp(-a) psi with a = integral(A dx) removes
the first-derivative term, so matrix eigenpairs (E, pbar) yield physical
eigenfunctions psi = pbar(xi(x)) * exp(-a(x)) of -1/2 d2/dx2 + V at energy E.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .algebra import (
    PowerSum,
    RationalPoly,
    Scalar,
    format_real_17,
    format_rational,
    format_scalar,
    parse_rational,
    poly_from_json,
    poly_to_json,
    powersum_from_json,
    powersum_to_json,
    scalar_pow,
)
from .errors import QeslabError
from .sl2rep import (
    GENERATORS,
    Matrix,
    SpinLabel,
    generator_action,
    generator_matrix,
    mat_add,
    mat_mul,
    mat_scale,
    mat_zero,
)

SPECIAL_MINUS_ZERO = "-0"


class ExponentialCase(QeslabError):
    """P4 ~ xi**2 leads to xi = exp(x), outside the power-law setting."""


class NonMonomial(QeslabError):
    """P4 is not a single nonzero monomial; no power-law coordinate exists."""


class BranchAmbiguity(QeslabError):
    """sqrt(P4) needs an explicit branch (leading coefficient not positive)."""


class ConvergenceFailure(QeslabError):
    """The dense eigensolver did not reach the required residual."""


class DomainError(QeslabError):
    """Sample point outside the domain of the coordinate map."""


# ---------------------------------------------------------------------------
# Generator coefficients and assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorCoefficients:
    """Coefficients of the quadratic form in the generators.

    ``quadratic`` maps ordered pairs like ("+", "+") to C_ab, ``linear`` maps
    single generators to C_a.  ``special`` holds named bilinears; the only one
    defined is "-0", the combination T-T0 + j*T- whose action on xi**m is
    m**2 * xi**(m-1) (equivalently xi d2/dxi2 + d/dxi).
    """

    quadratic: Mapping[tuple[str, str], Fraction] = field(default_factory=dict)
    linear: Mapping[str, Fraction] = field(default_factory=dict)
    special: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        quad = {}
        for (a, b), c in self.quadratic.items():
            if a not in GENERATORS or b not in GENERATORS:
                raise ValueError(f"unknown generator pair {(a, b)!r}")
            c = Fraction(c)
            if c != 0:
                quad[(a, b)] = c
        lin = {}
        for a, c in self.linear.items():
            if a not in GENERATORS:
                raise ValueError(f"unknown generator {a!r}")
            c = Fraction(c)
            if c != 0:
                lin[a] = c
        spec = {}
        for name, c in self.special.items():
            if name != SPECIAL_MINUS_ZERO:
                raise ValueError(f"unknown special bilinear {name!r}")
            c = Fraction(c)
            if c != 0:
                spec[name] = c
        if not (quad or lin or spec):
            raise ValueError("coefficient set must have at least one nonzero entry")
        object.__setattr__(self, "quadratic", quad)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "special", spec)

    @classmethod
    def from_flat(cls, flat: Mapping[str, Fraction]) -> "GeneratorCoefficients":
        """Build from flat keys: "a" linear, "a,b" quadratic, "-0" special."""
        quad: dict[tuple[str, str], Fraction] = {}
        lin: dict[str, Fraction] = {}
        spec: dict[str, Fraction] = {}
        for key, value in flat.items():
            key = key.strip()
            if key == SPECIAL_MINUS_ZERO:
                spec[key] = Fraction(value)
            elif "," in key:
                a, b = (s.strip() for s in key.split(","))
                quad[(a, b)] = Fraction(value)
            elif len(key) == 1:
                lin[key] = Fraction(value)
            elif len(key) == 2:
                quad[(key[0], key[1])] = Fraction(value)
            else:
                raise ValueError(f"cannot parse coefficient key {key!r}")
        return cls(quad, lin, spec)

    def flat(self) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for (a, b), c in sorted(self.quadratic.items()):
            out[f"{a},{b}"] = c
        for a, c in sorted(self.linear.items()):
            out[a] = c
        for name, c in sorted(self.special.items()):
            out[name] = c
        return out

    def lowered(self, spin: SpinLabel) -> tuple[dict[tuple[str, str], Fraction], dict[str, Fraction]]:
        """Expand special bilinears into plain quadratic + linear terms."""
        quad = dict(self.quadratic)
        lin = dict(self.linear)
        for name, c in self.special.items():
            if name == SPECIAL_MINUS_ZERO:
                quad[("-", "0")] = quad.get(("-", "0"), Fraction(0)) + c
                lin["-"] = lin.get("-", Fraction(0)) + c * spin.j
        return quad, lin


@dataclass(frozen=True)
class DifferentialForm:
    """H = -1/2 P4 d2/dxi2 + P3 d/dxi + P2, all with exact coefficients."""

    p4: RationalPoly
    p3: RationalPoly
    p2: RationalPoly

    def apply_to(self, p: RationalPoly) -> RationalPoly:
        d1 = p.derive()
        d2 = d1.derive()
        return self.p4 * d2 * Fraction(-1, 2) + self.p3 * d1 + self.p2 * p


@dataclass(frozen=True)
class Sl2Operator:
    coefficients: GeneratorCoefficients
    spin: SpinLabel
    matrix: Matrix
    form: DifferentialForm


def assemble(coeffs: GeneratorCoefficients, spin: SpinLabel) -> Sl2Operator:
    """Build the sector matrix and the differential form of the operator.

    The two views are cross-checked: applying the differential form to each
    basis monomial must reproduce the corresponding matrix column exactly.
    """
    quad, lin = coeffs.lowered(spin)

    p4 = RationalPoly.zero()
    p3 = RationalPoly.zero()
    p2 = RationalPoly.zero()
    matrix = mat_zero(spin.dim)

    gen_mats = {a: generator_matrix(a, spin).entries for a in GENERATORS}
    actions = {a: generator_action(a, spin) for a in GENERATORS}

    for (a, b), c in quad.items():
        fa, ga = actions[a]
        fb, gb = actions[b]
        # T^a T^b = fa*fb d2 + (fa*fb' + fa*gb + ga*fb) d + (fa*gb' + ga*gb)
        p4 = p4 + fa * fb * Fraction(-2) * c
        p3 = p3 + (fa * fb.derive() + fa * gb + ga * fb) * c
        p2 = p2 + (fa * gb.derive() + ga * gb) * c
        matrix = mat_add(matrix, mat_scale(mat_mul(gen_mats[a], gen_mats[b]), c))
    for a, c in lin.items():
        fa, ga = actions[a]
        p3 = p3 + fa * c
        p2 = p2 + ga * c
        matrix = mat_add(matrix, mat_scale(gen_mats[a], c))

    if p4.degree() > 4 or p3.degree() > 3 or p2.degree() > 2:
        raise QeslabError("generator expansion exceeded (P4, P3, P2) degree bounds")

    form = DifferentialForm(p4, p3, p2)
    for m in range(spin.dim):
        image = form.apply_to(RationalPoly.monomial(m))
        if image.degree() > spin.twice_j:
            raise QeslabError("assembled operator leaves the degree-2j sector")
        column = tuple(matrix[i][m] for i in range(spin.dim))
        if tuple(image.coefficient(i) for i in range(spin.dim)) != column:
            raise QeslabError("matrix and differential form disagree")
    return Sl2Operator(coeffs, spin, matrix, form)


# ---------------------------------------------------------------------------
# Coordinate map and quasi-gauge
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoordinateMap:
    """x = scale * xi**exponent, from a monomial P4 = coefficient * xi**degree.

    ``scale`` defaults to the exact signed value (2/(2-n)) / sqrt(p), the one
    for which x equals the antiderivative of P4**(-1/2) and the kinetic term
    stays -1/2 d2/dx2.  Callers may override it (unit scale gives the bare
    x = xi**((2-n)/2) convention) at the price of rescaling the potential.
    """

    degree: int
    coefficient: Fraction
    exponent: Fraction
    scale: Scalar

    def xi_in_x(self) -> tuple[Scalar, Fraction]:
        """Inverse map xi = c' * x**q' with c' = scale**(-1/q), q' = 1/q."""
        q_inv = Fraction(1) / self.exponent
        return scalar_pow(self.scale, -q_inv), q_inv

    def substitute_xi(self, p: PowerSum | RationalPoly) -> PowerSum:
        """Rewrite a sum in xi as a sum in x through the inverse map."""
        if isinstance(p, RationalPoly):
            p = p.to_powersum()
        c_prime, q_prime = self.xi_in_x()
        return p.substitute(c_prime, q_prime)


def coordinate_map(form: DifferentialForm, scale: Scalar | None = None) -> CoordinateMap:
    """Recover x from P4; valid only when P4 is one monomial of degree 0,1,3,4."""
    terms = form.p4.items()
    if not terms:
        raise NonMonomial("P4 vanishes; the operator has no kinetic term")
    if len(terms) > 1:
        raise NonMonomial(f"P4 has {len(terms)} terms; power-law coordinates need a monomial")
    n, p = terms[0]
    if n == 2:
        raise ExponentialCase("P4 ~ xi**2 gives xi = exp(x); excluded from the power-law duality")
    q = Fraction(2 - n, 2)
    if scale is None:
        if p <= 0:
            raise BranchAmbiguity(
                f"P4 leading coefficient {p} is not positive; pass an explicit scale/branch"
            )
        scale = Fraction(2, 2 - n) * scalar_pow(p, Fraction(-1, 2))
    return CoordinateMap(degree=n, coefficient=p, exponent=q, scale=scale)


@dataclass(frozen=True)
class GaugeData:
    """Quasi-gauge A, its antiderivative, and the physical potential.

    ``a_integral`` holds the power-law part of a(x) = integral(A dx); the
    coefficient of any x**-1 term of A lands in ``c_log`` so that
    a(x) = a_integral(x) + c_log * ln(x).  The identity
    V = deltaV + A**2/2 - A'/2 holds exactly by construction.
    """

    A: PowerSum
    a_integral: PowerSum
    c_log: Scalar
    deltaV: PowerSum
    V: PowerSum


def gauge_data(form: DifferentialForm, cmap: CoordinateMap) -> GaugeData:
    """Quasi-gauge and potential for a monomial-P4 operator.

    Uses the positive real branch of sqrt(P4); a non-positive monomial
    coefficient raises ``BranchAmbiguity`` (no real coordinate exists).
    """
    p = cmap.coefficient
    n = cmap.degree
    if p <= 0:
        raise BranchAmbiguity(f"P4 coefficient {p} is not positive; no real sqrt branch")
    inv_sqrt_p = scalar_pow(p, Fraction(-1, 2))

    numerator = form.p4.derive() * Fraction(1, 4) + form.p3
    # divide by sqrt(P4) = sqrt(p) * xi**(n/2): shift exponents, scale coeffs
    a_xi = numerator.to_powersum().shift_exponents(Fraction(-n, 2)).scale(inv_sqrt_p)
    A = cmap.substitute_xi(a_xi)
    deltaV = cmap.substitute_xi(form.p2)
    half = Fraction(1, 2)
    V = deltaV + (A * A).scale(half) - A.derive().scale(half)
    a_integral, c_log = A.integrate()
    return GaugeData(A=A, a_integral=a_integral, c_log=c_log, deltaV=deltaV, V=V)


def gauge_identity_residual(gauge: GaugeData) -> PowerSum:
    """V - deltaV - A**2/2 + A'/2; empty for every well-formed GaugeData."""
    half = Fraction(1, 2)
    return gauge.V - gauge.deltaV - (gauge.A * gauge.A).scale(half) + gauge.A.derive().scale(half)


# ---------------------------------------------------------------------------
# Algebraic-sector spectrum
# ---------------------------------------------------------------------------


RESIDUAL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class AlgebraicSpectrum:
    """Eigenvalues and ansatz coefficient vectors of the sector matrix.

    Eigenvectors are normalized so the highest-degree available coefficient
    equals 1 (the leading coefficient of the ansatz polynomial).
    """

    spin: SpinLabel
    eigenvalues: tuple
    eigenvectors: tuple
    residual_max: float


def algebraic_spectrum(op: Sl2Operator) -> AlgebraicSpectrum:
    """All eigenpairs of the (generally nonsymmetric) sector matrix."""
    dim = op.spin.dim
    h = np.array([[float(c) for c in row] for row in op.matrix], dtype=float)
    try:
        values, vectors = np.linalg.eig(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"dense eigensolver failed: {exc}") from exc

    order = np.lexsort((values.imag, values.real))
    values = values[order]
    vectors = vectors[:, order]

    h_norm = max(float(np.abs(h).sum(axis=1).max()), 1e-300)
    residual = float(max(np.abs(h @ vectors[:, i] - values[i] * vectors[:, i]).max() for i in range(dim)))
    if residual > RESIDUAL_TOLERANCE * max(h_norm, 1.0):
        raise ConvergenceFailure(f"eigen residual {residual:.3e} exceeds tolerance for |H|={h_norm:.3e}")

    normalized = []
    for i in range(dim):
        v = vectors[:, i]
        vmax = np.abs(v).max()
        lead = max(a for a in range(dim) if np.abs(v[a]) > 1e-9 * vmax)
        normalized.append(tuple(v / v[lead]))

    if np.abs(values.imag).max() <= 1e-12 * max(h_norm, 1.0):
        values = values.real
        normalized = [tuple(c.real for c in vec) for vec in normalized]

    return AlgebraicSpectrum(
        spin=op.spin,
        eigenvalues=tuple(values.tolist()),
        eigenvectors=tuple(normalized),
        residual_max=residual,
    )


def reconstruct_wavefunction(
    vec: Sequence[float],
    cmap: CoordinateMap,
    gauge: GaugeData,
    sample_points,
) -> np.ndarray:
    """psi(x) = pbar(xi(x)) * x**(-c_log) * exp(-a_integral(x)) at the samples."""
    x = np.asarray(sample_points, dtype=float)
    c_prime, q_prime = cmap.xi_in_x()
    fractional = q_prime.denominator != 1 or (
        not isinstance(gauge.c_log, Fraction) or Fraction(gauge.c_log).denominator != 1
    )
    if fractional and np.any(x <= 0):
        raise DomainError("sample points must be positive for fractional powers")
    xi = float(c_prime) * x ** float(q_prime)
    pbar = np.zeros_like(x)
    for degree, coeff in enumerate(vec):
        pbar = pbar + float(coeff) * xi**degree
    return pbar * x ** (-float(gauge.c_log)) * np.exp(-gauge.a_integral.evaluate(x))


# ---------------------------------------------------------------------------
# JSON shapes (documented external interface)
# ---------------------------------------------------------------------------


def operator_to_json(op: Sl2Operator) -> dict:
    return {
        "twice_j": op.spin.twice_j,
        "coefficients": {k: format_rational(v) for k, v in op.coefficients.flat().items()},
        "matrix": [[format_rational(c) for c in row] for row in op.matrix],
        "p4": poly_to_json(op.form.p4),
        "p3": poly_to_json(op.form.p3),
        "p2": poly_to_json(op.form.p2),
    }


def operator_from_json(data: Mapping) -> Sl2Operator:
    spin = SpinLabel(int(data["twice_j"]))
    coeffs = GeneratorCoefficients.from_flat(
        {k: parse_rational(v) for k, v in data["coefficients"].items()}
    )
    op = assemble(coeffs, spin)
    expected = DifferentialForm(
        poly_from_json(data["p4"]), poly_from_json(data["p3"]), poly_from_json(data["p2"])
    )
    if expected != op.form:
        raise ValueError("serialized differential form is inconsistent with coefficients")
    return op


def gauge_to_json(gauge: GaugeData) -> dict:
    return {
        "A": powersum_to_json(gauge.A),
        "a_integral": powersum_to_json(gauge.a_integral),
        "c_log": format_scalar(gauge.c_log),
        "deltaV": powersum_to_json(gauge.deltaV),
        "V": powersum_to_json(gauge.V),
    }


def gauge_from_json(data: Mapping) -> GaugeData:
    c_log: Scalar
    try:
        c_log = Fraction(data["c_log"])
    except ValueError:
        from mpmath import mpf

        c_log = mpf(data["c_log"])
    return GaugeData(
        A=powersum_from_json(data["A"]),
        a_integral=powersum_from_json(data["a_integral"]),
        c_log=c_log,
        deltaV=powersum_from_json(data["deltaV"]),
        V=powersum_from_json(data["V"]),
    )


def _number_to_json(value) -> object:
    if isinstance(value, complex):
        return {"re": format_real_17(value.real), "im": format_real_17(value.imag)}
    return format_real_17(value)


def _number_from_json(value) -> float | complex:
    if isinstance(value, dict):
        return complex(float(value["re"]), float(value["im"]))
    return float(value)


def spectrum_to_json(spec: AlgebraicSpectrum) -> dict:
    return {
        "twice_j": spec.spin.twice_j,
        "eigenvalues": [_number_to_json(v) for v in spec.eigenvalues],
        "eigenvectors": [[_number_to_json(c) for c in vec] for vec in spec.eigenvectors],
        "residual_max": format_real_17(spec.residual_max),
    }


def spectrum_from_json(data: Mapping) -> AlgebraicSpectrum:
    return AlgebraicSpectrum(
        spin=SpinLabel(int(data["twice_j"])),
        eigenvalues=tuple(_number_from_json(v) for v in data["eigenvalues"]),
        eigenvectors=tuple(tuple(_number_from_json(c) for c in vec) for vec in data["eigenvectors"]),
        residual_max=float(data["residual_max"]),
    )
