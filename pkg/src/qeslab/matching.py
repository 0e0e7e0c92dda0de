"""Fit a generator family to a target potential, and audit printed formulas.

``match_couplings`` equates the potential V(x) produced by a coefficient
family (some entries unknown) with a target power sum, exponent by exponent.
The coefficient of each exponent is an exact polynomial in the unknowns once
the kinetic-monomial unknown is reparametrized by its square root branch
variable, so the system is recovered by exact tensor interpolation and solved
by substitution plus single-variable root isolation.  Unmatchable target
exponents yield an infeasibility certificate naming the witness exponent; a
certificate is a result, not an error.  Constant offsets of V are absorbed
into an energy shift, and a kinetic-slot unknown left free by the equations
is pinned to the unit-coordinate normalization p = 1/q**2.

``paper_claim_crosscheck`` evaluates externally printed closed-form constants
and polynomial lists for the two operator families against what this package
computes, and reports structured agree/disagree entries without reconciling
them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from mpmath import mp, mpf, sqrt as mp_sqrt, polyroots

from .algebra import (
    PowerSum,
    RationalPoly,
    Scalar,
    format_scalar,
    mpf_to_fraction,
    rational_root,
    to_mpf,
)
from .errors import QeslabError
from .qes import GeneratorCoefficients, GaugeData, assemble, coordinate_map, gauge_data
from .sl2rep import SpinLabel

BRANCH_NODES = [Fraction(g) for g in (1, 2, 3, 4, 5, 6, 7)]
LINEAR_NODES = [Fraction(v) for v in (1, -1, 2, -2, 3, -3, 4)]


class UnderdeterminedSystem(QeslabError):
    """Coupled multi-unknown equations beyond the substitution solver."""


@dataclass(frozen=True)
class MatchSolution:
    values: dict[str, Scalar]
    pinned: tuple[str, ...]  # unknowns fixed by the unit-coordinate normalization
    residuals: dict[Fraction, Scalar]  # computed - target, per exponent
    energy_shift: Scalar  # constant of V minus constant of target


@dataclass(frozen=True)
class MatchResult:
    feasible: bool
    target: PowerSum
    solutions: tuple[MatchSolution, ...] = ()
    unremovable: dict = field(default_factory=dict)  # exponent -> fixed residual
    witness_exponent: Fraction | None = None
    witness_computed: Scalar | None = None
    witness_target: Scalar | None = None
    detail: str = ""


# -- structure analysis -------------------------------------------------------


def _unit_contributions(keys: Sequence[str], spin: SpinLabel) -> dict[str, RationalPoly]:
    """P4 contribution of each coefficient key at unit value."""
    out = {}
    for key in keys:
        coeffs = GeneratorCoefficients.from_flat({key: Fraction(1)})
        out[key] = assemble(coeffs, spin).form.p4
    return out


def _compute_potential(family_values: Mapping[str, Fraction], spin: SpinLabel) -> tuple[PowerSum, GaugeData]:
    coeffs = GeneratorCoefficients.from_flat(dict(family_values))
    op = assemble(coeffs, spin)
    cmap = coordinate_map(op.form)
    gauge = gauge_data(op.form, cmap)
    return gauge.V, gauge


# -- exact tensor interpolation ----------------------------------------------

Mono = tuple[int, ...]
MultiPoly = dict[Mono, Fraction]


def _lagrange_basis(nodes: Sequence[Fraction]) -> list[RationalPoly]:
    basis = []
    for i, ti in enumerate(nodes):
        poly = RationalPoly.one()
        for j, tj in enumerate(nodes):
            if j == i:
                continue
            poly = poly * RationalPoly({1: Fraction(1), 0: -tj}) * (Fraction(1) / (ti - tj))
        basis.append(poly)
    return basis


def _interpolate(
    node_lists: Sequence[Sequence[Fraction]],
    values: Mapping[tuple[int, ...], Fraction],
) -> MultiPoly:
    """Exact polynomial through a full tensor grid of samples."""
    n_vars = len(node_lists)

    def rec(level: int, prefix: tuple[int, ...]) -> MultiPoly:
        if level == n_vars:
            v = values.get(prefix, Fraction(0))
            return {(): v} if v != 0 else {}
        basis = _lagrange_basis(node_lists[level])
        out: MultiPoly = {}
        for i in range(len(node_lists[level])):
            inner = rec(level + 1, prefix + (i,))
            if not inner:
                continue
            for deg, c_t in basis[i].coeffs.items():
                for mono, c in inner.items():
                    key = (deg,) + mono
                    out[key] = out.get(key, Fraction(0)) + c_t * c
        return {k: v for k, v in out.items() if v != 0}

    return rec(0, ())


def _mp_eval(poly: MultiPoly, point: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for mono, c in poly.items():
        term = c
        for var, deg in enumerate(mono):
            if deg:
                term *= point[var] ** deg
        total += term
    return total


def _mp_substitute(poly: MultiPoly, var: int, value: Fraction) -> MultiPoly:
    out: MultiPoly = {}
    for mono, c in poly.items():
        c_new = c * value ** mono[var]
        key = mono[:var] + (0,) + mono[var + 1 :]
        out[key] = out.get(key, Fraction(0)) + c_new
    return {k: v for k, v in out.items() if v != 0}


def _mp_vars(poly: MultiPoly) -> set[int]:
    used = set()
    for mono in poly:
        for var, deg in enumerate(mono):
            if deg:
                used.add(var)
    return used


def _mp_to_univariate(poly: MultiPoly, var: int) -> RationalPoly:
    return RationalPoly({mono[var]: c for mono, c in poly.items()})


# -- real root isolation -------------------------------------------------------


def _real_roots(poly: RationalPoly, positive_only: bool = False) -> list[Scalar]:
    """Real roots of an exact univariate polynomial.

    Rational roots come back exact; irrational ones as multiprecision reals.
    """
    if poly.is_zero():
        raise ValueError("zero polynomial has every root")
    coeffs = dict(poly.coeffs)
    roots: list[Scalar] = []
    min_deg = min(coeffs)
    if min_deg > 0:
        if not positive_only:
            roots.append(Fraction(0))
        coeffs = {d - min_deg: c for d, c in coeffs.items()}
    degree = max(coeffs)
    if degree == 0:
        pass
    elif degree == 1:
        roots.append(-coeffs.get(0, Fraction(0)) / coeffs[1])
    elif degree == 2:
        a, b, c = coeffs.get(2, Fraction(0)), coeffs.get(1, Fraction(0)), coeffs.get(0, Fraction(0))
        disc = b * b - 4 * a * c
        if disc >= 0:
            root = rational_root(disc, 2)
            if root is not None:
                roots.extend([(-b + root) / (2 * a), (-b - root) / (2 * a)])
            else:
                sq = mp_sqrt(mpf(disc.numerator) / disc.denominator)
                two_a = mpf(a.numerator) / a.denominator * 2
                b_mp = mpf(b.numerator) / b.denominator
                roots.extend([(-b_mp + sq) / two_a, (-b_mp - sq) / two_a])
    else:
        ordered = []
        for d in range(degree, -1, -1):
            c = coeffs.get(d, Fraction(0))
            ordered.append(mpf(c.numerator) / c.denominator)
        with mp.workprec(mp.prec + 40):
            found = polyroots(ordered, maxsteps=200, extraprec=80)
        for r in found:
            if abs(r.imag) > mpf(10) ** (-20) * (1 + abs(r.real)):
                continue
            real = r.real
            cand = Fraction(float(real)).limit_denominator(10**9)
            if poly(cand) == 0:
                roots.append(cand)
            else:
                roots.append(real)
    # dedupe numerically identical roots
    unique: list[Scalar] = []
    for r in roots:
        if not any(abs(mpf(float(r)) - mpf(float(u))) < mpf(10) ** -18 * (1 + abs(mpf(float(u)))) for u in unique):
            unique.append(r)
    if positive_only:
        unique = [r for r in unique if r > 0]
    return unique


# -- the matcher ---------------------------------------------------------------


def match_couplings(
    target: PowerSum,
    family: Mapping[str, Fraction | None],
    spin: SpinLabel,
) -> MatchResult:
    """Solve for unknown family coefficients so that V(x) matches the target.

    ``family`` maps flat coefficient keys to fixed values or None for the
    (at most three) unknowns.  The target must have exact rational exponents;
    its constant term is matched up to an energy shift.
    """
    unknowns = sorted(k for k, v in family.items() if v is None)
    if len(unknowns) > 3:
        raise ValueError("at most 3 unknown coefficients are supported")
    fixed = {k: Fraction(v) for k, v in family.items() if v is not None}
    if not target.is_exact():
        raise ValueError("target coefficients must be exact rationals")

    p4_units = _unit_contributions(list(family), spin)
    kinetic_unknowns = [k for k in unknowns if not p4_units[k].is_zero()]
    if len(kinetic_unknowns) > 1:
        raise UnderdeterminedSystem("more than one unknown feeds the kinetic monomial")

    degrees = set()
    for key in family:
        if not p4_units[key].is_zero():
            degrees.update(d for d, _ in p4_units[key].items())
    if len(degrees) != 1:
        raise QeslabError("family kinetic term is not a single monomial")
    (p4_degree,) = degrees
    base = sum(
        (fixed[k] * p4_units[k].coefficient(p4_degree) for k in fixed if not p4_units[k].is_zero()),
        Fraction(0),
    )

    # sample nodes: branch variable g (p4 coefficient = g**2) for the kinetic
    # unknown, raw values for the rest
    node_lists: list[list[Fraction]] = []
    to_value = []  # node -> coefficient value, per unknown
    for key in unknowns:
        if key in kinetic_unknowns:
            mu = p4_units[key].coefficient(p4_degree)
            node_lists.append(list(BRANCH_NODES))
            to_value.append(lambda g, mu=mu: (g * g - base) / mu)
        else:
            node_lists.append(list(LINEAR_NODES))
            to_value.append(lambda v: v)

    # evaluate the pipeline on the sample grid (exact: sqrt(p) = g rational)
    samples: dict[tuple[int, ...], dict[Fraction, Fraction]] = {}
    exponent_union = set(target.exponents())
    grids = [range(len(nodes)) for nodes in node_lists]
    for idx in itertools.product(*grids):
        values = dict(fixed)
        for pos, key in enumerate(unknowns):
            values[key] = to_value[pos](node_lists[pos][idx[pos]])
        v_sum, _ = _compute_potential(values, spin)
        if not v_sum.is_exact():
            raise QeslabError("sample evaluation left exact mode; cannot interpolate")
        samples[idx] = dict(v_sum.items())
        exponent_union.update(v_sum.exponents())
    exponent_union.discard(Fraction(0))

    polys: dict[Fraction, MultiPoly] = {}
    for e in sorted(exponent_union):
        values_e = {idx: coeffs.get(e, Fraction(0)) for idx, coeffs in samples.items()}
        polys[e] = _interpolate(node_lists, values_e)

    if unknowns:
        # verify the polynomial model at an off-grid point (degree-bound guard)
        check_nodes = tuple(Fraction(9 + i) for i in range(len(node_lists)))
        check_values = dict(fixed)
        for pos, key in enumerate(unknowns):
            check_values[key] = to_value[pos](check_nodes[pos])
        v_check, _ = _compute_potential(check_values, spin)
        if not set(v_check.exponents()) <= exponent_union | {Fraction(0)}:
            raise QeslabError("family produced new exponents off-grid; not polynomial")
        for e in sorted(exponent_union):
            if _mp_eval(polys[e], check_nodes) != v_check.coefficient(e):
                raise QeslabError(
                    f"coefficient of x**{e} is not polynomial in the unknowns; "
                    "reparametrize the family"
                )

    # classify equations
    target_exponents = {e for e in target.exponents() if e != 0}
    unremovable: dict[Fraction, Fraction] = {}
    system: list[tuple[Fraction, MultiPoly]] = []
    for e in sorted(exponent_union):
        eq = dict(polys[e])
        t = Fraction(target.coefficient(e)) if e in target_exponents else Fraction(0)
        zero_mono = (0,) * len(unknowns)
        eq[zero_mono] = eq.get(zero_mono, Fraction(0)) - t
        if eq[zero_mono] == 0:
            del eq[zero_mono]
        if not _mp_vars(eq):
            const = eq.get(zero_mono, Fraction(0))
            if const != 0:
                if e in target_exponents:
                    return MatchResult(
                        feasible=False,
                        target=target,
                        witness_exponent=e,
                        witness_computed=const + t,
                        witness_target=t,
                        detail=(
                            f"coefficient of x**{e} is fixed at {const + t} by the family "
                            f"but the target requires {t}"
                        ),
                    )
                unremovable[e] = const
        else:
            system.append((e, eq))

    positive_vars = {unknowns.index(k) for k in kinetic_unknowns}
    solved = _solve_system(system, len(unknowns), positive_vars)
    if isinstance(solved, Fraction):  # witness exponent of an unsolvable equation
        e = solved
        return MatchResult(
            feasible=False,
            target=target,
            witness_exponent=e,
            witness_target=Fraction(target.coefficient(e)),
            detail=f"no real coefficients satisfy the x**{e} equation",
        )

    solutions = []
    pin_value = None
    if kinetic_unknowns:
        # unit-coordinate normalization: p = 1/q**2 with q = (2 - n)/2
        q = Fraction(2 - p4_degree, 2)
        pin_value = Fraction(1) / (q * q)
    for assignment in solved:
        values: dict[str, Scalar] = {}
        exact_values: dict[str, Fraction] = {}
        pinned = []
        for pos, key in enumerate(unknowns):
            bound = assignment.get(pos)
            if bound is None:
                if key in kinetic_unknowns:
                    mu = p4_units[key].coefficient(p4_degree)
                    exact_values[key] = (pin_value - base) / mu
                else:
                    exact_values[key] = Fraction(1)
                values[key] = exact_values[key]
                pinned.append(key)
            else:
                bound_exact = mpf_to_fraction(bound) if isinstance(bound, mpf) else bound
                exact_values[key] = to_value[pos](bound_exact)
                values[key] = to_value[pos](bound)  # mpf stays mpf for display
        full = dict(fixed)
        full.update(exact_values)
        v_sum, _ = _compute_potential(full, spin)
        residuals = {}
        for e in sorted(set(v_sum.exponents()) | target_exponents):
            if e == 0:
                continue
            residuals[e] = v_sum.coefficient(e) - target.coefficient(e)
        shift = v_sum.constant_term() - target.constant_term()
        solutions.append(
            MatchSolution(
                values=values,
                pinned=tuple(pinned),
                residuals=residuals,
                energy_shift=shift,
            )
        )
    return MatchResult(
        feasible=True,
        target=target,
        solutions=tuple(solutions),
        unremovable=unremovable,
    )


def _solve_system(
    system: list[tuple[Fraction, MultiPoly]], n_vars: int, positive_vars: set[int] = frozenset()
) -> list[dict[int, Scalar]] | Fraction:
    """Substitution solver; returns assignments or the witness exponent.

    Variables in ``positive_vars`` are square-root branch parameters; only
    their positive roots are meaningful.
    """
    if not system:
        return [{}]

    def recurse(eqs: list[tuple[Fraction, MultiPoly]], bound: dict[int, Scalar]):
        eqs = sorted(eqs, key=lambda item: item[0])
        for e, eq in eqs:
            if not _mp_vars(eq):
                const = eq.get((0,) * n_vars, Fraction(0))
                if const != 0:
                    return e  # inconsistent branch
        pending = [(e, eq) for e, eq in eqs if _mp_vars(eq)]
        if not pending:
            return [dict(bound)]
        univariate = [(e, eq) for e, eq in pending if len(_mp_vars(eq)) == 1]
        if not univariate:
            raise UnderdeterminedSystem(
                "equations couple several unknowns; no univariate pivot available"
            )
        e, eq = univariate[0]
        (var,) = _mp_vars(eq)
        roots = _real_roots(_mp_to_univariate(eq, var), positive_only=var in positive_vars)
        if not roots:
            return e
        collected: list[dict[int, Scalar]] = []
        witness: Fraction | None = None
        for root in roots:
            root_exact = mpf_to_fraction(root) if isinstance(root, mpf) else root
            reduced = []
            for e2, eq2 in pending:
                if (e2, eq2) == (e, eq):
                    continue
                reduced.append((e2, _mp_substitute(eq2, var, root_exact)))
            outcome = recurse(reduced, {**bound, var: root})
            if isinstance(outcome, Fraction):
                witness = outcome if witness is None else witness
            else:
                collected.extend(outcome)
        if collected:
            return collected
        return witness if witness is not None else e

    return recurse(system, {})


# ---------------------------------------------------------------------------
# Crosschecks of externally printed formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClaimComparison:
    claim: str
    printed: str
    computed: str
    agree: bool
    detail: str = ""


@dataclass(frozen=True)
class CrosscheckReport:
    which: str
    comparisons: tuple[ClaimComparison, ...]

    @property
    def disagreements(self) -> tuple[ClaimComparison, ...]:
        return tuple(c for c in self.comparisons if not c.agree)


CROSSCHECK_KINDS = ("coulomb_constants", "oscillator_constants", "oscillator_p4")


def paper_claim_crosscheck(which: str) -> CrosscheckReport:
    """Compare printed closed forms for the two operator families with the
    values this package derives; disagreements are reported, never patched."""
    if which == "oscillator_p4":
        return _crosscheck_oscillator_p4()
    if which == "coulomb_constants":
        return _crosscheck_coulomb_constants()
    if which == "oscillator_constants":
        return _crosscheck_oscillator_constants()
    raise ValueError(f"unknown crosscheck {which!r}; options: {CROSSCHECK_KINDS}")


def _poly_str(p: RationalPoly) -> str:
    return str(p)


def _crosscheck_oscillator_p4() -> CrosscheckReport:
    spin = SpinLabel(2)  # j = 1, k = 1
    c_m0, c_p = Fraction(-2), Fraction(1)
    op = assemble(GeneratorCoefficients.from_flat({"-0": c_m0, "+": c_p}), spin)
    k = spin.k
    j = spin.j
    printed_p4 = RationalPoly({1: -4 * c_m0})
    printed_p3 = RationalPoly({2: -c_p, 0: -k * c_m0})
    printed_p2 = RationalPoly({1: 2 * j * c_p})
    comparisons = [
        ClaimComparison(
            claim="oscillator family P4",
            printed=_poly_str(printed_p4),
            computed=_poly_str(op.form.p4),
            agree=printed_p4 == op.form.p4,
            detail="printed coefficient is twice the assembled one",
        ),
        ClaimComparison(
            claim="oscillator family P3",
            printed=_poly_str(printed_p3),
            computed=_poly_str(op.form.p3),
            agree=printed_p3 == op.form.p3,
            detail="constant term differs: printed -k*C vs assembled +C",
        ),
        ClaimComparison(
            claim="oscillator family P2",
            printed=_poly_str(printed_p2),
            computed=_poly_str(op.form.p2),
            agree=printed_p2 == op.form.p2,
        ),
    ]
    return CrosscheckReport("oscillator_p4", tuple(comparisons))


def _crosscheck_coulomb_constants() -> CrosscheckReport:
    spin = SpinLabel(2)  # j = 1
    j, k = spin.j, spin.k
    lam = Fraction(1)
    c_pp, c_p = Fraction(-1, 2), Fraction(1)
    op = assemble(GeneratorCoefficients.from_flat({"+,+": c_pp, "+": c_p}), spin)

    printed_p4 = RationalPoly({4: -2 * c_pp})
    printed_p3 = RationalPoly({3: -2 * k * c_pp, 2: -c_p})
    printed_p2 = RationalPoly({2: 2 * j * k * c_pp, 1: 2 * j * c_p})
    comparisons = [
        ClaimComparison(
            claim="coulomb family P4",
            printed=_poly_str(printed_p4),
            computed=_poly_str(op.form.p4),
            agree=printed_p4 == op.form.p4,
        ),
        ClaimComparison(
            claim="coulomb family P3",
            printed=_poly_str(printed_p3),
            computed=_poly_str(op.form.p3),
            agree=printed_p3 == op.form.p3,
        ),
        ClaimComparison(
            claim="coulomb family P2",
            printed=_poly_str(printed_p2),
            computed=_poly_str(op.form.p2),
            agree=printed_p2 == op.form.p2,
        ),
    ]

    # printed C+ = -lam / (6 + 2j) pins the x**-1 coefficient; the matcher
    # finds that coefficient is identically zero for this family
    printed_cp = -lam / (6 + 2 * j)
    target = PowerSum({Fraction(-1): lam})
    result = match_couplings(target, {"+,+": Fraction(-1, 2), "+": None}, spin)
    computed = (
        f"infeasible, witness exponent {result.witness_exponent}"
        if not result.feasible
        else f"C+ = {format_scalar(result.solutions[0].values['+'])}"
    )
    comparisons.append(
        ClaimComparison(
            claim="coulomb C+ equation",
            printed=f"C+ = {format_scalar(printed_cp)} (from -lam/(6+2j), lam=1, j=1)",
            computed=computed,
            agree=False,
            detail="the family's potential has no x**-1 term for any coefficients",
        )
    )

    # printed quadratic -2C(4+k)**2 - sqrt(-2C)(4+k) = l(l+1)/2 at the
    # canonical C = -1/2, against the computed x**-2 coefficient
    l = Fraction(1)
    lhs = -2 * c_pp * (4 + k) ** 2 - (4 + k)  # sqrt(-2*(-1/2)) = 1
    target2 = PowerSum({Fraction(-1): lam, Fraction(-2): l * (l + 1) / 2})
    result2 = match_couplings(target2, {"+,+": None, "+": None}, spin)
    computed2 = (
        f"infeasible, witness exponent {result2.witness_exponent}"
        if not result2.feasible
        else "solvable"
    )
    comparisons.append(
        ClaimComparison(
            claim="coulomb C++ quadratic",
            printed=f"-2C(4+k)^2 - sqrt(-2C)(4+k) = {format_scalar(lhs)} claimed equal to l(l+1)/2 = {format_scalar(l*(l+1)/2)}",
            computed=computed2,
            agree=False,
            detail="the family's x**-2 coefficient is identically zero, so no C++ matches l != 0",
        )
    )
    return CrosscheckReport("coulomb_constants", tuple(comparisons))


def _crosscheck_oscillator_constants() -> CrosscheckReport:
    spin = SpinLabel(2)  # j = 1, k = 1
    k = spin.k
    lam_bar = Fraction(2)
    c_m0 = Fraction(-2)

    # printed: C+ * (1 - k + 3 / (2 sqrt(-C_{-0}))) = -lam_bar
    denom = to_mpf(1 - k) + mpf(3) / (2 * mp_sqrt(mpf(2)))
    printed_cp = -mpf(2) / denom

    target = PowerSum({Fraction(2): lam_bar})
    result = match_couplings(target, {"-0": c_m0, "+": None}, spin)
    if result.feasible:
        values = ", ".join(format_scalar(s.values["+"]) for s in result.solutions)
        computed = f"C+ in {{{values}}}"
        agree = any(
            abs(mpf(float(Fraction(s.values["+"]) if isinstance(s.values["+"], Fraction) else s.values["+"])) - printed_cp)
            < mpf(10) ** -12
            for s in result.solutions
        )
    else:
        computed = f"infeasible, witness exponent {result.witness_exponent}"
        agree = False
    comparisons = [
        ClaimComparison(
            claim="oscillator C+ equation",
            printed=f"C+ = {format_scalar(printed_cp)} (from C+(1-k+3/(2 sqrt(-C-0))) = -lam, lam=2)",
            computed=computed,
            agree=agree,
            detail=(
                "the raising-operator term makes A ~ x**3, so the family potential "
                "carries an x**6 term that no C+ removes"
            ),
        )
    ]

    # printed: -C_{-0}(4+k)^2/4 - sqrt(-C_{-0}(4+k))/2 = l(l+1)/2, against the
    # family's fixed x**-2 coefficient -1/8
    printed_lhs = to_mpf(-c_m0 * (4 + k) ** 2 / 4) - mp_sqrt(to_mpf(-c_m0 * (4 + k))) / 2
    _, gauge = _compute_potential({"-0": c_m0, "+": Fraction(1)}, spin)
    computed_centrifugal = gauge.V.coefficient(Fraction(-2))
    comparisons.append(
        ClaimComparison(
            claim="oscillator C-0 quadratic",
            printed=f"l(l+1)/2 = {format_scalar(printed_lhs)} at C-0 = -2, k = 1",
            computed=f"x**-2 coefficient of V is {format_scalar(computed_centrifugal)} for every C-0 < 0",
            agree=False,
            detail="the family cannot produce an adjustable centrifugal term",
        )
    )
    return CrosscheckReport("oscillator_constants", tuple(comparisons))
