"""Command handlers shared by the HTTP service and the CLI."""

from __future__ import annotations

from fractions import Fraction

from ..algebra import format_rational, format_real_17, parse_rational
from ..duality import (
    Admissibility,
    ExponentPair,
    RadialParameters,
    dual_exponent,
    dual_parameters,
    enumerate_integer_duals,
    operator_proportionality_check,
    sl2_admissible,
    speculative_annotation,
)
from ..matching import CROSSCHECK_KINDS, paper_claim_crosscheck
from ..presets import get_preset
from ..qes import GeneratorCoefficients, algebraic_spectrum, assemble, operator_to_json
from ..radial import RadialGrid, RadialProblem, make_problem, solve_radial, verify_duality
from ..sl2rep import SpinLabel
from . import schemas


def run_classify(req: schemas.ClassifyRequest) -> schemas.ClassifyResponse:
    if req.range_min > req.range_max:
        raise ValueError("range_min must not exceed range_max")
    integer_pairs = {int(p.alpha): p.alpha_bar for p in enumerate_integer_duals()}
    rows = []
    for alpha in range(req.range_min, req.range_max + 1):
        if alpha == -2:
            rows.append(
                schemas.ClassifyRow(
                    alpha=alpha,
                    alpha_bar="singular",
                    integer_dual=False,
                    admissible=sl2_admissible(Fraction(alpha)).admissible,
                    reason="no dual partner",
                )
            )
            continue
        bar = dual_exponent(Fraction(alpha))
        adm = sl2_admissible(Fraction(alpha))
        rows.append(
            schemas.ClassifyRow(
                alpha=alpha,
                alpha_bar=format_rational(bar),
                integer_dual=alpha in integer_pairs,
                admissible=adm.admissible,
                reason=adm.reason,
                annotation=speculative_annotation(Fraction(alpha)),
            )
        )
    admissible_duals = sorted(a for a in integer_pairs if sl2_admissible(Fraction(a)).admissible)
    return schemas.ClassifyResponse(
        rows=rows,
        integer_duals=sorted(integer_pairs),
        admissible_duals=admissible_duals,
    )


def _coefficients_from_request(req: schemas.SpectrumRequest) -> tuple[SpinLabel, GeneratorCoefficients]:
    flat: dict[str, Fraction] = {}
    twice_j = req.twice_j
    if req.preset is not None:
        preset = get_preset(req.preset)
        flat.update(preset.coefficients)
        if twice_j is None:
            twice_j = preset.twice_j
    if req.coefficients:
        for key, value in req.coefficients.items():
            flat[key] = parse_rational(value)
    if twice_j is None:
        raise ValueError("twice_j is required when no preset is given")
    if not flat:
        raise ValueError("no coefficients given; pass a preset or explicit coefficients")
    return SpinLabel(twice_j), GeneratorCoefficients.from_flat(flat)


def _number_model(value):
    if isinstance(value, complex):
        return schemas.ComplexNumber(re=format_real_17(value.real), im=format_real_17(value.imag))
    return format_real_17(value)


def run_spectrum(req: schemas.SpectrumRequest) -> schemas.SpectrumResponse:
    spin, coeffs = _coefficients_from_request(req)
    op = assemble(coeffs, spin)
    spec = algebraic_spectrum(op)
    return schemas.SpectrumResponse(
        twice_j=spin.twice_j,
        eigenvalues=[_number_model(v) for v in spec.eigenvalues],
        eigenvectors=[[_number_model(c) for c in vec] for vec in spec.eigenvectors],
        residual_max=format_real_17(spec.residual_max),
        operator=schemas.OperatorModel(**operator_to_json(op)),
    )


def run_dualize(req: schemas.DualizeRequest) -> schemas.DualizeResponse:
    alpha = parse_rational(req.alpha)
    bar = dual_exponent(alpha)
    adm: Admissibility = sl2_admissible(alpha)
    integer_dual = alpha.denominator == 1 and bar.denominator == 1
    mapped = None
    if req.lam is not None or req.energy is not None or req.l is not None:
        if req.lam is None or req.energy is None:
            raise ValueError("parameter transport needs both lambda and energy")
        params = RadialParameters(
            lam=parse_rational(req.lam),
            l=parse_rational(req.l if req.l is not None else "0"),
            energy=parse_rational(req.energy),
        )
        out = dual_parameters(params, ExponentPair(alpha, bar), req.direction)
        mapped = schemas.MappedParameters(
            lam=format_rational(Fraction(out.lam)),
            l=format_rational(Fraction(out.l)),
            energy=format_rational(Fraction(out.energy)),
        )
    return schemas.DualizeResponse(
        alpha=format_rational(alpha),
        alpha_bar=format_rational(bar),
        integer_dual=integer_dual,
        admissible=adm.admissible,
        reason=adm.reason,
        annotation=speculative_annotation(alpha),
        mapped=mapped,
    )


def run_solve(req: schemas.SolveRequest) -> schemas.SolveResponse:
    problem = make_problem(
        alpha=parse_rational(req.alpha),
        lam=req.lam,
        l=parse_rational(req.l),
        r_min=req.r_min,
        r_max=req.r_max,
        n_points=req.points,
    )
    result = solve_radial(problem, req.levels)
    return schemas.SolveResponse(
        alpha=format_rational(problem.alpha),
        lam=format_real_17(problem.lam),
        l=format_rational(problem.l),
        grid={
            "r_min": result.grid_used.r_min,
            "r_max": result.grid_used.r_max,
            "points": result.grid_used.n_points,
        },
        levels=[
            schemas.LevelModel(level=i, energy=format_real_17(e), error=format_real_17(err))
            for i, (e, err) in enumerate(zip(result.eigenvalues, result.error_estimates))
        ],
    )


def run_verify(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
    problem = RadialProblem(
        alpha=Fraction(-1),
        lam=req.coulomb_lambda,
        l=parse_rational(req.l),
        grid=RadialGrid(req.r_min, req.r_max, req.points),
    )
    report = verify_duality(problem, req.levels, tolerance=req.tolerance)
    return schemas.VerifyResponse(
        tolerance=report.tolerance,
        levels=[
            schemas.VerifyLevelModel(
                level=c.level,
                coulomb_energy=format_real_17(c.coulomb_energy),
                coulomb_error=format_real_17(c.coulomb_error),
                lambda_bar=format_real_17(c.lam_bar),
                l_bar=format_rational(c.l_bar),
                target=format_real_17(c.target),
                best_match=format_real_17(c.best_match),
                match_index=c.match_index,
                residual=format_real_17(c.residual),
                within_tolerance=c.within_tolerance,
            )
            for c in report.levels
        ],
        all_within=report.all_within,
    )


def run_crosscheck(req: schemas.CrosscheckRequest) -> schemas.CrosscheckResponse:
    kinds = req.which if req.which else list(CROSSCHECK_KINDS)
    claims = []
    for kind in kinds:
        report = paper_claim_crosscheck(kind)
        claims.extend(
            schemas.ClaimModel(
                claim=c.claim, printed=c.printed, computed=c.computed, agree=c.agree, detail=c.detail
            )
            for c in report.comparisons
        )
    proportionality = None
    if req.proportionality:
        prop = operator_proportionality_check(Fraction(-1))
        proportionality = schemas.ProportionalityModel(
            alpha=str(prop.alpha),
            alpha_bar=str(prop.alpha_bar),
            residual=prop.residual,
            truncation_estimate=prop.truncation_estimate,
            grid=prop.grid,
        )
    return schemas.CrosscheckResponse(
        claims=claims,
        any_disagreement=any(not c.agree for c in claims),
        proportionality=proportionality,
    )
