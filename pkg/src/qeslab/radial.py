"""Numerical radial Schrödinger eigensolver (hbar = m = 1).

Solves -1/2 u'' + [lam * r**alpha + l(l+1)/(2 r**2) - E] u = 0 with Dirichlet
walls at r_min and r_max on a uniform grid, via the standard 3-point second
difference.  The symmetric tridiagonal eigenproblem is extracted by LAPACK
bisection for the lowest k levels only; each level is refined by solving at N
and 2N interior points and Richardson-extrapolating the second-order scheme,
with |E_N - E_2N| / 3 as the per-level error estimate.

Sign convention: lam < 0 is an attractive power-law coupling (V = lam / r for
alpha = -1); lam = 0 gives box states.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .duality import centrifugal_dual_l
from .errors import QeslabError

DEFAULT_R_MIN = 1e-4
DEFAULT_R_MAX_ATTRACTIVE = 60.0  # alpha < 0
DEFAULT_R_MAX_CONFINED = 12.0  # alpha > 0
DEFAULT_POINTS = 4000
MAX_LEVELS = 20


class NotConfining(QeslabError):
    """Parameter signs admit no bound state (inverted potential)."""


class GridError(QeslabError):
    """Invalid radial grid."""


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    n_points: int  # interior points; matrix dimension

    def __post_init__(self) -> None:
        if self.r_min <= 0:
            raise GridError(f"r_min must be positive, got {self.r_min}")
        if self.r_max <= self.r_min:
            raise GridError("r_max must exceed r_min")
        if self.n_points < 100:
            raise GridError("need at least 100 grid points")


@dataclass(frozen=True)
class RadialProblem:
    alpha: Fraction
    lam: float
    l: Fraction
    grid: RadialGrid

    def __post_init__(self) -> None:
        alpha = Fraction(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "l", Fraction(self.l))
        if (alpha > 0 and self.lam < 0) or (alpha < 0 and self.lam > 0):
            raise NotConfining(
                f"lam={self.lam} with alpha={alpha} does not confine bound states"
            )


def make_problem(
    alpha,
    lam: float,
    l=Fraction(0),
    r_min: float = DEFAULT_R_MIN,
    r_max: float | None = None,
    n_points: int = DEFAULT_POINTS,
) -> RadialProblem:
    """Problem with documented defaults: r_max 60 for alpha < 0, else 12."""
    alpha = Fraction(alpha)
    if r_max is None:
        r_max = DEFAULT_R_MAX_ATTRACTIVE if alpha < 0 else DEFAULT_R_MAX_CONFINED
    return RadialProblem(alpha, float(lam), Fraction(l), RadialGrid(r_min, float(r_max), n_points))


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: tuple[float, ...]  # Richardson-extrapolated, ascending
    error_estimates: tuple[float, ...]
    grid_used: RadialGrid
    problem: RadialProblem


def _lowest_eigenvalues(problem: RadialProblem, n_points: int, k: int) -> np.ndarray:
    g = problem.grid
    h = (g.r_max - g.r_min) / (n_points + 1)
    r = g.r_min + h * np.arange(1, n_points + 1)
    v = problem.lam * r ** float(problem.alpha) + float(
        problem.l * (problem.l + 1)
    ) / (2.0 * r**2)
    diag = 1.0 / h**2 + v
    off = np.full(n_points - 1, -0.5 / h**2)
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, k - 1))


def solve_radial(problem: RadialProblem, k_lowest: int) -> SpectrumResult:
    """Lowest k eigenvalues with Richardson refinement and error estimates."""
    if not 1 <= k_lowest <= MAX_LEVELS:
        raise ValueError(f"k_lowest must be in 1..{MAX_LEVELS}")
    coarse = _lowest_eigenvalues(problem, problem.grid.n_points, k_lowest)
    fine = _lowest_eigenvalues(problem, 2 * problem.grid.n_points, k_lowest)
    refined = (4.0 * fine - coarse) / 3.0
    estimates = np.abs(coarse - fine) / 3.0
    if not np.all(np.diff(refined) > 0):
        raise QeslabError("eigenvalues not strictly increasing; grid unresolved")
    return SpectrumResult(
        eigenvalues=tuple(refined.tolist()),
        error_estimates=tuple(estimates.tolist()),
        grid_used=problem.grid,
        problem=problem,
    )


# ---------------------------------------------------------------------------
# Duality verification against the independent solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelCheck:
    level: int
    coulomb_energy: float
    coulomb_error: float
    lam_bar: float
    l_bar: Fraction
    target: float  # E_bar = -4*lam, expected in the partner spectrum
    best_match: float
    match_index: int
    residual: float
    within_tolerance: bool


@dataclass(frozen=True)
class DualityVerification:
    levels: tuple[LevelCheck, ...]
    tolerance: float

    @property
    def all_within(self) -> bool:
        return all(c.within_tolerance for c in self.levels)


def verify_duality(
    coulomb: RadialProblem,
    levels: int,
    tolerance: float = 5e-3,
    partner_grid: RadialGrid | None = None,
    partner_levels: int = 12,
) -> DualityVerification:
    """Map each Coulomb level to its oscillator partner and check E_bar = -4*lam.

    For every bound level E_n of the alpha = -1 problem, the partner problem
    has lam_bar = -4 E_n and l_bar = 2l + 1/2; its spectrum must contain
    -4*lam within the combined numerical tolerance.
    """
    if coulomb.alpha != Fraction(-1) or coulomb.lam >= 0:
        raise ValueError("verify_duality expects an attractive alpha = -1 problem")
    if levels == 0:
        return DualityVerification(levels=(), tolerance=tolerance)
    solved = solve_radial(coulomb, levels)
    target = -4.0 * coulomb.lam
    l_bar = centrifugal_dual_l(coulomb.l, Fraction(2))
    checks = []
    for n, (energy, err) in enumerate(zip(solved.eigenvalues, solved.error_estimates), start=1):
        if energy >= 0:
            break  # continuum-like box level; duality applies to bound states
        lam_bar = -4.0 * energy
        grid = partner_grid or RadialGrid(DEFAULT_R_MIN, DEFAULT_R_MAX_CONFINED, DEFAULT_POINTS)
        partner = RadialProblem(Fraction(2), lam_bar, l_bar, grid)
        partner_spec = solve_radial(partner, partner_levels)
        residuals = [abs(e - target) for e in partner_spec.eigenvalues]
        idx = int(np.argmin(residuals))
        checks.append(
            LevelCheck(
                level=n,
                coulomb_energy=energy,
                coulomb_error=err,
                lam_bar=lam_bar,
                l_bar=l_bar,
                target=target,
                best_match=partner_spec.eigenvalues[idx],
                match_index=idx,
                residual=residuals[idx],
                within_tolerance=residuals[idx] <= tolerance,
            )
        )
    return DualityVerification(levels=tuple(checks), tolerance=tolerance)


def coulomb_couplings_from_oscillator(
    e_target: float,
    l: Fraction,
    count: int,
    grid: RadialGrid | None = None,
) -> list[float]:
    """Coulomb couplings whose spectra contain e_target, via the partner problem.

    Sets lam_bar = -4 * e_target, solves the oscillator with l_bar = 2l + 1/2,
    and reads lam_k = -E_bar_k / 4 off its lowest levels.
    """
    if e_target >= 0:
        raise ValueError("e_target must be negative (bound Coulomb level)")
    if count < 1:
        return []
    lam_bar = -4.0 * float(e_target)
    l_bar = centrifugal_dual_l(Fraction(l), Fraction(2))
    g = grid or RadialGrid(DEFAULT_R_MIN, DEFAULT_R_MAX_CONFINED, DEFAULT_POINTS)
    partner = RadialProblem(Fraction(2), lam_bar, l_bar, g)
    spec = solve_radial(partner, count)
    return [-e / 4.0 for e in spec.eigenvalues]


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def spectrum_to_csv(result: SpectrumResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["level", "E", "error"])
    for i, (e, err) in enumerate(zip(result.eigenvalues, result.error_estimates)):
        writer.writerow([i, repr(e), repr(err)])
    return buf.getvalue()


def spectrum_to_json_dict(result: SpectrumResult) -> dict:
    return {
        "alpha": str(result.problem.alpha),
        "lambda": result.problem.lam,
        "l": str(result.problem.l),
        "grid": {
            "r_min": result.grid_used.r_min,
            "r_max": result.grid_used.r_max,
            "points": result.grid_used.n_points,
        },
        "levels": [
            {"level": i, "energy": e, "error": err}
            for i, (e, err) in enumerate(zip(result.eigenvalues, result.error_estimates))
        ],
    }
