"""Dual power-law potentials: exponent map, classification, parameter maps.

Two radial potentials lam * x**alpha and lam_bar * x**alpha_bar are dual when
(alpha + 2)(alpha_bar + 2) = 4; the substitution x = x_bar**(-alpha_bar/alpha)
carries one radial Hamiltonian into the other up to a power of x_bar.  Only
six integer exponents admit an integer dual, and only three of those are
also expressible in the SL(2) operator algebra: -1, 0 and 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import QeslabError


class SingularExponent(QeslabError):
    """alpha = -2 has no dual partner."""


class UnsupportedPair(QeslabError):
    """The angular-momentum map is only defined for the (-1, 2) pair."""


class GridTooCoarse(QeslabError):
    """Finite-difference truncation drowns the measured residual."""


def dual_exponent(alpha: Fraction) -> Fraction:
    """alpha_bar = -2*alpha / (alpha + 2), the exact dual exponent."""
    alpha = Fraction(alpha)
    if alpha == -2:
        raise SingularExponent("alpha = -2 has no finite dual exponent")
    return Fraction(-2) * alpha / (alpha + 2)


@dataclass(frozen=True)
class ExponentPair:
    alpha: Fraction
    alpha_bar: Fraction

    def __post_init__(self) -> None:
        alpha = Fraction(self.alpha)
        alpha_bar = Fraction(self.alpha_bar)
        if alpha == -2 or alpha_bar == -2:
            raise SingularExponent("alpha = -2 is excluded")
        if (alpha + 2) * (alpha_bar + 2) != 4:
            raise ValueError(f"({alpha}+2)({alpha_bar}+2) != 4: not a dual pair")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "alpha_bar", alpha_bar)

    @classmethod
    def from_alpha(cls, alpha: Fraction) -> "ExponentPair":
        return cls(Fraction(alpha), dual_exponent(alpha))

    def swapped(self) -> "ExponentPair":
        return ExponentPair(self.alpha_bar, self.alpha)


def enumerate_integer_duals(window: int = 64) -> list[ExponentPair]:
    """All pairs with both exponents integer, in ascending alpha order.

    The sweep over |alpha| <= window is exhaustive and certified complete:
    alpha_bar = -2 + 4/(alpha + 2) is an integer only when (alpha + 2)
    divides 4, so |alpha + 2| <= 4 and every candidate lies inside any
    window >= 6.
    """
    pairs = []
    for alpha in range(-window, window + 1):
        if alpha == -2:
            continue
        bar = dual_exponent(Fraction(alpha))
        if bar.denominator == 1:
            if (alpha + 2) == 0 or 4 % (alpha + 2) != 0:
                raise AssertionError("divisor certificate violated")
            pairs.append(ExponentPair(Fraction(alpha), bar))
    return pairs


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    reason: str | None = None


def sl2_admissible(alpha: Fraction) -> Admissibility:
    """SL(2)-expressible power-law exponents: integers with alpha >= -2."""
    alpha = Fraction(alpha)
    if alpha.denominator != 1:
        return Admissibility(False, "non-integer")
    if alpha < -2:
        return Admissibility(False, "below -2")
    return Admissibility(True)


# Exponents whose operators close in SL(2) only quasi-exactly; their duals are
# fractional and are recorded as annotations, with no solver support.
SPECULATIVE_QES_EXPONENTS = (3, 4, 6)


def speculative_annotation(alpha: Fraction) -> str | None:
    alpha = Fraction(alpha)
    if alpha.denominator == 1 and int(alpha) in SPECULATIVE_QES_EXPONENTS:
        bar = dual_exponent(alpha)
        return f"quasi-exactly-solvable family; fractional dual {bar} (not solvable here)"
    return None


# ---------------------------------------------------------------------------
# Parameter maps between partner radial problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialParameters:
    """Coupling lam of lam * x**alpha, angular momentum l, optional energy.

    l >= -1/2 under the root convention used by the angular-momentum map.
    """

    lam: Fraction | float
    l: Fraction
    energy: Fraction | float | None = None

    def __post_init__(self) -> None:
        if Fraction(self.l) < Fraction(-1, 2):
            raise ValueError(f"l must be >= -1/2, got {self.l}")


@dataclass(frozen=True)
class DualityMap:
    """Parameter transport along an exponent pair.

    Coupling and energy swap as lam_bar = -(abar/a)**2 * E and
    E_bar = -(abar/a)**2 * lam; for (-1, 2) this is lam_bar = -4E,
    E_bar = -4*lam.  The angular momentum map l_bar = 2l + 1/2 (the root of
    l_bar(l_bar+1) = 4 l(l+1) + 3/4 with l_bar >= -1/2) exists only for the
    (-1, 2) pair.
    """

    pair: ExponentPair

    def ratio(self) -> Fraction:
        return (self.pair.alpha_bar / self.pair.alpha) ** 2

    def forward(self, params: RadialParameters) -> RadialParameters:
        if params.energy is None:
            raise ValueError("energy must be present to transport parameters")
        if (self.pair.alpha, self.pair.alpha_bar) != (Fraction(-1), Fraction(2)):
            raise UnsupportedPair(
                "the angular-momentum map is only defined for the (-1, 2) pair"
            )
        r = self.ratio()
        return RadialParameters(
            lam=-r * params.energy,
            l=2 * Fraction(params.l) + Fraction(1, 2),
            energy=-r * params.lam,
        )

    def backward(self, params: RadialParameters) -> RadialParameters:
        if params.energy is None:
            raise ValueError("energy must be present to transport parameters")
        if (self.pair.alpha, self.pair.alpha_bar) != (Fraction(-1), Fraction(2)):
            raise UnsupportedPair(
                "the angular-momentum map is only defined for the (-1, 2) pair"
            )
        r = self.ratio()
        return RadialParameters(
            lam=-params.energy / r,
            l=(Fraction(params.l) - Fraction(1, 2)) / 2,
            energy=-params.lam / r,
        )


def dual_parameters(
    params: RadialParameters, pair: ExponentPair, direction: str = "forward"
) -> RadialParameters:
    dmap = DualityMap(pair)
    if direction == "forward":
        return dmap.forward(params)
    if direction == "backward":
        return dmap.backward(params)
    raise ValueError(f"unknown direction {direction!r}")


def centrifugal_dual_l(l: Fraction, power: Fraction) -> Fraction:
    """l_bar = p(l + 1/2) - 1/2 for r = r_bar**p; solves the general
    centrifugal matching l_bar(l_bar+1) = p**2 l(l+1) + (p**2 - 1)/4 with the
    l_bar >= -1/2 root.  For p = 2 this reduces to 2l + 1/2."""
    return Fraction(power) * (Fraction(l) + Fraction(1, 2)) - Fraction(1, 2)


# ---------------------------------------------------------------------------
# Operator-level proportionality check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProportionalityReport:
    alpha: Fraction
    alpha_bar: Fraction
    residual: float
    truncation_estimate: float
    grid: dict

    def to_json_dict(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "alpha_bar": str(self.alpha_bar),
            "residual": self.residual,
            "truncation_estimate": self.truncation_estimate,
            "grid": dict(self.grid),
        }


def _second_derivative(f: Callable, t: np.ndarray, h: float) -> np.ndarray:
    # 4th-order central stencil
    return (-f(t - 2 * h) + 16 * f(t - h) - 30 * f(t) + 16 * f(t + h) - f(t + 2 * h)) / (12 * h * h)


def operator_proportionality_check(
    alpha: Fraction,
    test_fn: Callable[[np.ndarray], np.ndarray] | None = None,
    grid: tuple[float, float, float] = (0.5, 5.0, 1e-3),
    params: RadialParameters | None = None,
    step: float | None = None,
) -> ProportionalityReport:
    """Numerical check of H u = (a/abar)**2 * rb**(2+2*abar/a) * rb**s * Hb ub.

    Here r = rb**p with p = -alpha_bar/alpha, u(r) = rb**s * ub(rb) with the
    gauge exponent s = alpha_bar/4 that removes first-derivative terms, and
    (lam_bar, E_bar, l_bar) are the transported parameters.  Both sides are
    evaluated with 4th-order central differences at steps h and h/2; the
    reported residual uses the coarse step and the truncation estimate is the
    standard |D_h - D_{h/2}| / 15 bound on the fine step.
    """
    alpha = Fraction(alpha)
    if alpha == 0:
        raise ValueError("alpha = 0 is the self-dual free case; the power map degenerates")
    alpha_bar = dual_exponent(alpha)
    if params is None:
        params = RadialParameters(lam=Fraction(-1), l=Fraction(0), energy=Fraction(-1, 2))
    if params.energy is None:
        raise ValueError("energy must be set for the proportionality check")

    p = -alpha_bar / alpha
    s = alpha_bar / 4
    ratio = float((alpha_bar / alpha) ** 2)
    lam_bar = -ratio * float(params.energy)
    e_bar = -ratio * float(params.lam)
    l_bar = centrifugal_dual_l(params.l, p)

    if test_fn is None:
        test_fn = lambda rb: rb**2 * np.exp(-(rb**2))  # noqa: E731

    lo, hi, spacing = grid
    if lo <= 0 or hi <= lo or spacing <= 0:
        raise ValueError("grid must satisfy 0 < lo < hi with positive step")
    rb = np.arange(lo, hi + spacing / 2, spacing)
    r = rb ** float(p)

    lam = float(params.lam)
    energy = float(params.energy)
    ll = float(Fraction(params.l) * (Fraction(params.l) + 1))
    llb = float(Fraction(l_bar) * (Fraction(l_bar) + 1))
    fa, fab = float(alpha), float(alpha_bar)

    def u(rr: np.ndarray) -> np.ndarray:
        rbr = rr ** float(1 / p)
        return rbr ** float(s) * test_fn(rbr)

    def residual_at(h: float) -> float:
        hu = -0.5 * _second_derivative(u, r, h) + (lam * r**fa + ll / (2 * r**2) - energy) * u(r)
        hb = -0.5 * _second_derivative(test_fn, rb, h) + (
            lam_bar * rb**fab + llb / (2 * rb**2) - e_bar
        ) * test_fn(rb)
        # proportionality factor (alpha/alpha_bar)**2 = 1/ratio
        rhs = (1.0 / ratio) * rb ** float(2 + 2 * alpha_bar / alpha) * rb ** float(s) * hb
        scale = max(float(np.abs(hu).max()), float(np.abs(rhs).max()))
        if scale == 0.0:
            return 0.0
        return float(np.abs(hu - rhs).max()) / scale

    h = spacing if step is None else step
    res_coarse = residual_at(h)
    res_fine = residual_at(h / 2)
    truncation = abs(res_coarse - res_fine) / 15.0
    if truncation > res_coarse:
        raise GridTooCoarse(
            f"truncation estimate {truncation:.3e} exceeds residual {res_coarse:.3e}"
        )
    return ProportionalityReport(
        alpha=alpha,
        alpha_bar=alpha_bar,
        residual=res_coarse,
        truncation_estimate=truncation,
        grid={"lo": lo, "hi": hi, "step": spacing, "fd_step": h, "points": int(rb.size)},
    )
