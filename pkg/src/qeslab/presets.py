"""Named operator configurations used by the CLI, the service and the tests."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType


@dataclass(frozen=True)
class Preset:
    name: str
    twice_j: int
    coefficients: MappingProxyType
    description: str


def _preset(name: str, twice_j: int, coefficients: dict, description: str) -> Preset:
    return Preset(name, twice_j, MappingProxyType(dict(coefficients)), description)


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        _preset(
            "paper-j1-oscillator",
            2,
            {"-0": Fraction(1), "+": Fraction(1)},
            "j = 1 oscillator-form operator with unit couplings; its sector "
            "spectrum is {-sqrt(6), 0, sqrt(6)}",
        ),
        _preset(
            "oscillator-family",
            2,
            {"-0": Fraction(-2), "0": Fraction(4)},
            "confining oscillator realization (degree-lowering bilinear plus "
            "diagonal generator); V = 2 x**2 - 1/(8 x**2) - 6, sector {-4, 0, 4}",
        ),
        _preset(
            "coulomb-family",
            2,
            {"+,+": Fraction(-1, 2), "+": Fraction(-1)},
            "raising-operator family for the 1/x problem; nilpotent sector "
            "(all algebraic eigenvalues zero) and a constant potential",
        ),
    )
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; options: {sorted(PRESETS)}") from None
