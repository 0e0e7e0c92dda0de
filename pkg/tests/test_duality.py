"""Exponent map, classification, parameter transport, proportionality check."""

import random
from fractions import Fraction

import numpy as np
import pytest

from qeslab.duality import (
    ExponentPair,
    RadialParameters,
    SingularExponent,
    UnsupportedPair,
    centrifugal_dual_l,
    dual_exponent,
    dual_parameters,
    enumerate_integer_duals,
    operator_proportionality_check,
    sl2_admissible,
    speculative_annotation,
)

F = Fraction


class TestDualExponent:
    @pytest.mark.parametrize("alpha,expected", [(-1, 2), (0, 0), (-6, -3), (2, -1), (-3, -6), (-4, -4)])
    def test_known_pairs(self, alpha, expected):
        assert dual_exponent(F(alpha)) == F(expected)

    def test_singular(self):
        with pytest.raises(SingularExponent):
            dual_exponent(F(-2))

    def test_involution_on_random_rationals(self):
        rng = random.Random(5521)
        seen = 0
        while seen < 50:
            alpha = F(rng.randint(-40, 40), rng.randint(1, 12))
            if alpha == -2:
                continue
            seen += 1
            bar = dual_exponent(alpha)
            assert dual_exponent(bar) == alpha
            assert (alpha + 2) * (bar + 2) == 4

    def test_group_split(self):
        # alpha > -2 iff its dual is > -2
        rng = random.Random(99)
        for _ in range(50):
            alpha = F(rng.randint(-50, 50), rng.randint(1, 9))
            if alpha == -2:
                continue
            bar = dual_exponent(alpha)
            assert (alpha > -2) == (bar > -2)


class TestEnumeration:
    def test_exactly_six(self):
        pairs = enumerate_integer_duals()
        assert [int(p.alpha) for p in pairs] == [-6, -4, -3, -1, 0, 2]

    def test_contains_expected_pairs(self):
        pairs = {(int(p.alpha), int(p.alpha_bar)) for p in enumerate_integer_duals()}
        assert (-4, -4) in pairs
        assert (-1, 2) in pairs and (2, -1) in pairs

    def test_identity_holds_for_all(self):
        for p in enumerate_integer_duals():
            assert (p.alpha + 2) * (p.alpha_bar + 2) == 4

    def test_window_independence(self):
        assert enumerate_integer_duals(window=8) == enumerate_integer_duals(window=64)


class TestAdmissibility:
    def test_examples(self):
        assert sl2_admissible(F(-1)).admissible
        assert sl2_admissible(F(0)).admissible
        assert sl2_admissible(F(2)).admissible
        assert sl2_admissible(F(-6)) .reason == "below -2"
        assert sl2_admissible(F(3, 2)).reason == "non-integer"

    def test_intersection_with_integer_duals(self):
        admissible = [
            int(p.alpha) for p in enumerate_integer_duals() if sl2_admissible(p.alpha).admissible
        ]
        assert admissible == [-1, 0, 2]

    def test_speculative_annotations(self):
        assert speculative_annotation(F(3)) is not None and "-6/5" in speculative_annotation(F(3))
        assert "-4/3" in speculative_annotation(F(4))
        assert "-3/2" in speculative_annotation(F(6))
        assert speculative_annotation(F(2)) is None


class TestParameterTransport:
    def test_hydrogen_ground_state(self):
        pair = ExponentPair.from_alpha(F(-1))
        params = RadialParameters(lam=F(-1), l=F(0), energy=F(-1, 2))
        out = dual_parameters(params, pair, "forward")
        assert (out.lam, out.l, out.energy) == (F(2), F(1, 2), F(4))

    def test_l_map_quadratic_identity(self):
        for l in (F(0), F(1, 2), F(1), F(3, 2), F(2)):
            l_bar = 2 * l + F(1, 2)
            assert l_bar * (l_bar + 1) == 4 * l * (l + 1) + F(3, 4)
        assert dual_parameters(
            RadialParameters(F(-1), F(1), F(-1, 2)), ExponentPair.from_alpha(F(-1))
        ).l == F(5, 2)

    def test_involution(self):
        pair = ExponentPair.from_alpha(F(-1))
        params = RadialParameters(lam=F(-3, 7), l=F(2, 3), energy=F(-5, 11))
        out = dual_parameters(dual_parameters(params, pair, "forward"), pair, "backward")
        assert out == params
        out2 = dual_parameters(dual_parameters(params, pair, "backward"), pair, "forward")
        assert out2 == params

    def test_unsupported_pair(self):
        pair = ExponentPair.from_alpha(F(2))
        with pytest.raises(UnsupportedPair):
            dual_parameters(RadialParameters(F(1), F(0), F(1)), pair, "forward")

    def test_energy_required(self):
        pair = ExponentPair.from_alpha(F(-1))
        with pytest.raises(ValueError):
            dual_parameters(RadialParameters(F(-1), F(0), None), pair)

    def test_invalid_pair_rejected(self):
        with pytest.raises(ValueError):
            ExponentPair(F(-1), F(3))

    def test_centrifugal_dual_general_power(self):
        # the general map reduces to 2l + 1/2 at p = 2 and satisfies the
        # matching quadratic for random rational l and p
        assert centrifugal_dual_l(F(0), F(2)) == F(1, 2)
        rng = random.Random(3)
        for _ in range(30):
            l = F(rng.randint(0, 8), rng.randint(1, 4))
            p = F(rng.randint(1, 9), rng.randint(1, 4))
            lb = centrifugal_dual_l(l, p)
            assert lb * (lb + 1) == p * p * l * (l + 1) + (p * p - 1) / 4
            assert lb >= F(-1, 2)


class TestProportionality:
    def test_coulomb_oscillator_identity(self):
        report = operator_proportionality_check(F(-1))
        assert report.alpha_bar == F(2)
        assert report.residual < 1e-6
        assert report.truncation_estimate < 1e-6
        assert report.truncation_estimate <= report.residual

    def test_zero_function(self):
        report = operator_proportionality_check(F(-1), test_fn=lambda rb: 0.0 * rb)
        assert report.residual == 0.0

    def test_reverse_direction(self):
        report = operator_proportionality_check(
            F(2),
            test_fn=lambda rb: np.exp(-((rb - 2.0) ** 2)),
            grid=(1.0, 4.0, 1e-3),
            params=RadialParameters(lam=F(1, 2), l=F(1), energy=F(3)),
        )
        assert report.residual < 1e-6

    def test_json_shape(self):
        report = operator_proportionality_check(F(-1), grid=(0.5, 2.0, 1e-2))
        data = report.to_json_dict()
        assert set(data) == {"alpha", "alpha_bar", "residual", "truncation_estimate", "grid"}
        assert data["alpha"] == "-1" and data["alpha_bar"] == "2"

    def test_invalid_grid(self):
        with pytest.raises(ValueError):
            operator_proportionality_check(F(-1), grid=(0.0, 5.0, 1e-3))
