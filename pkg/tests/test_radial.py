"""Numerical radial eigensolver against analytic references."""

import math
from fractions import Fraction

import pytest

from qeslab.radial import (
    GridError,
    NotConfining,
    RadialGrid,
    coulomb_couplings_from_oscillator,
    make_problem,
    solve_radial,
    spectrum_to_csv,
    spectrum_to_json_dict,
    verify_duality,
)

F = Fraction


@pytest.fixture(scope="module")
def hydrogen_spectrum():
    problem = make_problem(F(-1), -1.0, F(0), r_min=1e-4, r_max=60.0, n_points=6000)
    return solve_radial(problem, 3)


class TestSolveRadial:
    def test_hydrogen_levels(self, hydrogen_spectrum):
        # Bohr levels -lam**2 / (2 n**2)
        for n, expected in ((1, -0.5), (2, -0.125), (3, -1.0 / 18.0)):
            assert abs(hydrogen_spectrum.eigenvalues[n - 1] - expected) < 5e-4

    def test_oscillator_ground_state(self):
        problem = make_problem(F(2), 0.5, F(0), r_min=1e-4, r_max=12.0, n_points=4000)
        result = solve_radial(problem, 2)
        # w = 1: E_k = 2k + l + 3/2
        assert abs(result.eigenvalues[0] - 1.5) < 5e-4
        assert abs(result.eigenvalues[1] - 3.5) < 5e-4

    def test_particle_in_a_box(self):
        length = 60.0
        problem = make_problem(F(0), 0.0, F(0), r_min=1e-4, r_max=length, n_points=4000)
        result = solve_radial(problem, 1)
        assert abs(result.eigenvalues[0] - math.pi**2 / (2 * length**2)) < 1e-7

    def test_error_estimates_bound_truth(self, hydrogen_spectrum):
        # the Richardson estimate bounds the distance between the fine grid
        # and the extrapolated value by construction; it should be small here
        assert all(e < 1e-4 for e in hydrogen_spectrum.error_estimates)

    def test_two_resolutions_agree_within_estimate(self):
        # the N and 2N spectra straddle the extrapolated value: the fine grid
        # sits within one estimate of it, the coarse grid within four
        from qeslab.radial import _lowest_eigenvalues

        problem = make_problem(F(2), 0.5, F(0), r_min=1e-4, r_max=12.0, n_points=1000)
        result = solve_radial(problem, 3)
        coarse = _lowest_eigenvalues(problem, 1000, 3)
        fine = _lowest_eigenvalues(problem, 2000, 3)
        for e_ext, est, e_n, e_2n in zip(
            result.eigenvalues, result.error_estimates, coarse, fine
        ):
            slack = 1e-9 * max(abs(e_ext), 1.0)
            assert abs(e_2n - e_ext) <= est + slack
            assert abs(e_n - e_ext) <= 4 * est + slack

    def test_grid_convergence_second_order(self):
        # halving h cuts |E - E_analytic| roughly fourfold; r_min is tightened
        # so the fixed inner-wall bias (linear in r_min) stays subdominant
        from qeslab.radial import _lowest_eigenvalues

        cases = [
            (make_problem(F(2), 0.5, F(0), r_min=1e-6, r_max=12.0), 1.5, (250, 500, 1000)),
            (make_problem(F(-1), -1.0, F(0), r_min=1e-6, r_max=60.0), -0.5, (1000, 2000, 4000)),
        ]
        for problem, exact, sizes in cases:
            errors = [abs(_lowest_eigenvalues(problem, n, 1)[0] - exact) for n in sizes]
            assert 3.0 < errors[0] / errors[1] < 5.5
            assert 3.0 < errors[1] / errors[2] < 5.5

    def test_not_confining(self):
        with pytest.raises(NotConfining):
            make_problem(F(2), -1.0, F(0))
        with pytest.raises(NotConfining):
            make_problem(F(-1), 1.0, F(0))

    def test_grid_errors(self):
        with pytest.raises(GridError):
            RadialGrid(0.0, 10.0, 1000)
        with pytest.raises(GridError):
            RadialGrid(1.0, 0.5, 1000)
        with pytest.raises(GridError):
            RadialGrid(1e-4, 10.0, 50)

    def test_level_count_validated(self):
        problem = make_problem(F(-1), -1.0, F(0))
        with pytest.raises(ValueError):
            solve_radial(problem, 0)
        with pytest.raises(ValueError):
            solve_radial(problem, 21)


class TestVerifyDuality:
    def test_two_hydrogen_levels(self):
        problem = make_problem(F(-1), -1.0, F(0))
        report = verify_duality(problem, 2)
        assert len(report.levels) == 2
        assert report.all_within
        first, second = report.levels
        # E_1 = -1/2 maps to lam_bar ~ 2 whose ground level is the target 4
        assert abs(first.lam_bar - 2.0) < 5e-3
        assert first.match_index == 0
        assert abs(first.best_match - 4.0) < 5e-3
        # E_2 = -1/8 maps to lam_bar ~ 1/2 whose second level is the target
        assert abs(second.lam_bar - 0.5) < 5e-3
        assert second.match_index == 1
        assert abs(second.best_match - 4.0) < 5e-3
        assert first.l_bar == F(1, 2)

    def test_empty_request(self):
        problem = make_problem(F(-1), -1.0, F(0))
        report = verify_duality(problem, 0)
        assert report.levels == ()

    def test_rejects_wrong_problem(self):
        with pytest.raises(ValueError):
            verify_duality(make_problem(F(2), 0.5, F(0)), 1)


class TestInverseReading:
    def test_couplings_from_ground_state(self):
        lams = coulomb_couplings_from_oscillator(-0.5, F(0), 3)
        assert len(lams) == 3
        for lam, expected in zip(lams, (-1.0, -2.0, -3.0)):
            assert abs(lam - expected) < 1e-2

    def test_scaling_with_target(self):
        lams = coulomb_couplings_from_oscillator(-2.0, F(0), 3)
        for lam, expected in zip(lams, (-2.0, -4.0, -6.0)):
            assert abs(lam - expected) < 2e-2

    def test_single_coupling(self):
        lams = coulomb_couplings_from_oscillator(-0.5, F(0), 1)
        assert len(lams) == 1 and abs(lams[0] + 1.0) < 1e-2

    def test_positive_target_rejected(self):
        with pytest.raises(ValueError):
            coulomb_couplings_from_oscillator(0.5, F(0), 1)

    def test_forward_inverse_consistency(self):
        # couplings read off the partner problem reproduce levels that the
        # forward check accepts
        problem = make_problem(F(-1), -1.0, F(0))
        forward = verify_duality(problem, 2)
        lams = coulomb_couplings_from_oscillator(-0.5, F(0), 2)
        assert abs(lams[0] - problem.lam) < 1e-2
        assert forward.all_within


class TestExports:
    def test_csv_shape(self, hydrogen_spectrum):
        text = spectrum_to_csv(hydrogen_spectrum)
        lines = text.strip().splitlines()
        assert lines[0] == "level,E,error"
        assert len(lines) == 4

    def test_json_shape(self, hydrogen_spectrum):
        data = spectrum_to_json_dict(hydrogen_spectrum)
        assert data["alpha"] == "-1"
        assert len(data["levels"]) == 3
        assert {"level", "energy", "error"} <= set(data["levels"][0])
