import numpy as np
import pytest

import farshapes as fs
from farshapes.quad_functional import (BumpCoeff, ConeSystem, ConstCoeff, FuncCoeff,
                                       GridCoeff, InvalidCoefficientsError, QuadCoeffs,
                                       best_segment, build_cone_system,
                                       remark_bump_coeffs)

from conftest import TWO_PI, random_smooth_coeffs, random_triangle

DISC = fs.FourierForm(1.0)
A_ONLY = QuadCoeffs(ConstCoeff(1.0), ConstCoeff(0.0), ConstCoeff(0.0), ConstCoeff(0.0))
B_ONLY = QuadCoeffs(ConstCoeff(0.0), ConstCoeff(1.0), ConstCoeff(0.0), ConstCoeff(0.0))
EQUILATERAL = fs.triangle_from_angles([0.0, TWO_PI / 3, 2 * TWO_PI / 3])


def augmented_bump_coeffs(eps=0.05, outside=1e-3, penalty=1.0):
    """Three-bump b plus a needle-penalizing c: makes the triangle win."""
    centers = [0.0, TWO_PI / 3, 2 * TWO_PI / 3]
    return QuadCoeffs(ConstCoeff(0.0),
                      BumpCoeff([(c, eps, 1.0) for c in centers], outside),
                      BumpCoeff([(c, eps, -penalty) for c in centers], 0.0),
                      ConstCoeff(0.0))


class TestEvalJ:
    def test_disc_area_term(self):
        assert fs.eval_J(A_ONLY, DISC) == pytest.approx(TWO_PI, abs=1e-12)

    def test_segment_h_squared(self):
        assert fs.eval_J(A_ONLY, fs.Segment(0.7)) == pytest.approx(np.pi ** 3 / 4, abs=1e-12)

    def test_segment_derivative_squared(self):
        assert fs.eval_J(B_ONLY, fs.Segment(0.7)) == pytest.approx(np.pi ** 3 / 4, abs=1e-12)

    def test_linear_terms(self):
        coeffs = QuadCoeffs(ConstCoeff(0.0), ConstCoeff(0.0), ConstCoeff(1.0),
                            ConstCoeff(1.0))
        # c-term integrates h (the perimeter); d-term integrates h' (zero)
        assert fs.eval_J(coeffs, DISC) == pytest.approx(TWO_PI, abs=1e-12)
        assert fs.eval_J(coeffs, fs.Segment(0.2)) == pytest.approx(TWO_PI, abs=1e-10)

    def test_grid_shape_path(self):
        grid = fs.AngleGrid(2048)
        h = fs.GridFn(DISC.value(grid.nodes), grid)
        assert fs.eval_J(A_ONLY, h) == pytest.approx(TWO_PI, abs=1e-10)


class TestValidation:
    def test_negative_b_rejected(self):
        bad = QuadCoeffs(ConstCoeff(1.0), ConstCoeff(-0.1), ConstCoeff(0.0), ConstCoeff(0.0))
        with pytest.raises(InvalidCoefficientsError):
            bad.validate()

    def test_vanishing_a_plus_b_rejected(self):
        bad = QuadCoeffs(ConstCoeff(0.0), ConstCoeff(0.0), ConstCoeff(1.0), ConstCoeff(0.0))
        with pytest.raises(InvalidCoefficientsError):
            bad.validate()

    def test_json_roundtrip(self):
        coeffs = remark_bump_coeffs()
        back = QuadCoeffs.from_dict(coeffs.to_dict())
        t = np.linspace(0, TWO_PI, 400)
        assert np.allclose(coeffs.b.value(t), back.b.value(t), atol=1e-15)

    def test_psd_quadratic_part(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            coeffs = random_smooth_coeffs(rng)
            system = build_cone_system(coeffs, 64)
            for _ in range(200):
                w = rng.standard_normal(64)
                assert w @ system.M @ w >= -1e-9 * (w @ w)


class TestConeSolver:
    def test_pure_a_returns_needle(self):
        sol = fs.maximize_over_cone(A_ONLY, n=128, restarts=6, seed=0)
        assert sol.classification == "segment"
        assert sol.value == pytest.approx(np.pi ** 3 / 4, abs=1e-9)
        (a1, w1), (a2, w2) = sol.atoms
        assert abs(abs(a2 - a1) - np.pi) < 1e-12
        assert w1 == pytest.approx(np.pi, abs=1e-12)

    def test_vertex_value_matches_exact_shape_integral(self):
        sol = fs.maximize_over_cone(A_ONLY, n=128, restarts=4, seed=1)
        assert fs.eval_J(A_ONLY, sol.h_opt) == pytest.approx(sol.value, abs=1e-9)

    def test_solution_measure_is_class_a(self):
        rng = np.random.default_rng(5)
        for _ in range(3):
            coeffs = random_smooth_coeffs(rng)
            sol = fs.maximize_over_cone(coeffs, n=128, restarts=6, seed=3)
            measure = fs.CurvatureMeasure(atoms=sol.atoms)
            measure.validate(moment_tol=1e-9, target_mass=TWO_PI, mass_tol=1e-9)
            assert sol.classification in ("segment", "triangle")

    def test_triangle_winning_coefficients(self):
        coeffs = augmented_bump_coeffs()
        sol = fs.maximize_over_cone(coeffs, n=256, restarts=8, seed=0)
        cont = fs.maximize_over_triangles(coeffs, restarts=20, seed=0)
        assert sol.classification == "triangle"
        assert cont.kind == "triangle"
        assert sol.value > cont.segment_value
        assert abs(sol.value - cont.value) < 1e-3

    def test_remark_bumps_measured_truth(self):
        # With b = 1 on the three bumps and tiny outside, needles in fact beat
        # the aligned equilateral: frozen exact-quadrature values below.
        coeffs = remark_bump_coeffs()
        j_eq = fs.eval_J(coeffs, fs.triangle_support(EQUILATERAL))
        alpha, j_seg = best_segment(coeffs)
        assert j_eq == pytest.approx(0.321689815777423, abs=1e-9)
        assert j_seg == pytest.approx(0.377491624045884, abs=1e-9)
        assert j_eq / j_seg == pytest.approx(0.852, abs=2e-3)
        sol = fs.maximize_over_cone(coeffs, n=256, restarts=8, seed=0)
        cont = fs.maximize_over_triangles(coeffs, restarts=16, seed=0)
        assert sol.classification == "segment"
        assert cont.kind == "segment"
        assert abs(sol.value - cont.value) < 1e-6

    def test_discretization_convergence_on_bumps(self):
        coeffs = remark_bump_coeffs()
        values = {n: fs.maximize_over_cone(coeffs, n=n, restarts=6, seed=0).value
                  for n in (128, 256, 512)}
        assert values[128] <= values[256] + 1e-3
        assert abs(values[256] - values[512]) <= 1e-3


class TestCrossSolver:
    def test_fig_body_distance_functional(self):
        # a = 1, c = -2 h_C turns J into d2(., C)^2 minus a constant, so the
        # cone maximizer must match the distance-maximizing needle
        C = fs.FourierForm(1.0, [(2, -0.1, 0.0), (3, 0.05, 0.0)])
        coeffs = QuadCoeffs(ConstCoeff(1.0), ConstCoeff(0.0),
                            FuncCoeff(lambda t: -2.0 * C.value(t)), ConstCoeff(0.0))
        sol = fs.maximize_over_cone(coeffs, n=256, restarts=8, seed=0)
        assert sol.classification == "segment"
        a_far, d_far = fs.farthest_l2_max_distance(C)
        axis = sol.atoms[0][0] % np.pi
        assert min(abs(axis - a_far), np.pi - abs(axis - a_far)) < 1e-3
        expected = d_far ** 2 - fs.l2_distance(C, DISC) ** 2  # int h_C^2 shifted
        h2 = np.pi ** 3 / 4 - TWO_PI * fs.g_profile(C, a_far)
        assert sol.value == pytest.approx(h2, abs=1e-6)

    def test_random_draws_agree(self):
        rng = np.random.default_rng(123)
        for _ in range(4):
            coeffs = random_smooth_coeffs(rng)
            sol = fs.maximize_over_cone(coeffs, n=128, restarts=8, seed=7)
            cont = fs.maximize_over_triangles(coeffs, restarts=16, seed=7)
            assert abs(sol.value - cont.value) < 1e-3


class TestClosureIdentities:
    def test_equilateral_exact(self):
        res = fs.closure_identities(EQUILATERAL)
        assert all(abs(v) < 1e-12 for v in res.values())

    def test_random_triangles(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            res = fs.closure_identities(random_triangle(rng))
            assert all(abs(v) < 1e-12 for v in res.values())

    def test_near_degenerate(self):
        eps = 1e-4
        tri = fs.TriangleSpec(0.0, np.pi - eps, np.pi + 0.8)
        res = fs.closure_identities(tri)
        assert all(abs(v) < 1e-9 for v in res.values())


class TestCriticality:
    def test_self_target_vanishes(self):
        tri = random_triangle(np.random.default_rng(8))
        rep = fs.triangle_criticality(tri, fs.triangle_support(tri))
        assert abs(rep.scalar_i) < 1e-12
        assert np.max(np.abs(rep.stationarity)) < 1e-12
        assert max(abs(v) for v in rep.arc_integrals.values()) < 1e-12

    def test_newton_critical_point_for_generic_target(self):
        C = fs.FourierForm(1.0, [(2, 0.05, 0.0), (3, 0.0, 0.03)])
        tri = fs.critical_triangle(C, EQUILATERAL)
        rep = fs.triangle_criticality(tri, C)
        assert np.max(np.abs(rep.stationarity)) < 1e-8
        assert np.max(np.abs(rep.fd_gradient)) < 1e-6
        # consistency identities expressing the arc integrals through the
        # scalar I hold at any critical point
        assert np.max(np.abs(rep.consistency)) < 1e-8
        # the finite-difference gradient cross-validates the analytic residuals
        assert np.max(np.abs(2 * rep.stationarity - rep.fd_gradient)) < 1e-6

    def test_partial_row_sums_vanish(self):
        rng = np.random.default_rng(10)
        for _ in range(30):
            dA = fs.triangle_length_partials(random_triangle(rng))
            assert np.max(np.abs(dA.sum(axis=1))) < 1e-10 * max(1.0, np.abs(dA).max())

    def test_symmetric_target_has_critical_equilateral(self):
        C = fs.FourierForm(1.0, [(3, 0.1, 0.0)])
        tri = fs.critical_triangle(C, EQUILATERAL)
        rep = fs.triangle_criticality(tri, C)
        assert np.max(np.abs(rep.fd_gradient)) < 1e-6
        # three-fold symmetry keeps the critical triangle equilateral
        assert np.ptp(tri.gaps()) < 1e-8
