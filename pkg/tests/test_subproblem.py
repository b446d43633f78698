"""Tests for the scaled radius, Cauchy point, and truncated CG."""

import numpy as np
import pytest

from trfam import RadiusSpec, cauchy_point, effective_radius, newton_step_1d, solve_tcg


def grid_cauchy_oracle(g, B, radius, n_grid=10**6):
    """Brute-force line search in t over [0, radius/|g|] along -g."""
    g = np.asarray(g, dtype=float)
    gnorm = np.linalg.norm(g)
    Bg = np.asarray(B) @ g
    gBg = float(g @ Bg)
    ts = np.linspace(0.0, radius / gnorm, n_grid)
    decrease = ts * gnorm**2 - 0.5 * ts**2 * gBg
    return float(np.max(decrease))


def random_instance(rng, n):
    """Mixed-definiteness symmetric matrix plus a nonzero gradient."""
    A = rng.standard_normal((n, n))
    A = 0.5 * (A + A.T)
    kind = rng.integers(3)
    if kind == 0:  # make SPD
        A = A @ A.T + 0.1 * np.eye(n)
    elif kind == 1:  # make indefinite with a known negative direction
        A = A - (np.max(np.linalg.eigvalsh(A)) * 0.5 + 1.0) * np.eye(n)
    g = rng.standard_normal(n)
    while np.linalg.norm(g) < 1e-3:
        g = rng.standard_normal(n)
    radius = float(rng.uniform(0.1, 5.0))
    return g, A, radius


class TestEffectiveRadius:
    def test_classical(self):
        spec = RadiusSpec(0.0, 0.0, 3.0, gnorm_term=17.0, bnorm_term=123.0)
        assert effective_radius(spec) == 3.0

    def test_both_scalings(self):
        spec = RadiusSpec(1.0, 1.0, 1.0, gnorm_term=4.0, bnorm_term=1.0)
        assert effective_radius(spec) == 2.0

    def test_fractional_alpha(self):
        # 0.25^0.5 / (1+3) * 2 = 0.5 / 4 * 2
        spec = RadiusSpec(0.5, 1.0, 2.0, gnorm_term=0.25, bnorm_term=3.0)
        assert effective_radius(spec) == pytest.approx(0.25, rel=1e-15)

    def test_zero_gradient_rejected(self):
        with pytest.raises(ValueError):
            effective_radius(RadiusSpec(0.0, 0.0, 1.0, 0.0, 1.0))


class TestCauchyPoint:
    def test_interior_spd(self):
        res = cauchy_point(np.array([2.0, 0.0]), np.eye(2), 10.0)
        assert np.allclose(res.s, [-2.0, 0.0])
        assert res.model_decrease == pytest.approx(2.0)
        assert not res.boundary_hit
        oracle = grid_cauchy_oracle(np.array([2.0, 0.0]), np.eye(2), 10.0)
        assert res.model_decrease == pytest.approx(oracle, abs=1e-6)

    def test_negative_curvature_hits_boundary(self):
        res = cauchy_point(np.array([1.0, 0.0]), -np.eye(2), 3.0)
        assert np.allclose(res.s, [-3.0, 0.0])
        assert res.model_decrease == pytest.approx(7.5)
        assert res.boundary_hit
        oracle = grid_cauchy_oracle(np.array([1.0, 0.0]), -np.eye(2), 3.0)
        assert res.model_decrease == pytest.approx(oracle, abs=1e-6)

    def test_small_radius_boundary(self):
        res = cauchy_point(np.array([1.0, 0.0]), np.eye(2), 0.5)
        assert res.model_decrease == pytest.approx(0.375)
        assert res.boundary_hit
        oracle = grid_cauchy_oracle(np.array([1.0, 0.0]), np.eye(2), 0.5)
        assert res.model_decrease == pytest.approx(oracle, abs=1e-6)

    def test_zero_gradient_rejected(self):
        with pytest.raises(ValueError):
            cauchy_point(np.zeros(2), np.eye(2), 1.0)

    def test_guaranteed_lower_bound(self):
        # decrease >= kappa_mdc |g| min{|g|/(1+|B|), R} with kappa_mdc = 1/2
        rng = np.random.default_rng(2)
        for _ in range(50):
            g, A, radius = random_instance(rng, 5)
            res = cauchy_point(g, A, radius)
            gnorm = np.linalg.norm(g)
            bnorm = np.max(np.abs(np.linalg.eigvalsh(A)))
            lower = 0.5 * gnorm * min(gnorm / (1 + bnorm), radius)
            assert res.model_decrease >= lower * (1 - 1e-12)


class TestTcg:
    def test_one_dimensional_newton(self):
        res = solve_tcg(np.array([-1.0]), np.array([[2.0]]), 100.0)
        assert np.allclose(res.s, [0.5])
        assert res.model_decrease == pytest.approx(0.25)
        assert not res.boundary_hit

    def test_boundary_matches_cauchy(self):
        g = np.array([1.0, 0.0])
        res = solve_tcg(g, np.eye(2), 0.5)
        cp = cauchy_point(g, np.eye(2), 0.5)
        assert np.allclose(res.s, cp.s)
        assert res.boundary_hit

    def test_matches_newton_system(self):
        g = np.array([1.0, 1.0])
        B = np.diag([1.0, 100.0])
        res = solve_tcg(g, B, 1e6, cg_tol=1e-12)
        assert np.allclose(res.s, [-1.0, -0.01], atol=1e-10)

    def test_matches_dense_solve_on_spd(self):
        rng = np.random.default_rng(4)
        n = 8
        A = rng.standard_normal((n, n))
        A = A @ A.T + 0.5 * np.eye(n)
        g = rng.standard_normal(n)
        res = solve_tcg(g, A, 1e9, cg_tol=1e-12, max_cg=200)
        assert np.allclose(res.s, -np.linalg.solve(A, g), atol=1e-8)

    def test_zero_gradient_rejected(self):
        with pytest.raises(ValueError):
            solve_tcg(np.zeros(3), np.eye(3), 1.0)

    def test_random_instances_decrease_and_radius(self):
        # 200 seeded instances, mixed definiteness, n <= 8
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            g, A, radius = random_instance(rng, n)
            res = solve_tcg(g, A, radius)
            assert res.model_decrease >= res.cauchy_decrease - 1e-12
            assert np.linalg.norm(res.s) <= radius * (1 + 1e-12)
            oracle = grid_cauchy_oracle(g, A, radius, n_grid=10**4)
            assert res.cauchy_decrease >= oracle - 1e-6 * max(1.0, abs(oracle))


class TestNewton1d:
    def test_interior(self):
        res = newton_step_1d(np.array([-1.0]), np.array([[2.0]]), 10.0)
        assert res.s[0] == 0.5
        assert res.model_decrease == pytest.approx(0.25)

    def test_boundary_on_negative_curvature(self):
        res = newton_step_1d(np.array([1.0]), np.array([[-1.0]]), 2.0)
        assert res.s[0] == -2.0
        assert res.boundary_hit

    def test_newton_past_radius_clips(self):
        res = newton_step_1d(np.array([-4.0]), np.array([[1.0]]), 1.0)
        assert res.s[0] == 1.0
        assert res.boundary_hit

    def test_wrong_dimension(self):
        with pytest.raises(ValueError):
            newton_step_1d(np.ones(2), np.eye(2), 1.0)
