import math

import numpy as np
import pytest

from relchange import (
    Curve,
    FmaParams,
    Grid,
    SimScenario,
    binseg,
    bump_delta_j,
    gen_fma1,
    gen_series,
    scenario_mean,
    sup_norm,
    three_change_scenario,
    two_change_scenario,
)
from relchange.simulate import (
    bspline_basis,
    draw_theta,
    mean_schedule,
    truncate_coefficients,
)


class TestBump:
    def test_interpolation_points(self):
        for t, v in [(0.01, 2), (0.02, 5), (0.03, 9), (0.04, 10),
                     (0.05, 12), (0.06, 15), (0.07, 22), (0.08, 25)]:
            assert bump_delta_j(t) == pytest.approx(v, abs=1e-9)

    def test_reflected_points(self):
        # reflection about the axis 0.085: bump(0.17 - t) = bump(t) at knots
        assert bump_delta_j(0.09) == pytest.approx(25.0, abs=1e-9)
        assert bump_delta_j(0.10) == pytest.approx(22.0, abs=1e-9)
        assert bump_delta_j(0.13) == pytest.approx(10.0, abs=1e-9)
        assert bump_delta_j(0.15) == pytest.approx(5.0, abs=1e-9)

    def test_outside_support(self):
        assert bump_delta_j(0.5) == 0.0
        assert bump_delta_j(0.2) == 0.0
        assert bump_delta_j(1.0) == 0.0

    def test_support_endpoints_anchored(self):
        assert bump_delta_j(0.0) == pytest.approx(0.0, abs=1e-12)
        assert bump_delta_j(0.16) == pytest.approx(0.0, abs=1e-12)

    def test_peak_near_axis(self):
        ts = np.linspace(0.0, 0.17, 100001)
        vals = bump_delta_j(ts)
        assert abs(ts[np.argmax(vals)] - 0.085) < 0.01
        assert vals.max() > 25.0


class TestScenarioMean:
    def test_base_at_zero(self):
        assert scenario_mean(1, 0.0) == pytest.approx(20.0)

    def test_two_bump_difference(self):
        assert scenario_mean(3, 0.04) - scenario_mean(1, 0.04) == pytest.approx(20.0)

    def test_fourth_segment_single_bump(self):
        assert scenario_mean(4, 0.04) - scenario_mean(1, 0.04) == pytest.approx(10.0)

    def test_jump_sup_norm_matches_dense_bump_max(self):
        dense = bump_delta_j(np.linspace(0.0, 0.17, 500001))
        g = Grid.uniform(2000)
        diff = scenario_mean(2, g.points) - scenario_mean(1, g.points)
        assert sup_norm(Curve(g, diff)) == pytest.approx(float(dense.max()), rel=1e-5)

    def test_unknown_label(self):
        with pytest.raises(ValueError):
            scenario_mean(7, 0.3)


class TestFma:
    def test_truncation_zeroes_forced_values(self):
        raw = np.array([[5.0, -4.0001, 3.9, -4.0, 0.0]])
        out = truncate_coefficients(raw)
        np.testing.assert_array_equal(out, [[0.0, 0.0, 3.9, -4.0, 0.0]])

    def test_theta_spectral_norm(self):
        for seed in (0, 7, 99):
            theta = draw_theta(np.random.default_rng(seed), FmaParams())
            assert abs(np.linalg.norm(theta, 2) - 0.8) < 1e-10

    def test_theta_application_linear(self):
        rng = np.random.default_rng(3)
        theta = draw_theta(rng, FmaParams())
        a, b = 2.5, -1.25
        u = rng.standard_normal(21)
        v = rng.standard_normal(21)
        np.testing.assert_allclose(
            (a * u + b * v) @ theta.T, a * (u @ theta.T) + b * (v @ theta.T), atol=1e-12
        )

    def test_seeded_rerun_bit_identical(self):
        g = Grid.uniform(30)
        a = gen_fma1(50, g, seed=11)
        b = gen_fma1(50, g, seed=11)
        np.testing.assert_array_equal(a.values, b.values)
        c = gen_fma1(50, g, seed=12)
        assert not np.array_equal(a.values, c.values)

    def test_basis_dimension(self):
        basis = bspline_basis(Grid.uniform(60), 21)
        assert basis.shape == (60, 21)
        # clamped cubic basis forms a partition of unity
        np.testing.assert_allclose(basis.sum(axis=1), 1.0, atol=1e-12)

    def test_mean_curve_within_clt_band(self):
        n = 10_000
        g = Grid.uniform(40)
        x = gen_fma1(n, g, seed=5)
        params = FmaParams()
        basis = bspline_basis(g, params.basis_dim)
        theta = draw_theta(np.random.default_rng(5), params)
        sds = params.coeff_sds()
        var_eta = (basis * basis) @ (sds * sds)
        var_theta = ((basis @ theta) ** 2) @ (sds * sds)
        sd_band = np.sqrt((var_eta + var_theta).max())
        assert np.abs(x.values.mean(axis=0)).max() < 0.2 * sd_band

    def test_ma1_correlation_structure(self):
        # empirical lag correlations: nonzero at lag 1, near zero for lags >= 2
        from relchange import variogram

        x = gen_fma1(4000, Grid.uniform(20), seed=21)
        vg = variogram(x, 4)
        assert vg.values[1] > 3 * max(vg.values[2], vg.values[3], vg.values[4])

    def test_ma1_far_lags_below_monte_carlo_band(self):
        # band oracle: shuffling the curves destroys serial dependence, so
        # permuted copies give the iid null distribution of the lag norms
        from relchange import FunctionalSeries, variogram

        x = gen_fma1(1500, Grid.uniform(12), seed=8)
        rng = np.random.default_rng(99)
        null_vals = []
        for _ in range(60):
            perm = rng.permutation(x.n)
            shuffled = FunctionalSeries(x.grid, x.values[perm])
            vg = variogram(shuffled, 3)
            null_vals.extend([vg.values[2], vg.values[3]])
        band = float(np.quantile(null_vals, 0.99))
        vg = variogram(x, 3)
        assert vg.values[2] < band * 1.5
        assert vg.values[3] < band * 1.5


class TestScenario:
    def test_validation(self):
        with pytest.raises(ValueError):
            SimScenario(n=100, change_fractions=(0.6, 0.3), mean_ids=(1, 2, 3))
        with pytest.raises(ValueError):
            SimScenario(n=100, change_fractions=(0.5,), mean_ids=(1,))

    def test_change_indices(self):
        assert two_change_scenario(300).change_indices == (100, 200)
        assert three_change_scenario(301).change_indices == (75, 150, 225)

    def test_noiseless_is_pure_mean_schedule(self):
        scn = two_change_scenario(30, grid_size=25)
        x = gen_series(scn, noiseless=True)
        np.testing.assert_array_equal(x.values, mean_schedule(scn))

    def test_boundary_convention(self):
        # mu constant on (floor(n s_{i-1}), floor(n s_i)]: at n = 300 curve 100
        # carries mu_1 and curve 101 carries mu_2
        scn = two_change_scenario(300)
        x = gen_series(scn, noiseless=True)
        mu1 = scenario_mean(1, scn.grid.points)
        mu2 = scenario_mean(2, scn.grid.points)
        np.testing.assert_array_equal(x.curve(100).values, mu1)
        np.testing.assert_array_equal(x.curve(101).values, mu2)

    def test_binseg_recovers_planted_indices_noiselessly(self):
        for scn in (two_change_scenario(240), three_change_scenario(240)):
            x = gen_series(scn, noiseless=True)
            assert binseg(x, 1e-4, 10).indices == scn.change_indices

    def test_seed_determinism(self):
        scn = two_change_scenario(60, seed=9)
        a = gen_series(scn)
        b = gen_series(scn)
        np.testing.assert_array_equal(a.values, b.values)
