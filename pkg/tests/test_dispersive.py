import numpy as np
import pytest

from fiolab.dispersive import (
    SpaceTimeField,
    TimeWindow,
    apply_half_derivative_ratio,
    egorov_residual,
    propagate,
    smoothing_constant,
    smoothing_functional,
    symbol_on_grid,
)
from fiolab.lattice import Field, make_grid, norm
from fiolab.symbols import euclidean_symbol, perturbed_symbol, quadratic_form_symbol
from tests.conftest import gaussian_field, random_field

EUCLID_1D = euclidean_symbol(1)
ELLIPSE = quadratic_form_symbol(np.diag([1.0, 4.0]))


class TestTimeWindow:
    def test_weights_sum_to_horizon(self):
        for horizon, steps in ((1.0, 2), (4.0, 129), (0.3, 7)):
            w = TimeWindow(horizon, steps)
            assert w.weights().sum() == pytest.approx(horizon, rel=1e-12)
            assert w.nodes()[0] == 0.0
            assert w.nodes()[-1] == pytest.approx(horizon)

    def test_validation(self):
        with pytest.raises(ValueError):
            TimeWindow(-1.0, 4)
        with pytest.raises(ValueError):
            TimeWindow(1.0, 1)

    def test_space_time_field_checks_slices(self):
        g = make_grid(1, 4.0, 8)
        w = TimeWindow(1.0, 3)
        with pytest.raises(ValueError):
            SpaceTimeField(w, (random_field(g),))


class TestPropagate:
    def test_initial_slice_is_data(self):
        g = make_grid(1, 8.0, 64)
        f = gaussian_field(g)
        st = propagate(EUCLID_1D, f, TimeWindow(1.0, 5))
        assert np.max(np.abs(st.slices[0].values - f.values)) < 1e-14

    def test_grid_mode_picks_up_phase(self):
        g = make_grid(1, 8.0, 64)
        k = 5 * g.dxi
        mode = Field(g, np.exp(1j * k * g.spatial_mesh()[..., 0]))
        t_end = 0.3
        st = propagate(EUCLID_1D, mode, TimeWindow(t_end, 4))
        expected = np.exp(1j * t_end * k**2) * mode.values
        assert np.max(np.abs(st.slices[-1].values - expected)) < 1e-12

    def test_gaussian_closed_form(self):
        # oracle: complex-Gaussian formula for the free evolution of
        # exp(-x^2/2): u(t, x) = (1 - 2 i t)^{-1/2} exp(-x^2 / (2 (1 - 2 i t)))
        g = make_grid(1, 16.0, 512)
        x = g.spatial_mesh()[..., 0]
        f = Field(g, np.exp(-x * x / 2.0))
        t_end = 0.5
        st = propagate(EUCLID_1D, f, TimeWindow(t_end, 2))
        exact = np.exp(-x * x / (2.0 * (1.0 - 2j * t_end))) / np.sqrt(1.0 - 2j * t_end)
        interior = np.abs(x) < 8.0
        err = np.max(np.abs(st.slices[-1].values[interior] - exact[interior]))
        assert err < 1e-6 * np.max(np.abs(exact))

    def test_unitarity_all_slices(self):
        g = make_grid(2, 6.0, 16)
        f = random_field(g, seed=3)
        st = propagate(quadratic_form_symbol(np.diag([1.0, 4.0])), f, TimeWindow(2.0, 9))
        base = norm(f)
        for s in st.slices:
            assert abs(norm(s) - base) / base < 1e-12

    def test_group_property(self):
        g = make_grid(1, 8.0, 64)
        f = gaussian_field(g, sigma=0.8)
        first = propagate(EUCLID_1D, f, TimeWindow(0.4, 5))
        second = propagate(EUCLID_1D, first.slices[-1], TimeWindow(0.4, 5))
        joint = propagate(EUCLID_1D, f, TimeWindow(0.8, 9))
        for got, want in zip(second.slices, joint.slices[4:]):
            assert np.max(np.abs(got.values - want.values)) < 1e-10

    def test_time_reversal(self):
        g = make_grid(1, 8.0, 64)
        f = random_field(g, seed=9)
        t_end = 0.7
        fwd = propagate(EUCLID_1D, f, TimeWindow(t_end, 3)).slices[-1]
        back = propagate(EUCLID_1D, Field(g, np.conj(fwd.values)), TimeWindow(t_end, 3)).slices[-1]
        recovered = np.conj(back.values)
        assert np.max(np.abs(recovered - f.values)) < 1e-10 * np.max(np.abs(f.values))

    def test_homogeneous_symbol_zero_frequency_convention(self):
        g = make_grid(1, 8.0, 16)
        vals = symbol_on_grid(perturbed_symbol(EUCLID_1D, 0.2, [1.0]), g)
        assert vals[g.points_per_axis // 2] == 0.0
        assert np.all(np.isfinite(vals))


class TestSmoothingFunctional:
    def test_zero_data(self):
        g = make_grid(1, 8.0, 32)
        val = smoothing_functional(EUCLID_1D, Field(g, np.zeros(g.shape)), TimeWindow(1.0, 5), 1.0)
        assert val == 0.0

    def test_grid_mode_closed_form(self):
        # oracle: |u(t,x)| = 1 for a single mode, so the functional factors
        # into sqrt(T) <k>^(1/2) ||<x>^{-1}||
        g = make_grid(1, 8.0, 64)
        k = 3 * g.dxi
        mode = Field(g, np.exp(1j * k * g.spatial_mesh()[..., 0]))
        horizon = 2.0
        val = smoothing_functional(EUCLID_1D, mode, TimeWindow(horizon, 41), 1.0, "inhomogeneous")
        x = g.spatial_mesh()[..., 0]
        weight_norm = np.sqrt(np.sum((1.0 + x * x) ** -1) * g.dx)
        expected = np.sqrt(horizon) * (1.0 + k * k) ** 0.25 * weight_norm
        assert val == pytest.approx(expected, rel=1e-12)

    def test_refinement_convergence(self):
        g1 = make_grid(1, 16.0, 256)
        g2 = make_grid(1, 16.0, 512)
        vals = []
        for g, steps in ((g1, 33), (g2, 65)):
            f = gaussian_field(g, sigma=1.0)
            vals.append(
                smoothing_functional(EUCLID_1D, f, TimeWindow(1.0, steps), 1.0) / norm(f)
            )
        assert abs(vals[1] - vals[0]) / vals[0] < 0.01

    def test_homogeneous_kind_zeroes_constant_mode(self):
        g = make_grid(1, 8.0, 32)
        const = Field(g, np.ones(g.shape))
        val = smoothing_functional(EUCLID_1D, const, TimeWindow(1.0, 5), 1.0, "homogeneous")
        assert val == pytest.approx(0.0, abs=1e-12)


class TestSmoothingConstant:
    def test_tiny_window_bound(self):
        g = make_grid(1, 8.0, 32)
        horizon = 1e-4
        est = smoothing_constant(EUCLID_1D, g, TimeWindow(horizon, 2), 1.0, tol=1e-8, max_iters=200)
        xi = g.frequency_mesh()
        cap = np.sqrt(horizon) * np.max((1.0 + np.sum(xi * xi, axis=-1)) ** 0.25)
        assert est.estimate <= cap * (1 + 1e-6)
        assert est.estimate < 0.1

    def test_dominates_rayleigh_quotients(self):
        g = make_grid(1, 8.0, 32)
        window = TimeWindow(1.0, 17)
        est = smoothing_constant(EUCLID_1D, g, window, 1.0, tol=1e-8, max_iters=400)
        for seed in range(5):
            f = random_field(g, seed=seed)
            quotient = smoothing_functional(EUCLID_1D, f, window, 1.0) / norm(f)
            assert est.estimate >= quotient * (1.0 - 1e-6)

    def test_monotone_in_horizon_with_nested_nodes(self):
        g = make_grid(1, 8.0, 32)
        prev = 0.0
        for horizon, steps in ((1.0, 9), (2.0, 17), (4.0, 33)):
            est = smoothing_constant(
                EUCLID_1D, g, TimeWindow(horizon, steps), 1.0, tol=1e-9, max_iters=500
            )
            assert est.converged
            assert est.estimate >= prev - 1e-10
            prev = est.estimate


class TestHalfDerivativeRatio:
    def test_identity_for_euclidean(self):
        g = make_grid(1, 8.0, 64)
        u = random_field(g, seed=4)
        out = apply_half_derivative_ratio(EUCLID_1D, u)
        assert np.max(np.abs(out.values - u.values)) < 1e-13 * np.max(np.abs(u.values))

    def test_grid_mode_scaling(self):
        g = make_grid(2, 6.0, 16)
        p = ELLIPSE
        k_idx = (2, -3)
        k = np.array(k_idx) * g.dxi
        mode = Field(g, np.exp(1j * np.einsum("...i,i->...", g.spatial_mesh(), k)))
        out = apply_half_derivative_ratio(p, mode)
        factor = (1.0 + k @ k) ** 0.25 * (1.0 + p.evaluate(k) ** 2) ** -0.25
        np.testing.assert_allclose(out.values, factor * mode.values, rtol=1e-12)

    def test_multiplier_range_matches_direct_scan(self):
        # oracle: direct extremes of the multiplier over grid frequencies
        g = make_grid(2, 6.0, 32)
        p2 = symbol_on_grid(ELLIPSE, g) ** 2
        mesh = g.frequency_mesh()
        mult = (1.0 + np.sum(mesh * mesh, axis=-1)) ** 0.25 * (1.0 + p2) ** -0.25
        # eigenvalue range of A = diag(1,4) bounds p^2 between |xi|^2 and 4|xi|^2
        mag2 = np.sum(mesh * mesh, axis=-1)
        lower = (1.0 + mag2) ** 0.25 * (1.0 + 4.0 * mag2) ** -0.25
        assert np.max(mult) <= 1.0 + 1e-12
        assert np.min(mult - lower) >= -1e-12


class TestEgorovResidual:
    def test_euclidean_symbol_is_exact(self):
        # N = 64 keeps the Gaussian's Nyquist content at rounding level so
        # the identity-map transform is exact
        g = make_grid(2, 10.0, 64)
        u = gaussian_field(g, sigma=1.0)
        assert egorov_residual(euclidean_symbol(2), u) < 1e-12

    def test_scaled_euclidean_small_residual(self):
        # psi = 2 xi and |psi(xi)|^2 = 4 |xi|^2 = p(xi)^2 exactly; the
        # discrete residual is pure interpolation error
        g = make_grid(1, 12.0, 256)
        u = gaussian_field(g, sigma=0.8)
        res = egorov_residual(quadratic_form_symbol(np.array([[4.0]])), u)
        assert res < 1e-8

    def test_ellipse_residual_shrinks_under_refinement(self):
        residuals = {}
        for n_pts in (64, 128):
            g = make_grid(2, 10.0, n_pts)
            u = gaussian_field(g, sigma=1.2, carrier=[5.0, 0.0])
            residuals[n_pts] = egorov_residual(ELLIPSE, u)
        assert residuals[128] < residuals[64] / 1.5
