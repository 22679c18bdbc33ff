"""Spectral substrate: grids, transforms, multiplier operators."""

import numpy as np
import pytest

from oldroyd_lab.grid import (
    GridMismatchError,
    ScalarField,
    SymTensorField,
    VectorField,
    build_grid,
)
from oldroyd_lab.spectral import (
    MeanViolationError,
    dealias_arr,
    div_arr,
    divergence,
    grad_arr,
    gradient,
    inv_lap_arr,
    inv_laplacian,
    l2_norm_arr,
    lambda_power,
    lambda_power_arr,
    lap_arr,
    laplacian,
    leray_P,
    leray_Q,
    leray_split_arr,
)

import dft_oracle as oracle


def rand_scalar(grid, rng):
    noise = rng.standard_normal(grid.shape)
    return grid.irfft(grid.nyquist_free_mask * grid.rfft(noise))


class TestBuildGrid:
    def test_modes_match_frequencies_on_2pi_box(self):
        grid = build_grid(2, 8, 2.0 * np.pi)
        assert sorted(grid.modes.tolist()) == list(range(-4, 4))
        # on a 2 pi box the frequency equals the integer mode
        assert np.allclose(np.sort(np.unique(grid.kd[0])), [-3, -2, -1, 0, 1, 2, 3])

    def test_point_count_3d(self):
        grid = build_grid(3, 16, 2.0 * np.pi)
        assert grid.npoints == 4096
        assert grid.shape == (16, 16, 16)

    @pytest.mark.parametrize("dim,n,box", [
        (2, 7, 2 * np.pi),   # odd
        (2, 6, 2 * np.pi),   # too small
        (4, 8, 2 * np.pi),   # bad dim
        (2, 8, 0.0),         # bad length
        (2, 8, -1.0),
    ])
    def test_rejects_bad_grids(self, dim, n, box):
        with pytest.raises(ValueError):
            build_grid(dim, n, box)

    def test_round_trip(self, grid32, rng):
        f = rng.standard_normal(grid32.shape)
        back = grid32.irfft(grid32.rfft(f))
        assert np.max(np.abs(back - f)) < 1e-12 * np.max(np.abs(f))

    def test_real_fields_have_hermitian_full_spectrum(self, grid16, rng):
        f = rng.standard_normal(grid16.shape)
        c = np.fft.fftn(f)
        flipped = np.conj(c[np.ix_(*[(-np.arange(n)) % n for n in grid16.shape])])
        assert np.max(np.abs(c - flipped)) < 1e-9 * np.max(np.abs(c))


class TestDerivatives:
    def test_gradient_of_sin(self, grid32):
        x, y = grid32.coords()
        f = ScalarField(grid32, np.sin(x))
        g = gradient(f)
        assert np.max(np.abs(g.values[0] - np.cos(x))) < 1e-12
        assert np.max(np.abs(g.values[1])) < 1e-13

    def test_divergence_of_rotational_field(self, grid32):
        x, y = grid32.coords()
        v = VectorField(grid32, np.stack([-np.sin(y), np.sin(x)]))
        assert np.max(np.abs(divergence(v).values)) < 1e-13

    def test_laplacian_eigenfunction(self, grid32):
        x, _ = grid32.coords()
        f = ScalarField(grid32, np.cos(x))
        assert np.max(np.abs(laplacian(f).values + np.cos(x))) < 1e-12

    def test_tensor_divergence(self, grid32):
        x, y = grid32.coords()
        comps = np.stack([np.sin(x), np.zeros_like(x), np.sin(y)])
        tau = SymTensorField(grid32, comps)
        dv = divergence(tau)
        assert np.max(np.abs(dv.values[0] - np.cos(x))) < 1e-12
        assert np.max(np.abs(dv.values[1] - np.cos(y))) < 1e-12

    def test_grid_mismatch_rejected(self, grid32, grid16):
        from oldroyd_lab.grid import check_same_grid

        a = ScalarField(grid32, np.zeros(grid32.shape))
        b = ScalarField(grid16, np.zeros(grid16.shape))
        with pytest.raises(GridMismatchError):
            check_same_grid(a, b)


class TestLeray:
    def test_pure_gradient_goes_to_Q(self, grid32):
        x, _ = grid32.coords()
        v = VectorField(grid32, grad_arr(grid32, np.sin(x)))
        assert np.max(np.abs(leray_P(v).values)) < 1e-13
        assert np.max(np.abs(leray_Q(v).values - v.values)) < 1e-13

    def test_divergence_free_goes_to_P(self, grid32):
        x, y = grid32.coords()
        v = VectorField(grid32, np.stack([-np.sin(y), np.sin(x)]))
        assert np.max(np.abs(leray_Q(v).values)) < 1e-13
        assert np.max(np.abs(leray_P(v).values - v.values)) < 1e-13

    def test_idempotency_against_oracle_at_n8(self, rng):
        grid = build_grid(2, 8, 2.0 * np.pi)
        v = rng.standard_normal((2, 8, 8))
        p, q = leray_split_arr(grid, v)
        p2, _ = leray_split_arr(grid, p)
        assert np.max(np.abs(p2 - p)) < 1e-12
        po, qo = oracle.oracle_leray(v, grid.box_length)
        assert np.max(np.abs(p - po)) < 1e-10
        assert np.max(np.abs(q - qo)) < 1e-10

    def test_mean_flow_assigned_to_P(self, grid32):
        v = VectorField(grid32, np.stack([np.ones(grid32.shape),
                                          2.0 * np.ones(grid32.shape)]))
        assert np.max(np.abs(leray_P(v).values - v.values)) < 1e-14
        assert np.max(np.abs(leray_Q(v).values)) < 1e-14

    def test_q_equals_grad_invlap_div(self, grid32, rng):
        v = rand_scalar(grid32, rng), rand_scalar(grid32, rng)
        v = np.stack(v)
        _, q = leray_split_arr(grid32, v)
        alt = grad_arr(grid32, inv_lap_arr(grid32, div_arr(grid32, v)))
        assert np.max(np.abs(q - alt)) < 1e-12 * max(1.0, np.max(np.abs(v)))


class TestInverseLaplacian:
    def test_eigenfunctions(self, grid32):
        x, y = grid32.coords()
        f = ScalarField(grid32, -np.sin(x))
        assert np.max(np.abs(inv_laplacian(f).values - np.sin(x))) < 1e-13
        g = ScalarField(grid32, np.cos(2 * y))
        assert np.max(np.abs(inv_laplacian(g).values + np.cos(2 * y) / 4)) < 1e-13

    def test_constant_rejected_in_strict_mode(self, grid32):
        f = ScalarField(grid32, np.ones(grid32.shape))
        with pytest.raises(MeanViolationError):
            inv_laplacian(f, strict=True)

    def test_mean_annihilated_when_not_strict(self, grid32):
        f = ScalarField(grid32, np.ones(grid32.shape))
        assert np.max(np.abs(inv_laplacian(f, strict=False).values)) < 1e-14


class TestLambdaPower:
    def test_plane_wave_magnitude(self, grid32):
        x, y = grid32.coords()
        f = np.cos(3 * x + 4 * y)
        out = lambda_power_arr(grid32, f, 1.0)
        assert np.max(np.abs(out - 5.0 * f)) < 1e-11

    def test_lambda_squared_is_minus_laplacian(self, grid32, rng):
        f = rng.standard_normal(grid32.shape)
        lam2 = lambda_power_arr(grid32, lambda_power_arr(grid32, f, 1.0), 1.0)
        assert np.max(np.abs(lam2 + lap_arr(grid32, f))) < 1e-12 * np.max(np.abs(lap_arr(grid32, f)))

    def test_power_zero_is_identity(self, grid32, rng):
        f = rng.standard_normal(grid32.shape) + 3.0
        assert np.array_equal(lambda_power_arr(grid32, f, 0.0), f)

    def test_negative_power_strict_guard(self, grid32):
        f = ScalarField(grid32, np.ones(grid32.shape))
        with pytest.raises(MeanViolationError):
            lambda_power(f, -1.0, strict=True)


class TestDealias:
    def test_band_limited_unchanged(self, grid32):
        x, _ = grid32.coords()
        f = np.cos(5 * x)  # mode 5 <= 32/3
        assert np.max(np.abs(dealias_arr(grid32, f) - f)) < 1e-13

    def test_top_mode_removed(self, grid32):
        x, _ = grid32.coords()
        f = np.cos((grid32.n_per_axis // 2 - 1) * x)
        assert np.max(np.abs(dealias_arr(grid32, f))) < 1e-13

    def test_idempotent(self, grid32, rng):
        f = rng.standard_normal(grid32.shape)
        once = dealias_arr(grid32, f)
        twice = dealias_arr(grid32, once)
        assert np.max(np.abs(twice - once)) < 1e-13


class TestInvariants:
    def test_parseval_100_random_fields(self, grid32, rng):
        for _ in range(100):
            f = rng.standard_normal(grid32.shape)
            phys = np.sqrt(grid32.vol * np.mean(f * f))
            c = grid32.rfft(f)
            spec = np.sqrt(grid32.vol * grid32.spectral_sumsq(c) / grid32.npoints**2)
            assert abs(phys - spec) < 1e-10 * phys

    def test_projector_algebra(self, grid32, rng):
        for _ in range(10):
            v = np.stack([rand_scalar(grid32, rng), rand_scalar(grid32, rng)])
            p, q = leray_split_arr(grid32, v)
            scale = np.max(np.abs(v))
            assert np.max(np.abs(p + q - v)) < 1e-12 * scale
            p2, q2 = leray_split_arr(grid32, p)
            assert np.max(np.abs(p2 - p)) < 1e-12 * scale
            assert np.max(np.abs(q2)) < 1e-12 * scale
            assert np.max(np.abs(div_arr(grid32, p))) < 1e-12 * np.max(np.abs(div_arr(grid32, v)))

    def test_lambda_commutes_with_leray(self, grid32, rng):
        v = np.stack([rand_scalar(grid32, rng), rand_scalar(grid32, rng)])
        lam_then_p = leray_split_arr(grid32, lambda_power_arr(grid32, v, 1.0))[0]
        p_then_lam = lambda_power_arr(grid32, leray_split_arr(grid32, v)[0], 1.0)
        assert np.max(np.abs(lam_then_p - p_then_lam)) < 1e-12 * np.max(np.abs(v))

    def test_every_operator_matches_dft_oracle_at_n8(self, rng):
        grid = build_grid(2, 8, 2.0 * np.pi)
        f = rng.standard_normal(grid.shape)
        v = rng.standard_normal((2, 8, 8))
        L = grid.box_length
        checks = [
            (grad_arr(grid, f), oracle.oracle_gradient(f, L)),
            (div_arr(grid, v), oracle.oracle_divergence(v, L)),
            (lap_arr(grid, f), oracle.oracle_laplacian(f, L)),
            (inv_lap_arr(grid, f), oracle.oracle_inv_laplacian(f, L)),
            (lambda_power_arr(grid, f, 1.5), oracle.oracle_lambda_power(f, L, 1.5)),
            (lambda_power_arr(grid, f, -1.0), oracle.oracle_lambda_power(f, L, -1.0)),
            (dealias_arr(grid, f), oracle.oracle_dealias(f, L)),
        ]
        for got, want in checks:
            assert np.max(np.abs(got - want)) < 1e-10

    def test_l2_norm_of_sin(self, grid32):
        x, _ = grid32.coords()
        got = l2_norm_arr(grid32, np.sin(x))
        assert abs(got - np.sqrt(grid32.vol / 2.0)) < 1e-12
