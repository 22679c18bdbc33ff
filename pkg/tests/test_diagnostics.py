"""Norms, energy functionals, conserved quantities, decay fits."""

import math

import numpy as np
import pytest

from oldroyd_lab.diagnostics import (
    conserved_quantities,
    decay_targets,
    energy_functionals,
    fit_decay,
    measure,
    perturbation_view,
    sobolev_norm,
)
from oldroyd_lab.grid import ScalarField, build_grid
from oldroyd_lab.lp import BesovNormSpec, besov_norm, build_blocks
from oldroyd_lab.params import DEFAULT_PARAMS
from oldroyd_lab.spectral import lambda_power_arr
from oldroyd_lab.states import CauchyState, TorusState

P = DEFAULT_PARAMS


def band_limited(grid, rng, amplitude, max_mode=5):
    out = np.zeros(grid.shape)
    coords = grid.coords()
    for _ in range(6):
        modes = rng.integers(-max_mode, max_mode + 1, grid.dim)
        if not np.any(modes):
            continue
        out += rng.standard_normal() * np.cos(
            sum(m * x for m, x in zip(modes, coords)) + rng.uniform(0, 2 * np.pi)
        )
    m = np.max(np.abs(out))
    return amplitude * out / m if m > 0 else out


class TestSobolev:
    def test_l2_of_sin(self, grid32):
        x, _ = grid32.coords()
        f = ScalarField(grid32, np.sin(x))
        got = sobolev_norm(f, 0)
        assert abs(got - math.sqrt(grid32.vol / 2.0)) < 1e-12

    def test_h1_weight_on_unit_mode(self, grid32):
        x, _ = grid32.coords()
        f = ScalarField(grid32, np.sin(x))
        assert abs(sobolev_norm(f, 1) - math.sqrt(2.0) * sobolev_norm(f, 0)) < 1e-12

    def test_zero_field(self, grid32):
        f = ScalarField(grid32, np.zeros(grid32.shape))
        assert sobolev_norm(f, 3) == 0.0

    def test_rejects_bad_order(self, grid32):
        f = ScalarField(grid32, np.zeros(grid32.shape))
        with pytest.raises(ValueError):
            sobolev_norm(f, 5)


class TestEnergyFunctionals:
    def test_zero_state(self, grid32):
        blocks = build_blocks(grid32)
        st = CauchyState.equilibrium(grid32, P)
        e_inf, e_1 = energy_functionals(st, P, blocks)
        assert e_inf == 0.0 and e_1 == 0.0

    def test_low_frequency_stress_only(self, grid32):
        blocks = build_blocks(grid32, k0=2)
        x, _ = grid32.coords()
        tau = grid32.zeros(3)
        tau[1] = 0.01 * np.cos(x)  # |xi| = 1, entirely below 3/4 * 2^2
        st = CauchyState.equilibrium(grid32, P).replace(tau=tau)
        e_inf, e_1 = energy_functionals(st, P, blocks)
        from oldroyd_lab.grid import SymTensorField

        expected = besov_norm(SymTensorField(grid32, tau),
                              BesovNormSpec(s=1.0, p=2, r=1, part="low"), blocks)
        assert abs(e_inf - expected) < 1e-12 * expected
        assert abs(e_1 - expected) < 1e-12 * expected

    def test_matches_hand_assembled_sum(self, grid32, rng):
        from oldroyd_lab.grid import SymTensorField, VectorField

        blocks = build_blocks(grid32)
        st = CauchyState(
            grid32,
            n=band_limited(grid32, rng, 1e-3),
            u=np.stack([band_limited(grid32, rng, 1e-3) for _ in range(2)]),
            tau=np.stack([band_limited(grid32, rng, 1e-3) for _ in range(3)]),
            eta=band_limited(grid32, rng, 1e-3),
        )
        e_inf, _ = energy_functionals(st, P, blocks)
        d2 = grid32.dim / 2.0

        def B(field, s, part):
            return besov_norm(field, BesovNormSpec(s=s, p=2, r=1, part=part), blocks)

        lam = lambda arr: lambda_power_arr(grid32, arr, 1.0)
        hand = (
            B(ScalarField(grid32, st.n), d2 - 1, "low")
            + B(VectorField(grid32, st.u), d2 - 1, "low")
            + B(ScalarField(grid32, st.eta), d2 - 1, "low")
            + B(SymTensorField(grid32, st.tau), d2, "low")
            + B(ScalarField(grid32, lam(st.n)), d2 + 1, "high")
            + B(VectorField(grid32, st.u), d2 + 1, "high")
            + B(SymTensorField(grid32, lam(st.tau)), d2 + 1, "high")
            + B(ScalarField(grid32, lam(st.eta)), d2 + 1, "high")
        )
        assert abs(e_inf - hand) < 1e-12 * hand

    def test_degree_one_homogeneity(self, grid32, rng):
        blocks = build_blocks(grid32)
        st = CauchyState(
            grid32,
            n=band_limited(grid32, rng, 1e-3),
            u=np.stack([band_limited(grid32, rng, 1e-3) for _ in range(2)]),
            tau=np.stack([band_limited(grid32, rng, 1e-3) for _ in range(3)]),
            eta=band_limited(grid32, rng, 1e-3),
        )
        e_inf, e_1 = energy_functionals(st, P, blocks)
        scaled = st.scaled(4.0)
        e_inf4, e_14 = energy_functionals(scaled, P, blocks)
        assert abs(e_inf4 - 4.0 * e_inf) < 1e-12 * e_inf4
        assert abs(e_14 - 4.0 * e_1) < 1e-12 * e_14


class TestConserved:
    def test_uniform_density_at_rest_unit_box(self):
        grid = build_grid(2, 16, 1.0)  # unit-volume torus
        st = TorusState(grid, P=np.ones(grid.shape), u=grid.zeros(2),
                        eta=np.ones(grid.shape), tau=grid.zeros())
        mass, eta_mass, mom = conserved_quantities(st, P)
        assert abs(mass - 1.0) < 1e-14
        assert abs(eta_mass - 1.0) < 1e-14
        assert np.max(np.abs(mom)) < 1e-14

    def test_constant_velocity_momentum(self):
        grid = build_grid(2, 32, 2.0 * np.pi)
        x, _ = grid.coords()
        c = 0.3
        rho = 1.0 + 0.1 * np.cos(x)
        st = TorusState(grid, P=P.R * rho**P.gamma, u=np.stack(
            [np.full(grid.shape, c), np.zeros(grid.shape)]),
            eta=np.ones(grid.shape), tau=grid.zeros())
        mass, _, mom = conserved_quantities(st, P)
        # the cosine integrates to zero: momentum = vol * c
        assert abs(mom[0] - grid.vol * c) < 1e-10
        assert abs(mom[1]) < 1e-12

    def test_perturbation_view_tau_is_shifted_stress(self, grid32, rng):
        from oldroyd_lab.states import PrimitiveState

        eta = 0.5 + 0.1 * band_limited(grid32, rng, 1.0)
        sigma = np.stack([P.K * eta, np.zeros(grid32.shape), P.K * eta])
        st = PrimitiveState(grid32, rho=np.full(grid32.shape, P.rho_bar),
                            v=grid32.zeros(2), sigma=sigma, eta=eta)
        view = perturbation_view(st, P)
        assert np.max(np.abs(view.tau.values)) < 1e-13


class TestMeasure:
    def test_lambda_columns(self, grid32, rng):
        blocks = build_blocks(grid32)
        st = CauchyState(
            grid32,
            n=band_limited(grid32, rng, 1e-3),
            u=np.stack([band_limited(grid32, rng, 1e-3) for _ in range(2)]),
            tau=np.stack([band_limited(grid32, rng, 1e-3) for _ in range(3)]),
            eta=band_limited(grid32, rng, 1e-3),
        )
        rec = measure(st, P, blocks, lambda_specs=((0.0, "nu"), (1.0, "tau")))
        assert "lambda0_nu" in rec.lambda_norms
        assert "lambda1_tau" in rec.lambda_norms
        from oldroyd_lab.spectral import l2_norm_arr

        want = l2_norm_arr(grid32, st.n) + l2_norm_arr(grid32, st.u)
        assert abs(rec.lambda_norms["lambda0_nu"] - want) < 1e-12


class TestFitDecay:
    def test_exact_algebraic(self):
        t = np.linspace(1.0, 100.0, 300)
        fit = fit_decay(list(zip(t, (1 + t) ** -0.75)), "algebraic", (1.0, 100.0))
        assert abs(fit.exponent_or_rate + 0.75) < 1e-6
        assert fit.r_squared >= 1.0 - 1e-12

    def test_exact_exponential(self):
        t = np.linspace(0.0, 20.0, 200)
        fit = fit_decay(list(zip(t, 5.0 * np.exp(-0.3 * t))), "exponential",
                        (0.0, 20.0))
        assert abs(fit.exponent_or_rate - 0.3) < 1e-6
        assert abs(fit.amplitude - 5.0) < 1e-6
        assert fit.r_squared >= 1.0 - 1e-12

    def test_perturbed_algebraic_within_tolerance(self):
        t = np.linspace(1.0, 100.0, 500)
        y = (1 + t) ** -0.5 * (1.0 + 0.01 * np.sin(t))
        fit = fit_decay(list(zip(t, y)), "algebraic", (1.0, 100.0))
        assert abs(fit.exponent_or_rate + 0.5) < 0.01

    def test_rejects_nonpositive_samples(self):
        t = np.linspace(0.0, 1.0, 20)
        y = np.linspace(1.0, -0.1, 20)
        with pytest.raises(ValueError):
            fit_decay(list(zip(t, y)), "exponential", (0.0, 1.0))

    def test_rejects_few_samples(self):
        t = np.linspace(0.0, 1.0, 5)
        with pytest.raises(ValueError):
            fit_decay(list(zip(t, np.exp(-t))), "exponential", (0.0, 1.0))

    def test_rejects_bad_window(self):
        t = np.linspace(0.0, 1.0, 20)
        with pytest.raises(ValueError):
            fit_decay(list(zip(t, np.exp(-t))), "exponential", (1.0, 0.0))

    def test_rejects_unknown_model(self):
        t = np.linspace(0.0, 1.0, 20)
        with pytest.raises(ValueError):
            fit_decay(list(zip(t, np.exp(-t))), "powerlaw", (0.0, 1.0))


class TestDecayTargets:
    def test_paper_benchmark_point(self):
        # d=3, s=3/2, beta=0 for the velocity/pressure pair: the heat rate
        assert decay_targets(3, 1.5, 0.0, "nu") == -0.75

    def test_two_dimensional_endpoint(self):
        assert decay_targets(2, 1.0, 0.0, "nu") == -0.5

    def test_stress_group(self):
        assert decay_targets(3, 1.5, 1.0, "tau") == -0.75

    def test_beta_out_of_range(self):
        with pytest.raises(ValueError):
            decay_targets(2, 1.0, 2.0, "tau")
        with pytest.raises(ValueError):
            decay_targets(2, 1.0, -2.0, "nu")

    def test_s_out_of_range(self):
        with pytest.raises(ValueError):
            decay_targets(2, 1.5, 0.0, "nu")
        with pytest.raises(ValueError):
            decay_targets(3, -0.5, 0.0, "nu")

    def test_unknown_group(self):
        with pytest.raises(ValueError):
            decay_targets(2, 1.0, 0.0, "eta")
