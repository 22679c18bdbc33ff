"""Model right-hand sides: fixed points, spec examples, cross-checks."""

import numpy as np
import pytest

from oldroyd_lab.grid import SYM_INDEX, build_grid
from oldroyd_lab.models import (
    good_unknowns,
    primitive_tendency_to_cauchy,
    rhs_cauchy,
    rhs_effective,
    rhs_for,
    rhs_primitive,
    rhs_torus,
    torus_tendency_to_effective,
)
from oldroyd_lab.params import DEFAULT_PARAMS, DerivedConstants, effective_coupling
from oldroyd_lab.spectral import div_arr, grad_arr, lambda_power_arr
from oldroyd_lab.states import (
    CauchyState,
    EffectiveState,
    PrimitiveState,
    TorusState,
    VacuumError,
    a_tilde_of,
    map_states,
    recover_rho,
)

P = DEFAULT_PARAMS
C = DerivedConstants.from_params(P)


def band_limited(grid, rng, amplitude, max_mode=5):
    out = np.zeros(grid.shape)
    coords = grid.coords()
    for _ in range(6):
        modes = rng.integers(-max_mode, max_mode + 1, grid.dim)
        if not np.any(modes):
            continue
        phase = rng.uniform(0, 2 * np.pi)
        out += rng.standard_normal() * np.cos(
            sum(m * x for m, x in zip(modes, coords)) + phase
        )
    m = np.max(np.abs(out))
    return amplitude * out / m if m > 0 else out


def small_cauchy(grid, rng, amp=1e-2):
    return CauchyState(
        grid,
        n=band_limited(grid, rng, amp),
        u=np.stack([band_limited(grid, rng, amp) for _ in range(2)]),
        tau=np.stack([band_limited(grid, rng, amp / 10) for _ in range(3)]),
        eta=0.02 + 0.3 * band_limited(grid, rng, amp),
    )


class TestEquilibria:
    @pytest.mark.parametrize("cls", [PrimitiveState, CauchyState, TorusState,
                                     EffectiveState])
    def test_zero_tendency(self, grid32, cls):
        st = cls.equilibrium(grid32, P)
        te = rhs_for(st, P)
        worst = max(np.max(np.abs(a)) for a in te.arrays().values())
        assert worst <= 1e-13


class TestPrimitiveExamples:
    def test_stress_source_with_rest_fluid(self, grid32):
        # v = 0, sigma = 0, eta = eta_bar: only the relaxation source acts
        st = PrimitiveState(
            grid32,
            rho=np.full(grid32.shape, P.rho_bar),
            v=grid32.zeros(2),
            sigma=grid32.zeros(3),
            eta=np.full(grid32.shape, P.eta_bar),
        )
        te = rhs_primitive(st, P)
        source = P.K * P.A0 / (2 * P.lambda1) * P.eta_bar
        assert np.allclose(te.sigma[0], source, atol=1e-13)
        assert np.allclose(te.sigma[2], source, atol=1e-13)
        assert np.max(np.abs(te.sigma[1])) < 1e-13
        assert np.max(np.abs(te.rho)) < 1e-13

    def test_no_transport_without_velocity(self, grid32, rng):
        st = PrimitiveState(
            grid32,
            rho=np.full(grid32.shape, P.rho_bar),
            v=grid32.zeros(2),
            sigma=grid32.zeros(3),
            eta=0.5 + 0.1 * band_limited(grid32, rng, 1.0),
        )
        te = rhs_primitive(st, P)
        assert np.max(np.abs(te.rho)) < 1e-13
        assert np.max(np.abs(te.eta)) < 1e-13

    def test_vacuum_guard(self, grid32):
        st = PrimitiveState.equilibrium(grid32, P)
        st.rho[0, 0] = -1.0
        with pytest.raises(VacuumError):
            rhs_primitive(st, P)


class TestCauchyExamples:
    def test_rest_state_momentum_matches_direct_form(self, grid32, rng):
        # u = 0, tau = 0: the transformed momentum equation reduces to
        # du/dt = -(1 / (alpha (a + rho_bar))) grad n, evaluated pointwise
        n = band_limited(grid32, rng, 1e-2)
        eta = 0.02 + 0.3 * band_limited(grid32, rng, 1e-2)
        st = CauchyState(grid32, n=n, u=grid32.zeros(2),
                         tau=grid32.zeros(3), eta=eta)
        te = rhs_cauchy(st, P, do_dealias=False)
        rho = recover_rho(n, eta, P)
        direct = -grad_arr(grid32, n) / (C.alpha * rho)
        scale = np.max(np.abs(direct))
        assert np.max(np.abs(te.u - direct)) < 1e-10 * scale
        assert np.max(np.abs(te.eta)) < 1e-13
        # n moves only through the (vanishing) velocity
        assert np.max(np.abs(te.n)) < 1e-13

    def test_chain_rule_oracle_from_primitive(self, rng):
        # band-limited primitive states at N=64 keep the discrete product
        # rule exact well below the 1e-8 oracle tolerance
        grid = build_grid(2, 64, 2.0 * np.pi)
        for _ in range(5):
            eta = 0.02 + 0.3 * band_limited(grid, rng, 1e-2)
            sigma = np.stack([band_limited(grid, rng, 1e-3) for _ in range(3)])
            sigma[0] += P.K * eta
            sigma[2] += P.K * eta
            prim = PrimitiveState(
                grid,
                rho=P.rho_bar + band_limited(grid, rng, 1e-2),
                v=np.stack([band_limited(grid, rng, 1e-2) for _ in range(2)]),
                sigma=sigma,
                eta=eta,
            )
            mapped = primitive_tendency_to_cauchy(prim, rhs_primitive(prim, P), P)
            direct = rhs_cauchy(map_states(prim, "cauchy", P), P)
            scale = max(np.max(np.abs(a)) for a in direct.arrays().values())
            for name in ("n", "u", "tau", "eta"):
                err = np.max(np.abs(getattr(mapped, name) - getattr(direct, name)))
                assert err < 1e-8 * scale


class TestTorusExamples:
    def test_pure_stress_damping_at_rest(self, grid32, rng):
        tau0 = band_limited(grid32, rng, 0.1) ** 2
        st = TorusState(grid32, P=np.ones(grid32.shape), u=grid32.zeros(2),
                        eta=np.ones(grid32.shape), tau=tau0)
        te = rhs_torus(st, P)
        assert np.max(np.abs(te.tau + tau0)) < 1e-12

    def test_nonpositive_pressure_rejected(self, grid32):
        st = TorusState.equilibrium(grid32, P)
        st.P[0, 0] = 0.0
        with pytest.raises(VacuumError):
            rhs_torus(st, P)


class TestEffectiveExamples:
    def test_chain_rule_consistency_of_a_tilde(self, grid32, rng):
        pp = band_limited(grid32, rng, 1e-2)
        b = band_limited(grid32, rng, 1e-2)
        st = EffectiveState(
            grid32, a_tilde=a_tilde_of(pp, b, P),
            u=np.stack([band_limited(grid32, rng, 1e-2) for _ in range(2)]),
            tau=band_limited(grid32, rng, 0.05) ** 2, p=pp, b=b,
        )
        te = rhs_effective(st, P, do_dealias=False)
        reconstructed = te.p + (P.K * (P.L - 1) + 2 * P.zeta * (b + 1.0)) * te.b
        scale = max(np.max(np.abs(te.a_tilde)), 1e-30)
        assert np.max(np.abs(te.a_tilde - reconstructed)) < 1e-10 * scale

    def test_b_zero_drops_polymer_terms(self, grid32, rng):
        pp = band_limited(grid32, rng, 1e-2)
        b = np.zeros(grid32.shape)
        u = np.stack([band_limited(grid32, rng, 1e-2) for _ in range(2)])
        st = EffectiveState(grid32, a_tilde=a_tilde_of(pp, b, P), u=u,
                            tau=grid32.zeros(), p=pp, b=b)
        te = rhs_effective(st, P, do_dealias=False)
        at = st.a_tilde
        divu = div_arr(grid32, u)
        gat = grad_arr(grid32, at)
        adv = u[0] * gat[0] + u[1] * gat[1]
        expected = -effective_coupling(P) * divu - adv - P.gamma * at * divu
        scale = max(np.max(np.abs(expected)), 1e-30)
        assert np.max(np.abs(te.a_tilde - expected)) < 1e-12 * scale

    def test_inconsistent_carried_fields_rejected(self, grid32, rng):
        pp = band_limited(grid32, rng, 1e-2)
        b = band_limited(grid32, rng, 1e-2)
        st = EffectiveState(grid32, a_tilde=a_tilde_of(pp, b, P) + 1e-6,
                            u=grid32.zeros(2), tau=grid32.zeros(), p=pp, b=b)
        with pytest.raises(ValueError):
            rhs_effective(st, P)

    def test_chain_rule_oracle_from_torus(self, rng):
        grid = build_grid(2, 64, 2.0 * np.pi)
        for _ in range(5):
            tor = TorusState(
                grid,
                P=1.0 + band_limited(grid, rng, 1e-2),
                u=np.stack([band_limited(grid, rng, 1e-2) for _ in range(2)]),
                eta=1.0 + band_limited(grid, rng, 1e-2),
                tau=band_limited(grid, rng, 0.05) ** 2,
            )
            mapped = torus_tendency_to_effective(tor, rhs_torus(tor, P), P)
            direct = rhs_effective(map_states(tor, "effective", P), P)
            scale = max(np.max(np.abs(a)) for a in direct.arrays().values())
            for name in ("a_tilde", "u", "tau", "p", "b"):
                err = np.max(np.abs(getattr(mapped, name) - getattr(direct, name)))
                assert err < 1e-8 * scale


class TestStructuralInvariants:
    def test_stress_tendency_symmetric(self, grid32, rng):
        st = small_cauchy(grid32, rng)
        te = rhs_cauchy(st, P)
        idx = SYM_INDEX[2]
        full = np.empty((2, 2) + grid32.shape)
        for i in range(2):
            for j in range(2):
                full[i, j] = te.tau[idx[i][j]]
        assert np.max(np.abs(full - np.swapaxes(full, 0, 1))) < 1e-13

    def test_divergence_form_tendencies_integrate_to_zero(self, grid32, rng):
        st = map_states(small_cauchy(grid32, rng), "primitive", P)
        te = rhs_primitive(st, P)
        assert abs(grid32.integrate(te.rho)) < 1e-12
        assert abs(grid32.integrate(te.eta)) < 1e-12

    def test_conservative_momentum_assembly_integrates_to_zero(self, grid32, rng):
        # assemble d(rho v)/dt in conservative form independently of the
        # velocity-form RHS: all terms are divergences or gradients
        st = map_states(small_cauchy(grid32, rng), "primitive", P)
        from oldroyd_lab.spectral import graddiv_arr, lap_arr
        from oldroyd_lab.states import pressure_arr

        grid = grid32
        flux_div = np.empty((2,) + grid.shape)
        for i in range(2):
            flux = st.rho * st.v[i] * st.v  # rho v_i v_j
            flux_div[i] = div_arr(grid, flux)
        idx = SYM_INDEX[2]
        sig_div = np.empty((2,) + grid.shape)
        for i in range(2):
            comps = np.stack([st.sigma[idx[i][j]] for j in range(2)])
            sig_div[i] = div_arr(grid, comps)
        head = pressure_arr(st.rho, P) + P.K * P.L * st.eta + P.zeta * st.eta**2
        dmom = (-flux_div - grad_arr(grid, head) + sig_div
                + P.mu * lap_arr(grid, st.v)
                + (P.lam + P.mu) * graddiv_arr(grid, st.v))
        total = grid.integrate(dmom)
        assert np.max(np.abs(np.asarray(total))) < 1e-10

    def test_determinism(self, grid32, rng):
        st = small_cauchy(grid32, rng)
        a = rhs_cauchy(st, P)
        b = rhs_cauchy(st.copy(), P)
        for name in ("n", "u", "tau", "eta"):
            assert np.array_equal(getattr(a, name), getattr(b, name))


class TestGoodUnknowns:
    def test_divergence_free_velocity_gives_zeros(self, grid32):
        x, y = grid32.coords()
        u = np.stack([-np.sin(y), np.sin(x)])
        st = CauchyState(grid32, n=grid32.zeros(), u=u, tau=grid32.zeros(3),
                         eta=grid32.zeros())
        delta, gamma, g = good_unknowns(st, P)
        assert np.max(np.abs(delta.values)) < 1e-12
        assert np.max(np.abs(gamma.values)) < 1e-12
        assert np.max(np.abs(g.values)) < 1e-12

    def test_pressure_only_G(self, grid32):
        x, _ = grid32.coords()
        st = CauchyState(grid32, n=np.cos(x), u=grid32.zeros(2),
                         tau=grid32.zeros(3), eta=grid32.zeros())
        _, _, g = good_unknowns(st, P)
        expected = -(C.alpha1 / (C.mu1 + C.mu2)) * np.stack(
            [np.sin(x), np.zeros(grid32.shape)]
        )
        assert np.max(np.abs(g.values - expected)) < 1e-12

    def test_defining_spectral_identities(self, grid32, rng):
        """delta, Gamma, G verified against an independent spectral assembly.

        The potential part of G ties back to the pair (n, delta):
        (mu1+mu2) div G = (mu1+mu2) Lambda delta - alpha1 (n - mean n).
        """
        st = small_cauchy(grid32, rng)
        delta, gamma, g = good_unknowns(st, P)
        divu = div_arr(grid32, st.u)
        # Lambda delta = div u
        assert np.max(np.abs(lambda_power_arr(grid32, delta.values, 1.0) - divu)) \
            < 1e-11 * np.max(np.abs(divu))
        # Gamma recomputed from its definition
        visc = C.mu1 + C.mu2
        gamma_direct = visc * lambda_power_arr(grid32, st.n, 1.0) - C.alpha1 * delta.values
        assert np.max(np.abs(gamma.values - gamma_direct)) < 1e-12
        # the G potential identity
        n_centered = st.n - st.n.mean()
        lhs = visc * div_arr(grid32, g.values)
        rhs = visc * lambda_power_arr(grid32, delta.values, 1.0) - C.alpha1 * n_centered
        assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(np.max(np.abs(rhs)), 1e-30)

    def test_effective_good_unknowns(self, grid32, rng):
        pp = band_limited(grid32, rng, 1e-2)
        b = band_limited(grid32, rng, 1e-2)
        st = EffectiveState(
            grid32, a_tilde=a_tilde_of(pp, b, P),
            u=np.stack([band_limited(grid32, rng, 1e-2) for _ in range(2)]),
            tau=grid32.zeros(), p=pp, b=b,
        )
        delta, gamma, g = good_unknowns(st, P)
        coupling = effective_coupling(P)
        at_centered = st.a_tilde - st.a_tilde.mean()
        lhs = C.nu * div_arr(grid32, g.values)
        rhs = C.nu * div_arr(grid32, st.u) - coupling * at_centered
        assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(np.max(np.abs(rhs)), 1e-30)
        gamma_direct = C.nu * lambda_power_arr(grid32, st.a_tilde, 1.0) \
            - coupling * delta.values
        assert np.max(np.abs(gamma.values - gamma_direct)) < 1e-12
