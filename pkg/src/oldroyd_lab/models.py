"""Right-hand sides for the four formulations and the derived good unknowns.

Every RHS is a pure function of an immutable state snapshot: fresh tendency
arrays come back in a state-shaped container.  Nonlinear products are formed
pointwise on dealiased inputs and the assembled tendency is truncated by the
2/3 rule once at the end (truncation is linear, so this equals dealiasing
each product separately).

Velocity equations are kept in velocity form (momentum divided by the
density); the conservation diagnostics reassemble the conservative form
independently.

Each field is forward-transformed once per evaluation and every derivative
is drawn from those coefficients.
"""

from __future__ import annotations

import logging

import numpy as np

from .grid import Grid, ScalarField, SYM_COMPONENTS, SYM_INDEX, VectorField
from .kernels import sym_stress_rhs
from .params import DerivedConstants, PhysParams, effective_coupling
from .spectral import (
    dealias_arr,
    div_arr,
    grad_arr,
    grad_from,
    graddiv_from,
    inv_lap_arr,
    jac_from,
    lambda_power_arr,
    lap_from,
    leray_split_arr,
)
from .states import (
    CauchyState,
    EffectiveState,
    PrimitiveState,
    TorusState,
    VacuumError,
    polymer_pressure_arr,
    pressure_arr,
    recover_rho,
)

logger = logging.getLogger(__name__)

# |n|, |eta| beyond this leave the small-perturbation regime the reformulated
# systems assume; crossing it logs a warning but keeps running.
SMALLNESS_GUARD = 0.01
_warned: set[str] = set()


def _guard_smallness(tag: str, **fields: np.ndarray) -> None:
    if tag in _warned:
        return
    for name, arr in fields.items():
        m = float(np.max(np.abs(arr)))
        if m > SMALLNESS_GUARD:
            logger.warning(
                "%s: |%s| = %.3g exceeds the small-perturbation guard %g",
                tag, name, m, SMALLNESS_GUARD,
            )
            _warned.add(tag)


def reset_smallness_warnings() -> None:
    _warned.clear()


def _sym_div_from(grid: Grid, c: np.ndarray) -> np.ndarray:
    """Divergence of an upper-triangle tensor from its coefficients."""
    idx = SYM_INDEX[grid.dim]
    out = np.empty((grid.dim,) + grid.shape)
    for i in range(grid.dim):
        acc = 1j * grid.kd[0] * c[idx[i][0]]
        for j in range(1, grid.dim):
            acc = acc + 1j * grid.kd[j] * c[idx[i][j]]
        out[i] = grid.irfft(acc)
    return out


def _advect_from_grad(vel: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Pointwise v . (precomputed gradient)."""
    acc = vel[0] * grad[0]
    for j in range(1, grad.shape[0]):
        acc = acc + vel[j] * grad[j]
    return acc


def _components_advect(grid: Grid, vel: np.ndarray, c: np.ndarray) -> np.ndarray:
    """(v . grad) of a multi-component field from its coefficients."""
    out = None
    for j in range(grid.dim):
        d = grid.irfft(1j * grid.kd[j] * c)
        term = vel[j] * d
        out = term if out is None else out + term
    return out


def _vec_advect(grid: Grid, vel: np.ndarray, jac: np.ndarray) -> np.ndarray:
    """(v . grad) v from a precomputed Jacobian J[i, j] = d v_i / d x_j."""
    out = np.empty_like(vel)
    for i in range(grid.dim):
        acc = vel[0] * jac[i, 0]
        for j in range(1, grid.dim):
            acc += vel[j] * jac[i, j]
        out[i] = acc
    return out


def _trace(grid: Grid, jac: np.ndarray) -> np.ndarray:
    divv = jac[0, 0] + jac[1, 1]
    if grid.dim == 3:
        divv = divv + jac[2, 2]
    return divv


def _maybe_dealias(grid: Grid, arrays: dict[str, np.ndarray], do: bool) -> dict[str, np.ndarray]:
    if not do:
        return arrays
    return {k: dealias_arr(grid, v) for k, v in arrays.items()}


# ---------------------------------------------------------------------------
# Primitive formulation
# ---------------------------------------------------------------------------

def rhs_primitive(state: PrimitiveState, params: PhysParams,
                  do_dealias: bool = True) -> PrimitiveState:
    """Tendencies of (rho, v, sigma, eta); momentum divided through by rho."""
    grid = state.grid
    consts = DerivedConstants.from_params(params)
    if np.min(state.rho) <= 0.0:
        raise VacuumError("vacuum: non-positive density")

    cv = grid.rfft(state.v)
    csig = grid.rfft(state.sigma)
    jac = jac_from(grid, cv)
    divv = _trace(grid, jac)

    d_rho = -div_arr(grid, state.rho * state.v)
    d_eta = -div_arr(grid, state.eta * state.v)

    # stress transport: advection + upper-convected terms + relaxation source
    d_sigma = -_components_advect(grid, state.v, csig) + sym_stress_rhs(
        jac, state.sigma, state.eta, divv,
        c_jprod=1.0,
        c_eta=0.0,
        c_id=params.K * consts.damping,
        c_div=-1.0,
        c_damp=-consts.damping,
    )

    total_pressure = pressure_arr(state.rho, params) + (
        params.K * params.L * state.eta + params.zeta * state.eta**2
    )
    force = (
        params.mu * lap_from(grid, cv)
        + (params.lam + params.mu) * graddiv_from(grid, cv)
        - grad_arr(grid, total_pressure)
        + _sym_div_from(grid, csig)
    )
    d_v = -_vec_advect(grid, state.v, jac) + force / state.rho

    out = _maybe_dealias(grid, {"rho": d_rho, "v": d_v, "sigma": d_sigma, "eta": d_eta},
                         do_dealias)
    return PrimitiveState(grid, **out)


# ---------------------------------------------------------------------------
# Cauchy-reformulated system
# ---------------------------------------------------------------------------

def rhs_cauchy(state: CauchyState, params: PhysParams,
               do_dealias: bool = True) -> CauchyState:
    """Tendencies of (n, u, tau, eta) in the rescaled variables.

    The velocity tendency sums the solenoidal and potential equations of the
    reformulated system; the projected pair is recovered exactly by applying
    the Leray projectors, which commute with every multiplier used here.
    """
    grid = state.grid
    consts = DerivedConstants.from_params(params)
    _guard_smallness("cauchy", n=state.n, eta=state.eta)

    rho = recover_rho(state.n, state.eta, params)
    k_a = 1.0 / rho - 1.0 / params.rho_bar
    # I(a) = (n - K(L-1) eta - zeta eta^2) / R, exact given the definition of n
    I_a = (state.n - params.K * (params.L - 1.0) * state.eta
           - params.zeta * state.eta**2) / params.R

    alpha = consts.alpha
    cu = grid.rfft(state.u)
    cn = grid.rfft(state.n)
    ctau = grid.rfft(state.tau)
    ceta = grid.rfft(state.eta)

    jac = jac_from(grid, cu)
    divu = _trace(grid, jac)
    lap_u = lap_from(grid, cu)
    gdv = graddiv_from(grid, cu)
    grad_n = grad_from(grid, cn)
    div_tau = _sym_div_from(grid, ctau)

    f1 = (-alpha * params.R * (params.gamma - 1.0) * I_a * divu
          - alpha * state.n * divu
          - alpha * params.zeta * state.eta**2 * divu)
    d_n = -consts.alpha1 * divu - alpha * _advect_from_grad(state.u, grad_n) + f1

    f2 = (
        -alpha * _vec_advect(grid, state.u, jac)
        + params.mu * k_a * lap_u
        + (params.lam + params.mu) * k_a * gdv
        - (k_a / alpha) * grad_n
        + (k_a / alpha) * div_tau
    )
    d_u = (
        consts.mu1 * lap_u
        + consts.mu2 * gdv
        - consts.alpha1 * grad_n
        + consts.alpha1 * div_tau
        + f2
    )

    f3 = sym_stress_rhs(
        jac, state.tau, state.eta, divu,
        c_jprod=alpha,
        c_eta=alpha * params.K,
        c_id=0.0,
        c_div=-alpha,
        c_damp=0.0,
    )
    d_tau = -alpha * _components_advect(grid, state.u, ctau) \
        - consts.damping * state.tau + f3

    d_eta = -alpha * _components_advect(grid, state.u, ceta) \
        - alpha * state.eta * divu

    out = _maybe_dealias(grid, {"n": d_n, "u": d_u, "tau": d_tau, "eta": d_eta},
                         do_dealias)
    return CauchyState(grid, **out)


# ---------------------------------------------------------------------------
# Torus pressure-variable system
# ---------------------------------------------------------------------------

def rhs_torus(state: TorusState, params: PhysParams,
              do_dealias: bool = True) -> TorusState:
    """Tendencies of (P, u, eta, tau) with the scalar stress."""
    grid = state.grid
    if np.min(state.P) <= 0.0:
        raise VacuumError("non-positive pressure sample")
    rho = (state.P / params.R) ** (1.0 / params.gamma)

    cu = grid.rfft(state.u)
    jac = jac_from(grid, cu)
    divu = _trace(grid, jac)

    d_P = -div_arr(grid, state.P * state.u) - (params.gamma - 1.0) * state.P * divu
    d_eta = -div_arr(grid, state.eta * state.u)
    d_tau = -state.tau - div_arr(grid, state.tau * state.u)

    head = state.P + polymer_pressure_arr(state.eta, params) - state.tau
    force = (
        params.mu * lap_from(grid, cu)
        + (params.lam + params.mu) * graddiv_from(grid, cu)
        - grad_arr(grid, head)
    )
    d_u = -_vec_advect(grid, state.u, jac) + force / rho

    out = _maybe_dealias(grid, {"P": d_P, "u": d_u, "eta": d_eta, "tau": d_tau},
                         do_dealias)
    return TorusState(grid, **out)


# ---------------------------------------------------------------------------
# Effective-pressure system (normalized gauge)
# ---------------------------------------------------------------------------

def rhs_effective(state: EffectiveState, params: PhysParams,
                  do_dealias: bool = True) -> EffectiveState:
    """Tendencies of (a_tilde, u, tau) plus the carried (p, b)."""
    grid = state.grid
    if not params.is_normalized():
        raise ValueError("effective formulation requires R = rho_bar = eta_bar = 1")
    residual = state.consistency_residual(params)
    if residual > 1e-10:
        raise ValueError(
            f"a_tilde inconsistent with carried (p, b): residual {residual:.3e}"
        )
    if np.min(1.0 + state.p) <= 0.0:
        raise VacuumError("1 + p must stay positive")
    if np.min(1.0 + state.b) <= 0.0:
        raise VacuumError("1 + b must stay positive")
    _guard_smallness("effective", p=state.p, b=state.b)

    rho = (1.0 + state.p) ** (1.0 / params.gamma)
    a = rho - 1.0
    J_a = a / (1.0 + a)

    cu = grid.rfft(state.u)
    cat = grid.rfft(state.a_tilde)
    jac = jac_from(grid, cu)
    divu = _trace(grid, jac)
    lap_u = lap_from(grid, cu)
    gdv = graddiv_from(grid, cu)
    grad_at = grad_from(grid, cat)
    coupling = effective_coupling(params)

    f2 = (
        -_advect_from_grad(state.u, grad_at)
        - params.gamma * state.a_tilde * divu
        + (params.gamma - 2.0) * params.zeta * state.b**2 * divu
        + (2.0 * (params.gamma - 2.0) * params.zeta
           + params.K * (params.gamma - 1.0) * (params.L - 1.0)) * state.b * divu
    )
    d_at = -coupling * divu + f2

    f3 = (
        -_vec_advect(grid, state.u, jac)
        + J_a * grad_at
        - J_a * (params.mu * lap_u + (params.lam + params.mu) * gdv)
        + grad_arr(grid, state.tau) / (1.0 + a)
    )
    d_u = params.mu * lap_u + (params.lam + params.mu) * gdv - grad_at + f3

    d_tau = -state.tau - div_arr(grid, state.tau * state.u)
    d_p = -params.gamma * divu - _components_advect(grid, state.u, grid.rfft(state.p)) \
        - params.gamma * state.p * divu
    d_b = -divu - _components_advect(grid, state.u, grid.rfft(state.b)) \
        - state.b * divu

    out = _maybe_dealias(
        grid,
        {"a_tilde": d_at, "u": d_u, "tau": d_tau, "p": d_p, "b": d_b},
        do_dealias,
    )
    return EffectiveState(grid, **out)


RHS = {
    "primitive": rhs_primitive,
    "cauchy": rhs_cauchy,
    "torus": rhs_torus,
    "effective": rhs_effective,
}


def rhs_for(state, params: PhysParams, do_dealias: bool = True):
    return RHS[state.formulation](state, params, do_dealias=do_dealias)


# ---------------------------------------------------------------------------
# Good unknowns
# ---------------------------------------------------------------------------

def good_unknowns(state: CauchyState | EffectiveState, params: PhysParams,
                  blocks=None) -> tuple[ScalarField, ScalarField, VectorField]:
    """Derived fields (delta, Gamma, G) or (delta, Gamma~, G~).

    delta   = Lambda^-1 div Qu              (velocity potential amplitude)
    Gamma   = (mu1+mu2) Lambda n - alpha1 delta
    G       = Qu - alpha1/(mu1+mu2) InvLap grad n
    G~      = Qu - (1/nu) InvLap grad a_tilde, with Gamma~ the analogous
              combination nu Lambda a_tilde - coupling * delta.

    Mean modes are annihilated by the inverse operators.  ``blocks`` is
    accepted for interface parity with the norm helpers and is unused.
    """
    grid = state.grid
    consts = DerivedConstants.from_params(params)
    _, qu = leray_split_arr(grid, state.u)
    divu = div_arr(grid, state.u)
    delta = lambda_power_arr(grid, divu, -1.0, strict=False)

    if isinstance(state, CauchyState):
        scalar = state.n
        visc = consts.mu1 + consts.mu2
        coupling = consts.alpha1
    else:
        scalar = state.a_tilde
        visc = consts.nu
        coupling = effective_coupling(params)

    gamma_field = visc * lambda_power_arr(grid, scalar, 1.0) - coupling * delta
    g_field = qu - (coupling / visc) * inv_lap_arr(grid, grad_arr(grid, scalar),
                                                   strict=False)
    return (
        ScalarField(grid, delta),
        ScalarField(grid, gamma_field),
        VectorField(grid, g_field),
    )


# ---------------------------------------------------------------------------
# Chain-rule tendency maps (cross-formulation oracles)
# ---------------------------------------------------------------------------

def primitive_tendency_to_cauchy(state: PrimitiveState, tend: PrimitiveState,
                                 params: PhysParams) -> CauchyState:
    """Push a primitive tendency through d/dt of the change of variables."""
    grid = state.grid
    consts = DerivedConstants.from_params(params)
    dP = params.R * params.gamma * state.rho ** (params.gamma - 1.0) * tend.rho
    d_n = dP + (params.K * (params.L - 1.0) + 2.0 * params.zeta * state.eta) * tend.eta
    d_tau = tend.sigma.copy()
    for c, (i, j) in enumerate(SYM_COMPONENTS[grid.dim]):
        if i == j:
            d_tau[c] = d_tau[c] - params.K * tend.eta
    return CauchyState(grid, n=d_n, u=tend.v / consts.alpha, tau=d_tau,
                       eta=tend.eta.copy())


def torus_tendency_to_effective(state: TorusState, tend: TorusState,
                                params: PhysParams) -> EffectiveState:
    """Push a torus tendency to the effective variables."""
    grid = state.grid
    b = state.eta - 1.0
    d_p = tend.P.copy()
    d_b = tend.eta.copy()
    d_at = d_p + (params.K * (params.L - 1.0) + 2.0 * params.zeta * (b + 1.0)) * d_b
    return EffectiveState(grid, a_tilde=d_at, u=tend.u.copy(), tau=tend.tau.copy(),
                          p=d_p, b=d_b)
