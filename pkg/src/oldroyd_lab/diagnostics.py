"""Norms, energy functionals, conserved quantities, and decay-law fits.

Everything here is a pure function over an immutable state snapshot, safe to
evaluate in a worker separate from the integration driver.

Norm conventions: a vector or symmetric tensor aggregates its components in
quadrature (off-diagonal tensor entries counted twice); a tuple of distinct
unknowns sums the individual norms, as in ``||(f, g)|| = ||f|| + ||g||``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, ScalarField, SymTensorField, SYM_WEIGHTS, VectorField
from .lp import BesovNormSpec, DyadicBlockSet, besov_norm
from .params import DerivedConstants, PhysParams
from .spectral import l2_norm_arr, lambda_power_arr
from .states import (
    CauchyState,
    EffectiveState,
    PrimitiveState,
    State,
    TorusState,
)


# ---------------------------------------------------------------------------
# Sobolev norms
# ---------------------------------------------------------------------------

def sobolev_arr(grid: Grid, values: np.ndarray, s: int,
                comp_weights=None) -> float:
    """H^s norm: sqrt(sum (1+|xi|^2)^s |c|^2) with the package Parseval."""
    if s not in (0, 1, 2, 3, 4):
        raise ValueError("s must be an integer in 0..4")
    c = grid.rfft(values)
    w = (1.0 + grid.k2) ** s * grid.rfft_weights
    sq = w * np.abs(c) ** 2
    if comp_weights is not None:
        cw = np.asarray(comp_weights).reshape((-1,) + (1,) * grid.dim)
        sq = cw * sq
    return float(np.sqrt(grid.vol * sq.sum() / grid.npoints**2))


def sobolev_norm(f, s: int) -> float:
    w = SYM_WEIGHTS[f.grid.dim] if isinstance(f, SymTensorField) else None
    return sobolev_arr(f.grid, f.values, s, comp_weights=w)


# ---------------------------------------------------------------------------
# Perturbation view: every formulation exposes (n, u, tau, eta) deviations
# from its own equilibrium, plus the physical (rho, velocity) pair.
# ---------------------------------------------------------------------------

@dataclass
class PerturbationView:
    n: ScalarField
    u: VectorField
    tau: SymTensorField | ScalarField
    eta: ScalarField
    rho: np.ndarray
    velocity: np.ndarray


def perturbation_view(state: State, params: PhysParams) -> PerturbationView:
    grid = state.grid
    consts = DerivedConstants.from_params(params)
    if isinstance(state, CauchyState):
        from .states import recover_rho

        rho = recover_rho(state.n, state.eta, params)
        return PerturbationView(
            n=ScalarField(grid, state.n),
            u=VectorField(grid, state.u),
            tau=SymTensorField(grid, state.tau),
            eta=ScalarField(grid, state.eta),
            rho=rho,
            velocity=consts.alpha * state.u,
        )
    if isinstance(state, PrimitiveState):
        from .grid import SYM_COMPONENTS

        n = (params.R * state.rho**params.gamma - params.p_bar
             + params.K * (params.L - 1.0) * (state.eta - params.eta_bar)
             + params.zeta * (state.eta**2 - params.eta_bar**2))
        tau = state.sigma.copy()
        for c, (i, j) in enumerate(SYM_COMPONENTS[grid.dim]):
            if i == j:
                tau[c] -= params.K * state.eta
        return PerturbationView(
            n=ScalarField(grid, n),
            u=VectorField(grid, state.v / consts.alpha),
            tau=SymTensorField(grid, tau),
            eta=ScalarField(grid, state.eta - params.eta_bar),
            rho=state.rho,
            velocity=state.v,
        )
    if isinstance(state, TorusState):
        rho = (state.P / params.R) ** (1.0 / params.gamma)
        return PerturbationView(
            n=ScalarField(grid, state.P - params.p_bar),
            u=VectorField(grid, state.u),
            tau=ScalarField(grid, state.tau),
            eta=ScalarField(grid, state.eta - params.eta_bar),
            rho=rho,
            velocity=state.u,
        )
    if isinstance(state, EffectiveState):
        rho = (1.0 + state.p) ** (1.0 / params.gamma)
        return PerturbationView(
            n=ScalarField(grid, state.a_tilde),
            u=VectorField(grid, state.u),
            tau=ScalarField(grid, state.tau),
            eta=ScalarField(grid, state.b),
            rho=rho,
            velocity=state.u,
        )
    raise ValueError(f"unknown state {type(state)}")


# ---------------------------------------------------------------------------
# Energy functionals
# ---------------------------------------------------------------------------

def _lam(f):
    return type(f)(f.grid, lambda_power_arr(f.grid, f.values, 1.0))


def energy_functionals_view(view: PerturbationView, blocks: DyadicBlockSet
                            ) -> tuple[float, float]:
    d = view.n.grid.dim
    half = d / 2.0

    def B(f, s, part):
        return besov_norm(f, BesovNormSpec(s=s, p=2, r=1, part=part), blocks)

    lam_n = _lam(view.n)
    lam_tau = _lam(view.tau)
    lam_eta = _lam(view.eta)

    e_inf = (
        B(view.n, half - 1, "low") + B(view.u, half - 1, "low")
        + B(view.eta, half - 1, "low")
        + B(view.tau, half, "low")
        + B(lam_n, half + 1, "high") + B(view.u, half + 1, "high")
        + B(lam_tau, half + 1, "high") + B(lam_eta, half + 1, "high")
    )
    e_1 = (
        B(view.n, half + 1, "low") + B(view.u, half + 1, "low")
        + B(view.tau, half, "low")
        + B(lam_n, half + 1, "high") + B(lam_tau, half + 1, "high")
        + B(view.u, half + 3, "high")
    )
    return e_inf, e_1


def energy_functionals(state: State, params: PhysParams,
                       blocks: DyadicBlockSet) -> tuple[float, float]:
    """The low/high-split energy functionals of the perturbation variables."""
    return energy_functionals_view(perturbation_view(state, params), blocks)


# ---------------------------------------------------------------------------
# Conserved quantities
# ---------------------------------------------------------------------------

def conserved_quantities(state: State, params: PhysParams
                         ) -> tuple[float, float, np.ndarray]:
    """(mass, polymer mass, momentum) as exact spectral means times volume."""
    grid = state.grid
    view = perturbation_view(state, params)
    mass = float(grid.integrate(view.rho))
    if isinstance(state, EffectiveState):
        eta_full = 1.0 + state.b
    else:
        eta_full = state.eta
    eta_mass = float(grid.integrate(eta_full))
    momentum = np.asarray(grid.integrate(view.rho * view.velocity), dtype=float)
    return mass, eta_mass, momentum


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

@dataclass
class EnergyRecord:
    t: float
    E_inf: float
    E_1: float
    h3_u: float
    h3_tau: float
    h3_n: float
    h3_eta: float
    l2_n: float
    l2_u: float
    l2_tau: float
    mass: float
    momentum: tuple
    tau_min: float
    eta_mass: float = 0.0
    lambda_norms: dict = field(default_factory=dict)
    consistency_residuals: dict = field(default_factory=dict)


def lambda_column(beta: float, group: str) -> str:
    return f"lambda{beta:g}_{group}"


def measure(state: State, params: PhysParams, blocks: DyadicBlockSet,
            lambda_specs: tuple = ()) -> EnergyRecord:
    """Assemble the full per-time diagnostic row.

    ``lambda_specs`` lists (beta, group) pairs with group "nu" (the pair
    (n, u), norms summed) or "tau".
    """
    grid = state.grid
    view = perturbation_view(state, params)
    e_inf, e_1 = energy_functionals_view(view, blocks)
    mass, eta_mass, momentum = conserved_quantities(state, params)

    tw = SYM_WEIGHTS[grid.dim] if isinstance(view.tau, SymTensorField) else None

    lam_cols = {}
    for beta, group in lambda_specs:
        if group == "nu":
            val = (l2_norm_arr(grid, lambda_power_arr(grid, view.n.values, beta))
                   + l2_norm_arr(grid, lambda_power_arr(grid, view.u.values, beta)))
        elif group == "tau":
            val = l2_norm_arr(grid, lambda_power_arr(grid, view.tau.values, beta),
                              comp_weights=tw)
        else:
            raise ValueError(f"unknown lambda group {group!r}")
        lam_cols[lambda_column(beta, group)] = val

    if isinstance(view.tau, SymTensorField):
        trace = sum(view.tau.component(i, i) for i in range(grid.dim))
        tau_min = float(np.min(trace / grid.dim))
    else:
        tau_min = float(np.min(view.tau.values))

    consistency = {}
    if isinstance(state, EffectiveState):
        consistency["a_tilde"] = state.consistency_residual(params)

    return EnergyRecord(
        t=0.0,
        E_inf=e_inf,
        E_1=e_1,
        h3_u=sobolev_norm(view.u, 3),
        h3_tau=sobolev_norm(view.tau, 3),
        h3_n=sobolev_norm(view.n, 3),
        h3_eta=sobolev_norm(view.eta, 3),
        l2_n=l2_norm_arr(grid, view.n.values),
        l2_u=l2_norm_arr(grid, view.u.values),
        l2_tau=l2_norm_arr(grid, view.tau.values, comp_weights=tw),
        mass=mass,
        momentum=tuple(float(m) for m in momentum),
        tau_min=tau_min,
        eta_mass=eta_mass,
        lambda_norms=lam_cols,
        consistency_residuals=consistency,
    )


def make_recorder(params: PhysParams, blocks: DyadicBlockSet, lambda_specs=()):
    def recorder(state: State, t: float) -> EnergyRecord:
        rec = measure(state, params, blocks, lambda_specs)
        rec.t = t
        return rec

    return recorder


# ---------------------------------------------------------------------------
# Decay fits and targets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    window: tuple
    model: str
    exponent_or_rate: float
    amplitude: float
    r_squared: float
    n_samples: int


def fit_decay(series, model: str, window: tuple[float, float]) -> DecayFit:
    """Least-squares decay fit on log-transformed data.

    algebraic:   log y = log A + e log(1+t)  -> returns the exponent e
    exponential: log y = log A - r t         -> returns the rate r (> 0 decays)
    """
    if model not in ("algebraic", "exponential"):
        raise ValueError(f"unknown decay model {model!r}")
    t_lo, t_hi = float(window[0]), float(window[1])
    if not t_lo < t_hi:
        raise ValueError("window must satisfy t_lo < t_hi")
    data = np.asarray(list(series), dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("series must be (t, y) pairs")
    sel = (data[:, 0] >= t_lo) & (data[:, 0] <= t_hi)
    t = data[sel, 0]
    y = data[sel, 1]
    if t.size < 10:
        raise ValueError(f"need at least 10 samples in window, got {t.size}")
    if np.min(y) <= 0.0:
        raise ValueError("non-positive samples in fit window")
    x = np.log1p(t) if model == "algebraic" else t
    logy = np.log(y)
    slope, intercept = np.polyfit(x, logy, 1)
    resid = logy - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((logy - logy.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    value = slope if model == "algebraic" else -slope
    return DecayFit(
        window=(t_lo, t_hi),
        model=model,
        exponent_or_rate=float(value),
        amplitude=float(np.exp(intercept)),
        r_squared=float(r2),
        n_samples=int(t.size),
    )


def decay_targets(d: int, s: float, beta: float, field_group: str) -> float:
    """Predicted algebraic L2 decay exponent for the (n, u) pair or tau.

    Data-class index s must satisfy 1 - d/2 < s <= d/2.  The admissible beta
    interval is (-s, d/2 - 1] for the velocity/pressure group and
    (1 - s, d/2) for the stress.
    """
    if not (1.0 - d / 2.0 < s <= d / 2.0):
        raise ValueError(f"s = {s} outside (1 - d/2, d/2] for d = {d}")
    if field_group == "nu":
        if not (-s < beta <= d / 2.0 - 1.0):
            raise ValueError(
                f"beta = {beta} outside (-s, d/2 - 1] for the (n, u) group"
            )
        return -(beta + s) / 2.0
    if field_group == "tau":
        if not (1.0 - s < beta < d / 2.0):
            raise ValueError(
                f"beta = {beta} outside (1 - s, d/2) for the stress group"
            )
        return -(beta + s - 1.0) / 2.0
    raise ValueError(f"unknown field group {field_group!r}")
