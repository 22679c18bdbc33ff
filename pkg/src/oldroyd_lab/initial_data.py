"""Seeded initial-data generators for every formulation.

Each generator builds perturbations around the formulation's equilibrium and
rescales them so the summed H^3 norm of the perturbation equals the requested
amplitude (amplitude 0 returns the equilibrium exactly).  Fields that must
stay nonnegative near a zero equilibrium (the polymer density in the rescaled
system, the scalar stress on the torus) use squared smooth bumps.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, SYM_COMPONENTS, SYM_WEIGHTS
from .params import DerivedConstants, PhysParams
from .diagnostics import sobolev_arr
from .spectral import mean_free
from .states import (
    CauchyState,
    EffectiveState,
    PrimitiveState,
    State,
    TorusState,
    a_tilde_of,
    state_class,
)

GENERATORS = (
    "equilibrium",
    "single_mode",
    "random_smooth",
    "localized_gaussian",
    "zero_momentum_projected",
)


def _unit_sup(arr: np.ndarray) -> np.ndarray:
    m = float(np.max(np.abs(arr)))
    return arr if m == 0.0 else arr / m


def _single_mode(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    axis = int(rng.integers(0, grid.dim))
    phase = float(rng.uniform(0.0, 2.0 * np.pi))
    x = grid.coords()[axis]
    return np.cos(2.0 * np.pi / grid.box_length * x + phase)


def _random_smooth(grid: Grid, rng: np.random.Generator,
                   xi0_modes: float) -> np.ndarray:
    """Random phases under a Gaussian spectral envelope exp(-|m|^2/m0^2)."""
    mags = [np.abs(np.fft.fftfreq(grid.n_per_axis, 1.0 / grid.n_per_axis))] * grid.dim
    mesh = np.meshgrid(*mags, indexing="ij")
    m2 = sum(m * m for m in mesh)
    envelope = np.exp(-m2 / xi0_modes**2)
    noise = rng.standard_normal(grid.shape)
    c = np.fft.fftn(noise) * envelope
    c[(0,) * grid.dim] = 0.0
    out = np.fft.ifftn(c).real
    # drop Nyquist content so derivative conventions are immaterial
    from .spectral import dealias_arr

    return _unit_sup(dealias_arr(grid, out))


def _localized_gaussian(grid: Grid, rng: np.random.Generator,
                        width: float) -> np.ndarray:
    coords = grid.coords()
    center = 0.5 * grid.box_length
    r2 = sum((x - center) ** 2 for x in coords)
    bump = np.exp(-r2 / (2.0 * width**2))
    return float(rng.uniform(0.5, 1.0)) * float(rng.choice((-1.0, 1.0))) * bump


def _base(generator: str, grid: Grid, rng: np.random.Generator, *,
          nonneg: bool, width: float, xi0_modes: float) -> np.ndarray:
    if generator == "single_mode":
        raw = _single_mode(grid, rng)
    elif generator in ("random_smooth", "zero_momentum_projected"):
        raw = _random_smooth(grid, rng, xi0_modes)
    elif generator == "localized_gaussian":
        raw = _localized_gaussian(grid, rng, width)
    else:
        raise ValueError(f"unknown generator {generator!r}")
    if nonneg:
        return _unit_sup(raw * raw)
    return mean_free(grid, raw)


def initial_data(generator: str, amplitude: float, seed: int, grid: Grid,
                 params: PhysParams, formulation: str,
                 width: float | None = None,
                 xi0_modes: float = 4.0) -> State:
    """Build a seeded initial state with the requested H^3 amplitude."""
    if generator not in GENERATORS:
        raise ValueError(f"unknown generator {generator!r}")
    cls = state_class(formulation)
    if generator == "equilibrium" or amplitude == 0.0:
        return cls.equilibrium(grid, params)

    rng = np.random.default_rng(seed)
    if width is None:
        width = grid.box_length / 16.0
    kw = dict(width=width, xi0_modes=xi0_modes)
    d = grid.dim
    ncomp = d * (d + 1) // 2

    def scalar(nonneg=False):
        return _base(generator, grid, rng, nonneg=nonneg, **kw)

    def vector():
        return np.stack([scalar() for _ in range(d)])

    if formulation == "cauchy":
        pert = {
            "n": scalar(),
            "u": vector(),
            "tau": np.stack([scalar() for _ in range(ncomp)]),
            "eta": scalar(nonneg=True),
        }
        weights = {"tau": SYM_WEIGHTS[d]}
    elif formulation == "primitive":
        pert = {
            "rho": scalar(),
            "v": vector(),
            "sigma": np.stack([scalar() for _ in range(ncomp)]),
            "eta": scalar(),
        }
        weights = {"sigma": SYM_WEIGHTS[d]}
    elif formulation == "torus":
        pert = {
            "P": scalar(),
            "u": vector(),
            "eta": scalar(),
            "tau": scalar(nonneg=True),
        }
        weights = {}
    elif formulation == "effective":
        pert = {
            "p": scalar(),
            "u": vector(),
            "b": scalar(),
            "tau": scalar(nonneg=True),
        }
        weights = {}
    else:
        raise ValueError(f"unknown formulation {formulation!r}")

    total = sum(
        sobolev_arr(grid, arr, 3, comp_weights=weights.get(name))
        for name, arr in pert.items()
    )
    scale = amplitude / total
    pert = {name: scale * arr for name, arr in pert.items()}

    state = cls.equilibrium(grid, params)
    if formulation == "cauchy":
        state = CauchyState(grid, n=pert["n"], u=pert["u"], tau=pert["tau"],
                            eta=pert["eta"])
    elif formulation == "primitive":
        sigma = pert["sigma"]
        eta = params.eta_bar + pert["eta"]
        for c, (i, j) in enumerate(SYM_COMPONENTS[d]):
            if i == j:
                sigma[c] = sigma[c] + params.K * eta
        state = PrimitiveState(grid, rho=params.rho_bar + pert["rho"],
                               v=pert["v"], sigma=sigma, eta=eta)
    elif formulation == "torus":
        state = TorusState(grid, P=params.p_bar + pert["P"], u=pert["u"],
                           eta=params.eta_bar + pert["eta"], tau=pert["tau"])
    else:
        p, b = pert["p"], pert["b"]
        state = EffectiveState(grid, a_tilde=a_tilde_of(p, b, params),
                               u=pert["u"], tau=pert["tau"], p=p, b=b)

    if generator == "zero_momentum_projected":
        state = project_zero_momentum(state, params)
    return state


def project_zero_momentum(state: State, params: PhysParams) -> State:
    """Shift the velocity by a constant so the total momentum vanishes.

    The density-weighted mean is subtracted, making the momentum integral
    zero to roundoff.
    """
    from .diagnostics import perturbation_view

    grid = state.grid
    view = perturbation_view(state, params)
    mass = float(grid.integrate(view.rho))
    mom = np.asarray(grid.integrate(view.rho * view.velocity), dtype=float)
    shift = mom / mass
    vel_name = "v" if isinstance(state, PrimitiveState) else "u"
    vel = getattr(state, vel_name).copy()
    scale = 1.0
    if isinstance(state, CauchyState):
        # the state's velocity is v / alpha; shift in physical units
        scale = DerivedConstants.from_params(params).alpha
    for j in range(grid.dim):
        vel[j] -= shift[j] / scale
    return state.replace(**{vel_name: vel})
