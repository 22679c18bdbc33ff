"""State variants of the model and the algebraic maps between them.

Four formulations share one physical flow:

* primitive ``(rho, v, sigma, eta)`` — density, velocity, extra stress,
  polymer density;
* cauchy ``(n, u, tau, eta)`` — effective pressure perturbation
  ``n = R rho^gamma - R rho_bar^gamma + K(L-1) eta + zeta eta^2``, rescaled
  velocity ``u = v / alpha``, shifted stress ``tau = sigma - K eta Id``;
* torus ``(P, u, eta, tau)`` — pressure-variable form with a scalar stress;
* effective ``(a_tilde, u, tau)`` plus carried ``(p, b)`` — the good-pressure
  form ``a_tilde = p + K(L-1) b + zeta b (b+2)`` with ``p = P-1, b = eta-1``
  (requires the normalized gauge R = rho_bar = eta_bar = 1).

Tendencies reuse the state classes ("state-shaped" containers).
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .grid import Grid, SYM_COMPONENTS
from .kernels import newton_rho
from .params import PhysParams, DerivedConstants


class VacuumError(ValueError):
    """Density, pressure, or an invertibility bound left the admissible set."""


# -- constitutive functions -------------------------------------------------

def pressure_arr(rho: np.ndarray, params: PhysParams) -> np.ndarray:
    if np.min(rho) <= 0.0:
        raise VacuumError("non-positive density sample in pressure law")
    return params.R * rho**params.gamma


def polymer_pressure_arr(eta: np.ndarray, params: PhysParams) -> np.ndarray:
    return params.K * (params.L - 1.0) * eta + params.zeta * eta**2


def aux_functions_arr(a: np.ndarray, params: PhysParams):
    """Pointwise I(a), k(a), J(a) used by the reformulated systems.

    I(a) = (a + rho_bar)^gamma - rho_bar^gamma,
    k(a) = 1/(a + rho_bar) - 1/rho_bar,
    J(a) = a / (1 + a).
    """
    rho = a + params.rho_bar
    if np.min(rho) <= 0.0:
        raise VacuumError("a + rho_bar must stay positive")
    if np.min(1.0 + a) <= 0.0:
        raise VacuumError("1 + a must stay positive for J(a)")
    I_a = rho**params.gamma - params.rho_bar**params.gamma
    k_a = 1.0 / rho - 1.0 / params.rho_bar
    J_a = a / (1.0 + a)
    return I_a, k_a, J_a


def pressure(rho, params: PhysParams):
    from .grid import ScalarField

    return ScalarField(rho.grid, pressure_arr(rho.values, params))


def polymer_pressure(eta, params: PhysParams):
    from .grid import ScalarField

    return ScalarField(eta.grid, polymer_pressure_arr(eta.values, params))


def aux_functions(a, params: PhysParams):
    from .grid import ScalarField

    I_a, k_a, J_a = aux_functions_arr(a.values, params)
    return (ScalarField(a.grid, I_a), ScalarField(a.grid, k_a), ScalarField(a.grid, J_a))


def recover_rho(n: np.ndarray, eta: np.ndarray, params: PhysParams) -> np.ndarray:
    """Invert n = R rho^gamma - R rho_bar^gamma + q-terms for the density.

    Newton iteration on R rho^gamma = n + R rho_bar^gamma - K(L-1) eta
    - zeta eta^2, tolerance 1e-13, initial guess rho_bar; the map is
    monotone in rho for gamma > 1.
    """
    X = n + params.p_bar - params.K * (params.L - 1.0) * eta - params.zeta * eta**2
    if np.min(X) <= 0.0:
        raise VacuumError("effective pressure leaves the invertibility domain")
    return newton_rho(X, params.rho_bar, params.R, params.gamma)


# -- state containers ---------------------------------------------------------

class _StateBase:
    """Array-container behavior shared by all formulations."""

    formulation = "?"

    @property
    def grid(self) -> Grid:
        return self._grid

    def field_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in dc_fields(self) if f.name != "_grid")

    def arrays(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in self.field_names()}

    def copy(self):
        cls = type(self)
        return cls(self._grid, *(getattr(self, n).copy() for n in self.field_names()))

    def replace(self, **arrays):
        cls = type(self)
        vals = {n: arrays.get(n, getattr(self, n)) for n in self.field_names()}
        return cls(self._grid, **vals)

    def scaled(self, c: float):
        cls = type(self)
        return cls(self._grid, *(c * getattr(self, n) for n in self.field_names()))

    def add_scaled(self, other, c: float):
        cls = type(self)
        return cls(
            self._grid,
            *(getattr(self, n) + c * getattr(other, n) for n in self.field_names()),
        )


def _sym_ncomp(dim: int) -> int:
    return dim * (dim + 1) // 2


@dataclass
class PrimitiveState(_StateBase):
    _grid: Grid
    rho: np.ndarray
    v: np.ndarray
    sigma: np.ndarray  # upper-triangle symmetric components
    eta: np.ndarray

    formulation = "primitive"

    @classmethod
    def equilibrium(cls, grid: Grid, params: PhysParams) -> "PrimitiveState":
        """Constant state (rho_bar, 0, K eta_bar Id, eta_bar); a fixed point."""
        sigma = grid.zeros(_sym_ncomp(grid.dim))
        for c, (i, j) in enumerate(SYM_COMPONENTS[grid.dim]):
            if i == j:
                sigma[c] = params.K * params.eta_bar
        return cls(
            grid,
            rho=np.full(grid.shape, params.rho_bar),
            v=grid.zeros(grid.dim),
            sigma=sigma,
            eta=np.full(grid.shape, params.eta_bar),
        )


@dataclass
class CauchyState(_StateBase):
    _grid: Grid
    n: np.ndarray
    u: np.ndarray
    tau: np.ndarray  # upper-triangle symmetric components
    eta: np.ndarray

    formulation = "cauchy"

    @classmethod
    def equilibrium(cls, grid: Grid, params: PhysParams) -> "CauchyState":
        """The all-zero state: (rho_bar, 0, 0, 0) in primitive variables."""
        return cls(
            grid,
            n=grid.zeros(),
            u=grid.zeros(grid.dim),
            tau=grid.zeros(_sym_ncomp(grid.dim)),
            eta=grid.zeros(),
        )


@dataclass
class TorusState(_StateBase):
    _grid: Grid
    P: np.ndarray
    u: np.ndarray
    eta: np.ndarray
    tau: np.ndarray  # scalar stress

    formulation = "torus"

    @classmethod
    def equilibrium(cls, grid: Grid, params: PhysParams) -> "TorusState":
        return cls(
            grid,
            P=np.full(grid.shape, params.p_bar),
            u=grid.zeros(grid.dim),
            eta=np.full(grid.shape, params.eta_bar),
            tau=grid.zeros(),
        )


@dataclass
class EffectiveState(_StateBase):
    _grid: Grid
    a_tilde: np.ndarray
    u: np.ndarray
    tau: np.ndarray  # scalar stress
    p: np.ndarray
    b: np.ndarray

    formulation = "effective"

    @classmethod
    def equilibrium(cls, grid: Grid, params: PhysParams) -> "EffectiveState":
        return cls(
            grid,
            a_tilde=grid.zeros(),
            u=grid.zeros(grid.dim),
            tau=grid.zeros(),
            p=grid.zeros(),
            b=grid.zeros(),
        )

    def consistency_residual(self, params: PhysParams) -> float:
        """Sup distance between a_tilde and its reconstruction from (p, b)."""
        return float(np.max(np.abs(self.a_tilde - a_tilde_of(self.p, self.b, params))))


def a_tilde_of(p: np.ndarray, b: np.ndarray, params: PhysParams) -> np.ndarray:
    """a_tilde = p + K(L-1) b + zeta b (b + 2)."""
    return p + params.K * (params.L - 1.0) * b + params.zeta * b * (b + 2.0)


State = PrimitiveState | CauchyState | TorusState | EffectiveState

_KINDS = {
    "primitive": PrimitiveState,
    "cauchy": CauchyState,
    "torus": TorusState,
    "effective": EffectiveState,
}


def state_class(kind: str):
    try:
        return _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown formulation {kind!r}") from None


def _diag_shift(grid: Grid, sym: np.ndarray, shift: np.ndarray) -> np.ndarray:
    """sym + shift * Id on upper-triangle storage."""
    out = sym.copy()
    for c, (i, j) in enumerate(SYM_COMPONENTS[grid.dim]):
        if i == j:
            out[c] = out[c] + shift
    return out


def map_states(src: State, dst_kind: str, params: PhysParams) -> State:
    """Change variables between formulations; round-trips to 1e-12.

    Supported pairs: primitive <-> cauchy and torus <-> effective (plus the
    identity).  The torus/effective pair requires the normalized gauge.
    """
    consts = DerivedConstants.from_params(params)
    grid = src.grid
    if src.formulation == dst_kind:
        return src.copy()

    if isinstance(src, PrimitiveState) and dst_kind == "cauchy":
        n = (
            pressure_arr(src.rho, params) - params.p_bar
            + params.K * (params.L - 1.0) * src.eta + params.zeta * src.eta**2
        )
        tau = _diag_shift(grid, src.sigma, -params.K * src.eta)
        return CauchyState(grid, n=n, u=src.v / consts.alpha, tau=tau, eta=src.eta.copy())

    if isinstance(src, CauchyState) and dst_kind == "primitive":
        rho = recover_rho(src.n, src.eta, params)
        sigma = _diag_shift(grid, src.tau, params.K * src.eta)
        return PrimitiveState(grid, rho=rho, v=consts.alpha * src.u, sigma=sigma,
                              eta=src.eta.copy())

    if isinstance(src, TorusState) and dst_kind == "effective":
        if not params.is_normalized():
            raise ValueError("effective formulation requires R = rho_bar = eta_bar = 1")
        p = src.P - 1.0
        b = src.eta - 1.0
        return EffectiveState(
            grid,
            a_tilde=a_tilde_of(p, b, params),
            u=src.u.copy(),
            tau=src.tau.copy(),
            p=p,
            b=b,
        )

    if isinstance(src, EffectiveState) and dst_kind == "torus":
        if not params.is_normalized():
            raise ValueError("effective formulation requires R = rho_bar = eta_bar = 1")
        return TorusState(grid, P=1.0 + src.p, u=src.u.copy(), eta=1.0 + src.b,
                          tau=src.tau.copy())

    raise ValueError(
        f"no change of variables from {src.formulation!r} to {dst_kind!r}"
    )
