"""Fourier-multiplier operators on periodic fields.

All operators here are diagonal in spectral space and therefore commute
pairwise.  They share the grid's derivative frequency map (Nyquist modes
annihilated, see :mod:`oldroyd_lab.grid`), which makes the projector algebra
exact: ``P + Q = I`` holds coefficient-wise and ``div(P v)`` vanishes to
roundoff on arbitrary real fields.

The zero mode (the spatial mean) is annihilated by the inverse Laplacian and
by negative fractional powers.  With strict mode on, a field whose mean
exceeds ``MEAN_TOL`` raises :class:`MeanViolationError` instead of being
silently projected.
"""

from __future__ import annotations

import numpy as np

from .grid import (
    Field,
    Grid,
    ScalarField,
    SymTensorField,
    VectorField,
    check_same_grid,
)

MEAN_TOL = 1e-10

# Package-wide default for the strict-mean policy; the CLI's --strict-means
# flag flips it once at startup.
STRICT_MEANS_DEFAULT = False


class MeanViolationError(ValueError):
    """A mean-annihilating operator met a field with non-negligible mean."""


def set_strict_means(flag: bool) -> None:
    global STRICT_MEANS_DEFAULT
    STRICT_MEANS_DEFAULT = bool(flag)


def _resolve_strict(strict: bool | None) -> bool:
    return STRICT_MEANS_DEFAULT if strict is None else strict


# ---------------------------------------------------------------------------
# Array-level operators (trailing axes are the grid axes; leading axes are
# free component axes).  These are the workhorses used by the model RHS code.
# ---------------------------------------------------------------------------

def grad_from(grid: Grid, c: np.ndarray) -> np.ndarray:
    """Gradient from precomputed scalar coefficients."""
    out = np.empty((grid.dim,) + grid.shape)
    for j in range(grid.dim):
        out[j] = grid.irfft(1j * grid.kd[j] * c)
    return out


def grad_arr(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Gradient of a scalar array; returns a (dim, ...) stacked array."""
    if values.ndim != grid.dim:
        raise ValueError("grad_arr expects a scalar sample array")
    return grad_from(grid, grid.rfft(values))


def jac_from(grid: Grid, c: np.ndarray) -> np.ndarray:
    """Velocity gradient from precomputed vector coefficients."""
    out = np.empty((grid.dim, grid.dim) + grid.shape)
    for i in range(grid.dim):
        for j in range(grid.dim):
            out[i, j] = grid.irfft(1j * grid.kd[j] * c[i])
    return out


def jacobian_arr(grid: Grid, vec: np.ndarray) -> np.ndarray:
    """Velocity gradient J[i, j] = d v_i / d x_j as a (dim, dim, ...) array."""
    return jac_from(grid, grid.rfft(vec))


def deriv_arr(grid: Grid, values: np.ndarray, axis: int) -> np.ndarray:
    """Single spectral partial derivative along a grid axis."""
    c = grid.rfft(values)
    return grid.irfft(1j * grid.kd[axis] * c)


def div_arr(grid: Grid, vec: np.ndarray) -> np.ndarray:
    """Divergence of a (dim, ...) stacked vector array."""
    c = grid.rfft(vec)
    acc = 1j * grid.kd[0] * c[0]
    for j in range(1, grid.dim):
        acc = acc + 1j * grid.kd[j] * c[j]
    return grid.irfft(acc)


def lap_from(grid: Grid, c: np.ndarray) -> np.ndarray:
    return grid.irfft(-grid.k2d * c)


def lap_arr(grid: Grid, values: np.ndarray) -> np.ndarray:
    return lap_from(grid, grid.rfft(values))


def graddiv_from(grid: Grid, c: np.ndarray) -> np.ndarray:
    dv = 1j * grid.kd[0] * c[0]
    for j in range(1, grid.dim):
        dv = dv + 1j * grid.kd[j] * c[j]
    out = np.empty((grid.dim,) + grid.shape)
    for j in range(grid.dim):
        out[j] = grid.irfft(1j * grid.kd[j] * dv)
    return out


def graddiv_arr(grid: Grid, vec: np.ndarray) -> np.ndarray:
    """grad(div v) as a (dim, ...) array, assembled in one spectral pass."""
    return graddiv_from(grid, grid.rfft(vec))


def leray_split_arr(grid: Grid, vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (P v, Q v): divergence-free and curl-free (gradient) parts.

    The zero mode, and every mode invisible to the derivative map, belongs
    to P: constants are divergence-free, and Q must remain a gradient.
    """
    c = grid.rfft(vec)
    k2 = grid.k2d
    inv = np.where(k2 > 0.0, 1.0 / np.where(k2 > 0.0, k2, 1.0), 0.0)
    kdotc = grid.kd[0] * c[0]
    for j in range(1, grid.dim):
        kdotc = kdotc + grid.kd[j] * c[j]
    kdotc = kdotc * inv
    q = np.empty_like(vec)
    p = np.empty_like(vec)
    for j in range(grid.dim):
        qc = grid.kd[j] * kdotc
        q[j] = grid.irfft(qc)
        p[j] = grid.irfft(c[j] - qc)
    return p, q


def _check_mean(grid: Grid, values: np.ndarray, strict: bool | None, what: str) -> None:
    if _resolve_strict(strict):
        means = np.atleast_1d(grid.integrate(values) / grid.vol)
        worst = float(np.max(np.abs(means)))
        if worst > MEAN_TOL:
            raise MeanViolationError(
                f"{what} requires a mean-free field; |mean| = {worst:.3e}"
            )


def inv_lap_arr(grid: Grid, values: np.ndarray, strict: bool | None = None) -> np.ndarray:
    """Inverse Laplacian with zero-mode annihilation."""
    _check_mean(grid, values, strict, "inverse Laplacian")
    k2 = grid.k2d
    inv = np.where(k2 > 0.0, -1.0 / np.where(k2 > 0.0, k2, 1.0), 0.0)
    return grid.irfft(inv * grid.rfft(values))


def lambda_power_arr(
    grid: Grid, values: np.ndarray, beta: float, strict: bool | None = None
) -> np.ndarray:
    """Fractional Laplacian power: multiply coefficients by |xi|^beta."""
    if beta == 0.0:
        return values.copy()
    if beta < 0.0:
        _check_mean(grid, values, strict, "negative Lambda power")
    k2 = grid.k2d
    with np.errstate(divide="ignore"):
        mult = np.where(k2 > 0.0, np.power(np.sqrt(np.where(k2 > 0.0, k2, 1.0)), beta), 0.0)
    return grid.irfft(mult * grid.rfft(values))


def dealias_arr(grid: Grid, values: np.ndarray) -> np.ndarray:
    """2/3-rule truncation: zero every coefficient with any |mode_j| > N/3."""
    return grid.irfft(grid.dealias_mask * grid.rfft(values))


def dealias_coeffs(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    return grid.dealias_mask * coeffs


def mean_free(grid: Grid, values: np.ndarray) -> np.ndarray:
    return values - values.mean(axis=tuple(range(-grid.dim, 0)), keepdims=True)


def l2_norm_arr(grid: Grid, values: np.ndarray, comp_weights=None) -> float:
    """Physical-space L2 norm; multi-component arrays sum in quadrature."""
    sq = values * values
    if comp_weights is not None:
        w = np.asarray(comp_weights).reshape((-1,) + (1,) * grid.dim)
        sq = w * sq
    return float(np.sqrt(grid.vol * sq.mean(axis=tuple(range(-grid.dim, 0))).sum()))


# ---------------------------------------------------------------------------
# Field-level API
# ---------------------------------------------------------------------------

def gradient(f: ScalarField) -> VectorField:
    """Exact spectral gradient of a scalar field."""
    return VectorField(f.grid, grad_arr(f.grid, f.values))


def divergence(v: VectorField | SymTensorField) -> ScalarField | VectorField:
    """Divergence of a vector (scalar out) or symmetric tensor (vector out)."""
    grid = v.grid
    if isinstance(v, VectorField):
        return ScalarField(grid, div_arr(grid, v.values))
    full = v.expand()
    out = np.empty((grid.dim,) + grid.shape)
    for i in range(grid.dim):
        out[i] = div_arr(grid, full[i])
    return VectorField(grid, out)


def laplacian(f: Field) -> Field:
    return type(f)(f.grid, lap_arr(f.grid, f.values))


def leray_P(v: VectorField) -> VectorField:
    p, _ = leray_split_arr(v.grid, v.values)
    return VectorField(v.grid, p)


def leray_Q(v: VectorField) -> VectorField:
    _, q = leray_split_arr(v.grid, v.values)
    return VectorField(v.grid, q)


def inv_laplacian(f: Field, strict: bool | None = None) -> Field:
    return type(f)(f.grid, inv_lap_arr(f.grid, f.values, strict=strict))


def lambda_power(f: Field, beta: float, strict: bool | None = None) -> Field:
    return type(f)(f.grid, lambda_power_arr(f.grid, f.values, beta, strict=strict))


def dealias(f: Field) -> Field:
    return type(f)(f.grid, dealias_arr(f.grid, f.values))


def l2_norm(f: Field) -> float:
    from .grid import SYM_WEIGHTS

    w = SYM_WEIGHTS[f.grid.dim] if isinstance(f, SymTensorField) else None
    return l2_norm_arr(f.grid, f.values, comp_weights=w)


def advect_scalar(grid: Grid, vel: np.ndarray, scalar: np.ndarray) -> np.ndarray:
    """Pointwise v . grad(scalar); caller dealiases if needed."""
    g = grad_arr(grid, scalar)
    acc = vel[0] * g[0]
    for j in range(1, grid.dim):
        acc += vel[j] * g[j]
    return acc


__all__ = [
    "MEAN_TOL",
    "MeanViolationError",
    "set_strict_means",
    "grad_arr",
    "grad_from",
    "jacobian_arr",
    "jac_from",
    "deriv_arr",
    "div_arr",
    "lap_arr",
    "lap_from",
    "graddiv_arr",
    "graddiv_from",
    "leray_split_arr",
    "inv_lap_arr",
    "lambda_power_arr",
    "dealias_arr",
    "dealias_coeffs",
    "mean_free",
    "l2_norm_arr",
    "gradient",
    "divergence",
    "laplacian",
    "leray_P",
    "leray_Q",
    "inv_laplacian",
    "lambda_power",
    "dealias",
    "l2_norm",
    "advect_scalar",
    "check_same_grid",
]
