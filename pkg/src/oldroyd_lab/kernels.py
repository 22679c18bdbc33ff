"""Hot pointwise kernels: numba loops with vectorized numpy fallbacks.

The jitted path is the default whenever numba imports; set
``OLDROYD_LAB_NUMBA=0`` to force the numpy fallback (the two paths agree to
roundoff and ``benchmarks/bench_kernels.py`` times them against each other).
"""

from __future__ import annotations

import os

import numpy as np

_WANT_NUMBA = os.environ.get("OLDROYD_LAB_NUMBA", "1") != "0"
try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None

NUMBA_AVAILABLE = _njit is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and _WANT_NUMBA


class NewtonError(RuntimeError):
    """The pressure-root Newton iteration failed to converge."""


# ---------------------------------------------------------------------------
# Density recovery: solve R rho^gamma = X pointwise, Newton from rho_bar.
# The map is monotone and convex for gamma > 1, so the iteration is globally
# safe on X > 0.
# ---------------------------------------------------------------------------

def _newton_rho_numpy(X, rho_bar, R, gamma, tol, maxit):
    rho = np.full_like(X, rho_bar)
    for _ in range(maxit):
        f = R * rho**gamma - X
        step = f / (R * gamma * rho ** (gamma - 1.0))
        rho -= step
        if np.max(np.abs(step)) <= tol:
            return rho, True
    return rho, bool(np.max(np.abs(step)) <= tol)


def _newton_rho_loops(X, rho_bar, R, gamma, tol, maxit):
    n = X.size
    rho = np.empty(n)
    ok = True
    for i in range(n):
        r = rho_bar
        converged = False
        for _ in range(maxit):
            rg = r**gamma  # single pow per iteration
            step = (R * rg - X[i]) * r / (R * gamma * rg)
            r -= step
            if abs(step) <= tol:
                converged = True
                break
        rho[i] = r
        if not converged:
            ok = False
    return rho, ok


# ---------------------------------------------------------------------------
# Symmetric-tensor stress right-hand side (upper-triangle storage):
#   out = c_jprod (J tau + tau J^T) + c_eta eta (J + J^T)
#         + c_id eta Id + c_div divu tau + c_damp tau
# with J[i, j] = d v_i / d x_j.
# ---------------------------------------------------------------------------

def _sym_stress_rhs_numpy(jac, tau, eta, divu, c_jprod, c_eta, c_id, c_div, c_damp, dim):
    from .grid import SYM_COMPONENTS, SYM_INDEX

    idx = SYM_INDEX[dim]
    comps = SYM_COMPONENTS[dim]
    out = np.empty_like(tau)
    for c, (i, j) in enumerate(comps):
        acc = (c_div * divu + c_damp) * tau[c]
        for k in range(dim):
            acc += c_jprod * (jac[i, k] * tau[idx[k][j]] + tau[idx[i][k]] * jac[j, k])
        acc += c_eta * eta * (jac[i, j] + jac[j, i])
        if i == j and c_id != 0.0:
            acc += c_id * eta
        out[c] = acc
    return out


def _sym_stress_rhs_2d_loops(jac, tau, eta, divu, c_jprod, c_eta, c_id, c_div, c_damp):
    n = eta.size
    out = np.empty((3, n))
    for p in range(n):
        j00 = jac[0, 0, p]
        j01 = jac[0, 1, p]
        j10 = jac[1, 0, p]
        j11 = jac[1, 1, p]
        txx = tau[0, p]
        txy = tau[1, p]
        tyy = tau[2, p]
        e = eta[p]
        base = c_div * divu[p] + c_damp
        out[0, p] = base * txx + 2.0 * c_jprod * (j00 * txx + j01 * txy) \
            + 2.0 * c_eta * e * j00 + c_id * e
        out[1, p] = base * txy + c_jprod * (j00 * txy + j01 * tyy + txx * j10 + txy * j11) \
            + c_eta * e * (j01 + j10)
        out[2, p] = base * tyy + 2.0 * c_jprod * (j10 * txy + j11 * tyy) \
            + 2.0 * c_eta * e * j11 + c_id * e
    return out


def _sym_stress_rhs_3d_loops(jac, tau, eta, divu, c_jprod, c_eta, c_id, c_div, c_damp):
    n = eta.size
    out = np.empty((6, n))
    for p in range(n):
        j = jac[:, :, p].copy()
        txx, txy, txz, tyy, tyz, tzz = (
            tau[0, p], tau[1, p], tau[2, p], tau[3, p], tau[4, p], tau[5, p]
        )
        t = np.empty((3, 3))
        t[0, 0] = txx
        t[0, 1] = txy
        t[0, 2] = txz
        t[1, 0] = txy
        t[1, 1] = tyy
        t[1, 2] = tyz
        t[2, 0] = txz
        t[2, 1] = tyz
        t[2, 2] = tzz
        base = c_div * divu[p] + c_damp
        e = eta[p]
        c = 0
        for a in range(3):
            for b in range(a, 3):
                acc = base * t[a, b]
                for k in range(3):
                    acc += c_jprod * (j[a, k] * t[k, b] + t[a, k] * j[b, k])
                acc += c_eta * e * (j[a, b] + j[b, a])
                if a == b:
                    acc += c_id * e
                out[c, p] = acc
                c += 1
    return out


if NUMBA_ENABLED:
    _newton_rho_jit = _njit(cache=True)(_newton_rho_loops)
    _sym_stress_rhs_2d_jit = _njit(cache=True)(_sym_stress_rhs_2d_loops)
    _sym_stress_rhs_3d_jit = _njit(cache=True)(_sym_stress_rhs_3d_loops)
else:
    _newton_rho_jit = None
    _sym_stress_rhs_2d_jit = None
    _sym_stress_rhs_3d_jit = None


def newton_rho(X: np.ndarray, rho_bar: float, R: float, gamma: float,
               tol: float = 1e-13, maxit: int = 50) -> np.ndarray:
    """Invert the pressure law on an array of targets X = R rho^gamma > 0."""
    flat = np.ascontiguousarray(X, dtype=np.float64).ravel()
    if NUMBA_ENABLED:
        rho, ok = _newton_rho_jit(flat, rho_bar, R, gamma, tol, maxit)
    else:
        rho, ok = _newton_rho_numpy(flat.copy(), rho_bar, R, gamma, tol, maxit)
    if not ok:
        raise NewtonError("density recovery did not converge")
    return rho.reshape(X.shape)


def sym_stress_rhs(jac: np.ndarray, tau: np.ndarray, eta: np.ndarray,
                   divu: np.ndarray, c_jprod: float, c_eta: float, c_id: float,
                   c_div: float, c_damp: float) -> np.ndarray:
    """Pointwise upper-convected stress tendency; see module docstring."""
    dim = jac.shape[0]
    grid_shape = eta.shape
    if NUMBA_ENABLED:
        jac_f = np.ascontiguousarray(jac.reshape(dim, dim, -1))
        tau_f = np.ascontiguousarray(tau.reshape(tau.shape[0], -1))
        eta_f = np.ascontiguousarray(eta.ravel())
        divu_f = np.ascontiguousarray(divu.ravel())
        fn = _sym_stress_rhs_2d_jit if dim == 2 else _sym_stress_rhs_3d_jit
        out = fn(jac_f, tau_f, eta_f, divu_f,
                 float(c_jprod), float(c_eta), float(c_id), float(c_div), float(c_damp))
        return out.reshape(tau.shape)
    return _sym_stress_rhs_numpy(jac, tau, eta, divu,
                                 c_jprod, c_eta, c_id, c_div, c_damp, dim)


# Explicit handles for the benchmark: both paths regardless of the env flag.
def newton_rho_numpy_path(X, rho_bar, R, gamma, tol=1e-13, maxit=50):
    rho, ok = _newton_rho_numpy(np.array(X, dtype=np.float64).ravel(), rho_bar, R, gamma, tol, maxit)
    if not ok:
        raise NewtonError("density recovery did not converge")
    return rho.reshape(np.shape(X))


def sym_stress_rhs_numpy_path(jac, tau, eta, divu, c_jprod, c_eta, c_id, c_div, c_damp):
    return _sym_stress_rhs_numpy(jac, tau, eta, divu, c_jprod, c_eta, c_id, c_div, c_damp, jac.shape[0])
