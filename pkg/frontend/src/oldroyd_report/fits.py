"""Decay-law fits, recomputed independently of the simulator.

Same least-squares problem on log-transformed data, solved here with
centered normal equations (the simulator uses a polynomial fit); the two
agree far below the 1e-9 cross-check tolerance on well-conditioned windows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FitResult:
    model: str
    window: tuple
    exponent_or_rate: float
    amplitude: float
    r_squared: float
    n_samples: int


def fit_series(t: np.ndarray, y: np.ndarray, model: str,
               window: tuple[float, float]) -> FitResult:
    if model not in ("algebraic", "exponential"):
        raise ValueError(f"unknown decay model {model!r}")
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must satisfy t_lo < t_hi")
    sel = (t >= lo) & (t <= hi)
    ts = np.asarray(t, dtype=float)[sel]
    ys = np.asarray(y, dtype=float)[sel]
    if ts.size < 2:
        raise ValueError(f"empty fit window [{lo}, {hi}]")
    if np.min(ys) <= 0.0:
        raise ValueError("non-positive values in fit window")
    x = np.log1p(ts) if model == "algebraic" else ts
    logy = np.log(ys)
    xc = x - x.mean()
    slope = float(np.dot(xc, logy - logy.mean()) / np.dot(xc, xc))
    intercept = float(logy.mean() - slope * x.mean())
    resid = logy - (slope * x + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(logy - logy.mean(), logy - logy.mean()))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    value = slope if model == "algebraic" else -slope
    return FitResult(
        model=model,
        window=(lo, hi),
        exponent_or_rate=value,
        amplitude=float(np.exp(intercept)),
        r_squared=r2,
        n_samples=int(ts.size),
    )
