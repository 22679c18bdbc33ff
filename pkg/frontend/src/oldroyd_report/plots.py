"""Decay plots: data, fitted line, and an optional predicted-slope guide."""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .csvio import column_sum, read_series  # noqa: E402
from .fits import FitResult, fit_series  # noqa: E402

# deterministic SVG output: fixed hash salt, no creation date
matplotlib.rcParams["svg.hashsalt"] = "oldroyd-report"
_SAVE_KW = {"svg": {"metadata": {"Date": None}}, "png": {"dpi": 120}}


def plot_decay(csv_path, column: str, model: str,
               predicted: float | None = None,
               window: tuple[float, float] | None = None,
               out_path=None, image_format: str = "svg",
               extra_csvs=()) -> tuple[Path, FitResult]:
    """Render one decay plot; returns (image path, recomputed fit).

    Log-log axes for the algebraic model, semilog for the exponential one.
    ``predicted`` draws a guide line with the given exponent (algebraic) or
    rate (exponential) through the window midpoint.  ``extra_csvs`` overlays
    the same column from other series files for comparison.
    """
    columns = read_series(csv_path)
    t = columns["t"]
    y = column_sum(columns, column)
    if window is None:
        window = (float(t[0]), float(t[-1]))
    fit = fit_series(t, y, model, window)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    label = Path(str(csv_path)).name
    sel = y > 0
    if model == "algebraic":
        ax.loglog(1.0 + t[sel], y[sel], ".", ms=3, label=label)
        xs = np.linspace(np.log1p(window[0]), np.log1p(window[1]), 64)
        ax.plot(np.exp(xs), fit.amplitude * np.exp(fit.exponent_or_rate * xs),
                "-", lw=1.5,
                label=f"fit: slope {fit.exponent_or_rate:.4f}")
        if predicted is not None:
            mid = 0.5 * (np.log1p(window[0]) + np.log1p(window[1]))
            anchor = fit.amplitude * np.exp(fit.exponent_or_rate * mid)
            ax.plot(np.exp(xs), anchor * np.exp(predicted * (xs - mid)),
                    "--", lw=1.2, label=f"predicted slope {predicted:g}")
        ax.set_xlabel("1 + t")
    else:
        ax.semilogy(t[sel], y[sel], ".", ms=3, label=label)
        xs = np.linspace(window[0], window[1], 64)
        ax.plot(xs, fit.amplitude * np.exp(-fit.exponent_or_rate * xs), "-",
                lw=1.5, label=f"fit: rate {fit.exponent_or_rate:.4f}")
        if predicted is not None:
            mid = 0.5 * (window[0] + window[1])
            anchor = fit.amplitude * np.exp(-fit.exponent_or_rate * mid)
            ax.plot(xs, anchor * np.exp(-predicted * (xs - mid)), "--",
                    lw=1.2, label=f"predicted rate {predicted:g}")
        ax.set_xlabel("t")
    for extra in extra_csvs:
        ecols = read_series(extra)
        ey = column_sum(ecols, column)
        esel = ey > 0
        xvals = 1.0 + ecols["t"][esel] if model == "algebraic" else ecols["t"][esel]
        ax.plot(xvals, ey[esel], ".", ms=3, alpha=0.6,
                label=Path(str(extra)).name)
    ax.set_ylabel(column)
    ax.set_title(
        f"{column} ({model}); window [{window[0]:g}, {window[1]:g}], "
        f"R^2 = {fit.r_squared:.6f}"
    )
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)

    if out_path is None:
        out_path = Path(str(csv_path)).with_suffix(f".{column}.{image_format}")
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format=image_format,
                **_SAVE_KW.get(image_format, {}))
    plt.close(fig)
    return out_path, fit
