"""Scenario orchestration and file IO: CSV time series, verdicts, runs.

The CSV schema (one row per record) is::

    t,E_inf,E_1,h3_u,h3_tau,h3_n,h3_eta,l2_n,l2_u,l2_tau,
    mass,momentum_x,momentum_y[,momentum_z],tau_min[,lambda<beta>_<group>...]

Momentum columns follow the grid dimension; one extra column appears per
configured Lambda^beta diagnostic.  Floats are written with repr precision,
so identical runs produce bitwise-identical files.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .config import FitSpec, RunConfig, echo_config
from .diagnostics import DecayFit, EnergyRecord, fit_decay, lambda_column, make_recorder
from .grid import build_grid
from .initial_data import initial_data
from .integrate import (
    SimulationRun,
    acoustic_speed,
    run,
    write_checkpoint,
)
from .lp import build_blocks


def base_columns(dim: int) -> list[str]:
    cols = ["t", "E_inf", "E_1", "h3_u", "h3_tau", "h3_n", "h3_eta",
            "l2_n", "l2_u", "l2_tau", "mass", "momentum_x", "momentum_y"]
    if dim == 3:
        cols.append("momentum_z")
    cols.append("tau_min")
    return cols


def csv_columns(dim: int, lambda_specs=()) -> list[str]:
    return base_columns(dim) + [lambda_column(b, g) for b, g in lambda_specs]


def record_row(rec: EnergyRecord, dim: int, lambda_specs=()) -> list[float]:
    row = [rec.t, rec.E_inf, rec.E_1, rec.h3_u, rec.h3_tau, rec.h3_n,
           rec.h3_eta, rec.l2_n, rec.l2_u, rec.l2_tau, rec.mass,
           rec.momentum[0], rec.momentum[1]]
    if dim == 3:
        row.append(rec.momentum[2])
    row.append(rec.tau_min)
    for b, g in lambda_specs:
        row.append(rec.lambda_norms[lambda_column(b, g)])
    return row


def write_series_csv(path, records, dim: int, lambda_specs=()) -> None:
    cols = csv_columns(dim, lambda_specs)
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for rec in records:
            fh.write(",".join(f"{v!r}" for v in record_row(rec, dim, lambda_specs)))
            fh.write("\n")


def read_series_csv(path) -> dict[str, np.ndarray]:
    """Parse a series CSV back into named columns, schema-checked."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty CSV")
        cols = header.split(",")
        dim = 3 if "momentum_z" in cols else 2
        required = base_columns(dim)
        missing = [c for c in required if c not in cols]
        if missing:
            raise ValueError(f"{path}: missing required columns {missing}")
        data = [[] for _ in cols]
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise ValueError(f"{path}:{line_no}: expected {len(cols)} fields")
            for i, part in enumerate(parts):
                data[i].append(float(part))
    return {c: np.asarray(v) for c, v in zip(cols, data)}


def column_expression(columns: dict[str, np.ndarray], expr: str) -> np.ndarray:
    """Evaluate a column name or a '+'-joined sum of column names."""
    parts = [p.strip() for p in expr.split("+")]
    missing = [p for p in parts if p not in columns]
    if missing:
        raise KeyError(f"unknown column(s) {missing} in expression {expr!r}")
    out = columns[parts[0]].copy()
    for p in parts[1:]:
        out = out + columns[p]
    return out


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------

@dataclass
class Verdict:
    criterion: str
    description: str
    expected: str
    measured: float | str | None
    passed: bool | None         # None = not evaluated
    severity: str = "hard"      # soft criteria warn instead of failing a suite
    metadata: dict = field(default_factory=dict)

    def status(self) -> str:
        if self.passed is None:
            return "NOT EVALUATED"
        if self.passed:
            return "PASS"
        return "WARN" if self.severity == "soft" else "FAIL"


def write_verdicts(path, verdicts: list[Verdict], meta: dict | None = None) -> None:
    payload = {
        "format": "oldroyd-lab-verdict",
        "version": 1,
        "meta": meta or {},
        "criteria": [asdict(v) | {"status": v.status()} for v in verdicts],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_verdicts(path) -> dict:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != "oldroyd-lab-verdict":
        raise ValueError(f"{path}: not a verdict file")
    return payload


def suite_exit_code(verdicts: list[Verdict]) -> int:
    bad = [v for v in verdicts if v.passed is False and v.severity == "hard"]
    not_run = [v for v in verdicts if v.passed is None]
    return 1 if (bad or not_run) else 0


# ---------------------------------------------------------------------------
# Scenario driver
# ---------------------------------------------------------------------------

def default_fit_window(spec: FitSpec, cfg: RunConfig) -> tuple[float, float]:
    t_end = cfg.integrator.t_end
    lo, hi = spec.window
    if lo == 0.0 and hi == 0.0:
        lo, hi = t_end / 5.0, 4.0 * t_end / 5.0
    return lo, hi


def wrap_around_time(cfg: RunConfig) -> float:
    """Signal round-trip bound for the whole-space surrogate on a big box."""
    return cfg.box_length / (2.0 * acoustic_speed(cfg.formulation, cfg.params))


def fit_from_csv(columns: dict[str, np.ndarray], spec: FitSpec,
                 window: tuple[float, float]) -> DecayFit:
    y = column_expression(columns, spec.column)
    series = list(zip(columns["t"], y))
    return fit_decay(series, spec.model, window)


@dataclass
class ScenarioResult:
    config: RunConfig
    sim: SimulationRun
    csv_path: Path
    verdict_path: Path | None
    verdicts: list[Verdict]
    exit_code: int


def run_scenario(cfg: RunConfig, out_dir, quiet: bool = False) -> ScenarioResult:
    """Integrate one configuration and write CSV, checkpoint, echo, verdict."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = build_grid(cfg.dim, cfg.n_per_axis, cfg.box_length)
    blocks = build_blocks(grid, cfg.k0)
    state = initial_data(cfg.generator, cfg.amplitude, cfg.seed, grid,
                         cfg.params, cfg.formulation,
                         width=cfg.width, xi0_modes=cfg.xi0_modes)
    recorder = make_recorder(cfg.params, blocks, cfg.lambda_specs)

    (out / "config_echo.cfg").write_text(echo_config(cfg))

    ckpt_base = out / cfg.checkpoint_name

    def checkpoint_cb(st, t, step_index):
        write_checkpoint(ckpt_base, st, cfg.params, t)

    sim = run(state, cfg.params, cfg.integrator, recorder=recorder,
              checkpoint_cb=checkpoint_cb)

    csv_path = out / cfg.csv_name
    write_series_csv(csv_path, sim.records, cfg.dim, cfg.lambda_specs)

    verdicts: list[Verdict] = []
    verdict_path = out / cfg.verdict_name
    meta = {
        "formulation": cfg.formulation,
        "n_per_axis": cfg.n_per_axis,
        "dim": cfg.dim,
        "dt": cfg.integrator.dt,
        "t_end": cfg.integrator.t_end,
        "status": sim.status,
    }
    if sim.status != "ok":
        meta["failure"] = sim.failure
        if cfg.fit is not None:
            verdicts.append(Verdict(
                criterion="fit",
                description=f"{cfg.fit.model} fit of {cfg.fit.column}",
                expected="run completed",
                measured=None,
                passed=None,
                metadata={"reason": "integration failed", **meta},
            ))
    elif cfg.fit is not None:
        window = default_fit_window(cfg.fit, cfg)
        fmeta = {}
        if cfg.fit.model == "algebraic" and cfg.formulation in ("cauchy", "primitive"):
            wrap = wrap_around_time(cfg)
            fmeta["wrap_around_time"] = wrap
            window = (window[0], min(window[1], wrap))
        columns = read_series_csv(csv_path)
        fit = fit_from_csv(columns, cfg.fit, window)
        fmeta.update({
            "column": cfg.fit.column,
            "model": cfg.fit.model,
            "csv": str(csv_path.name),
            "window": list(fit.window),
            "exponent_or_rate": fit.exponent_or_rate,
            "amplitude": fit.amplitude,
            "r_squared": fit.r_squared,
            "n_samples": fit.n_samples,
            **meta,
        })
        if cfg.fit.expected is not None and cfg.fit.tol is not None:
            lo = cfg.fit.expected - cfg.fit.tol
            hi = cfg.fit.expected + cfg.fit.tol
            passed = lo <= fit.exponent_or_rate <= hi
            expected = f"[{lo:g}, {hi:g}]"
        else:
            passed = True
            expected = "(fit reported, no target configured)"
        verdicts.append(Verdict(
            criterion="fit",
            description=f"{cfg.fit.model} fit of {cfg.fit.column}",
            expected=expected,
            measured=fit.exponent_or_rate,
            passed=passed,
            metadata=fmeta,
        ))

    write_verdicts(verdict_path, verdicts, meta)
    exit_code = 0 if sim.status == "ok" else 1
    if suite_exit_code(verdicts) and verdicts:
        exit_code = 1
    if not quiet:
        print(f"[run] {cfg.formulation} N={cfg.n_per_axis}^{cfg.dim} "
              f"t_end={cfg.integrator.t_end:g}: {sim.status} "
              f"({sim.steps} steps, {sim.wall_time:.1f} s)")
        for v in verdicts:
            print(f"[verdict] {v.criterion}: {v.status()} "
                  f"(measured {v.measured}, expected {v.expected})")
    return ScenarioResult(cfg, sim, csv_path, verdict_path, verdicts, exit_code)


def worker_cap(requested: int | None) -> int:
    """Respect the OLDROYD_LAB_THREADS cap on worker parallelism."""
    cap = os.environ.get("OLDROYD_LAB_THREADS")
    n = requested if requested is not None else 1
    if cap is not None:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)
