"""Flat key-value run configuration: parsing, validation, and echo.

Format: one ``section.key = value`` per line, ``#`` comments, blank lines
ignored.  Unknown keys are rejected with their line number.  Values may use
a ``pi`` suffix (``64pi``) for lengths.  The full key table lives in the
README; :func:`echo_config` emits every effective value and parses back to
an identical configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .initial_data import GENERATORS
from .integrate import IntegratorConfig
from .params import PhysParams


class ConfigError(ValueError):
    def __init__(self, message: str, line_no: int | None = None,
                 line: str | None = None):
        self.line_no = line_no
        self.line = line
        where = f" (line {line_no}: {line!r})" if line_no is not None else ""
        super().__init__(f"{message}{where}")


FORMULATIONS = ("primitive", "cauchy", "torus", "effective")


@dataclass(frozen=True)
class FitSpec:
    model: str = "exponential"       # alg | exp accepted in files
    column: str = "h3_u+h3_tau"
    window: tuple[float, float] = (0.0, 0.0)  # (0, 0) = default window
    expected: float | None = None
    tol: float | None = None


@dataclass(frozen=True)
class RunConfig:
    formulation: str = "torus"
    dim: int = 2
    n_per_axis: int = 64
    box_length: float = 2.0 * math.pi
    params: PhysParams = field(default_factory=PhysParams)
    integrator: IntegratorConfig = field(
        default_factory=lambda: IntegratorConfig(dt=1e-2, t_end=1.0)
    )
    k0: int | None = None
    generator: str = "random_smooth"
    amplitude: float = 1e-2
    seed: int = 0
    width: float | None = None
    xi0_modes: float = 4.0
    lambda_specs: tuple = ()
    fit: FitSpec | None = None
    csv_name: str = "series.csv"
    verdict_name: str = "verdict.json"
    checkpoint_name: str = "final.ckpt"


def _parse_float(raw: str) -> float:
    s = raw.strip().lower()
    if s.endswith("pi"):
        head = s[:-2].strip()
        return (float(head) if head else 1.0) * math.pi
    return float(s)


def _parse_bool(raw: str) -> bool:
    s = raw.strip().lower()
    if s in ("true", "yes", "on", "1"):
        return True
    if s in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_lambda_specs(raw: str) -> tuple:
    out = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        beta_s, _, group = item.partition(":")
        group = group.strip()
        if group not in ("nu", "tau"):
            raise ValueError(f"lambda group must be nu or tau, got {group!r}")
        out.append((float(beta_s), group))
    return tuple(out)


def _parse_window(raw: str) -> tuple[float, float]:
    parts = [p for p in raw.split(",") if p.strip()]
    if len(parts) != 2:
        raise ValueError("window must be 'a,b'")
    return (_parse_float(parts[0]), _parse_float(parts[1]))


_PARAM_KEYS = {
    "mu": "mu", "lambda": "lam", "r": "R", "gamma": "gamma", "k": "K",
    "l": "L", "zeta": "zeta", "a0": "A0", "lambda1": "lambda1",
    "rho_bar": "rho_bar", "eta_bar": "eta_bar",
}

_INT_KEYS = {
    "dt": float, "t_end": float, "scheme": str, "cfl_safety": float,
    "adaptive": bool, "dealias_every_rhs": bool, "record_every": int,
    "checkpoint_every": int,
}


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a flat config; defaults fill missing keys."""
    values: dict[str, tuple[str, int, str]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'section.key = value'", line_no, raw)
        key, _, val = line.partition("=")
        key = key.strip().lower()
        val = val.strip()
        if "." not in key:
            raise ConfigError(f"key {key!r} has no section", line_no, raw)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", line_no, raw)
        values[key] = (val, line_no, raw)

    def take(key: str, conv, default):
        item = values.pop(key, None)
        if item is None:
            return default
        val, line_no, raw = item
        try:
            if conv is bool:
                return _parse_bool(val)
            if conv is float:
                return _parse_float(val)
            return conv(val)
        except ValueError as exc:
            raise ConfigError(str(exc), line_no, raw) from None

    lines = dict(values)  # keep line info for validation messages

    def guard(cond: bool, message: str, key: str):
        if not cond:
            item = lines.get(key)
            raise ConfigError(message, item[1] if item else None,
                              item[2] if item else None)

    formulation = take("run.formulation", str, RunConfig.formulation).lower()
    if formulation not in FORMULATIONS:
        raise ConfigError(f"unknown formulation {formulation!r}; "
                          f"one of {FORMULATIONS}")

    dim = take("grid.dim", int, RunConfig.dim)
    n_per_axis = take("grid.n_per_axis", int, RunConfig.n_per_axis)
    box_length = take("grid.box_length", float, RunConfig.box_length)

    pkw = {}
    for file_key, attr in _PARAM_KEYS.items():
        v = take(f"params.{file_key}", float, None)
        if v is not None:
            pkw[attr] = v
    params = PhysParams(**pkw)

    ikw = {}
    for file_key, conv in _INT_KEYS.items():
        v = take(f"integrator.{file_key}", conv, None)
        if v is not None:
            ikw[file_key] = v
    ikw.setdefault("dt", 1e-2)
    ikw.setdefault("t_end", 1.0)

    k0 = take("lp.k0", int, None)
    generator = take("initial.generator", str, RunConfig.generator).lower()
    amplitude = take("initial.amplitude", float, RunConfig.amplitude)
    seed = take("initial.seed", int, RunConfig.seed)
    width = take("initial.width", float, None)
    xi0_modes = take("initial.xi0_modes", float, RunConfig.xi0_modes)
    lambda_specs = take("diagnostics.lambda_betas", _parse_lambda_specs, ())

    fit = None
    fit_keys = [k for k in values if k.startswith("fit.")]
    if fit_keys:
        model = take("fit.model", str, "exp").lower()
        model = {"alg": "algebraic", "exp": "exponential"}.get(model, model)
        if model not in ("algebraic", "exponential"):
            raise ConfigError(f"fit.model must be alg or exp, got {model!r}")
        fit = FitSpec(
            model=model,
            column=take("fit.column", str, FitSpec.column),
            window=take("fit.window", _parse_window, (0.0, 0.0)),
            expected=take("fit.expected", float, None),
            tol=take("fit.tol", float, None),
        )

    csv_name = take("output.csv", str, RunConfig.csv_name)
    verdict_name = take("output.verdict", str, RunConfig.verdict_name)
    checkpoint_name = take("output.checkpoint", str, RunConfig.checkpoint_name)

    if values:
        key = next(iter(values))
        _, line_no, raw = values[key]
        raise ConfigError(f"unknown key {key!r}", line_no, raw)

    # structural constraints, reported against the offending line
    guard(dim in (2, 3), "grid.dim must be 2 or 3", "grid.dim")
    guard(n_per_axis % 2 == 0 and n_per_axis >= 8,
          "grid.n_per_axis must be even and >= 8", "grid.n_per_axis")
    guard(box_length > 0, "grid.box_length must be positive", "grid.box_length")
    try:
        params.validate(dim)
    except ValueError as exc:
        msg = str(exc)
        key = None
        for file_key, attr in _PARAM_KEYS.items():
            if attr.lower().lstrip("_") in msg.lower() and f"params.{file_key}" in lines:
                key = f"params.{file_key}"
                break
        item = lines.get(key) if key else None
        raise ConfigError(msg, item[1] if item else None,
                          item[2] if item else None) from None
    if formulation == "effective" and not params.is_normalized():
        raise ConfigError("effective formulation requires R = rho_bar = eta_bar = 1")
    try:
        integrator = IntegratorConfig(**ikw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    guard(generator in GENERATORS,
          f"unknown generator {generator!r}; one of {GENERATORS}",
          "initial.generator")
    guard(amplitude >= 0, "initial.amplitude must be >= 0", "initial.amplitude")
    if k0 is not None:
        guard(k0 >= 1, "lp.k0 must be >= 1", "lp.k0")

    return RunConfig(
        formulation=formulation,
        dim=dim,
        n_per_axis=n_per_axis,
        box_length=box_length,
        params=params,
        integrator=integrator,
        k0=k0,
        generator=generator,
        amplitude=amplitude,
        seed=seed,
        width=width,
        xi0_modes=xi0_modes,
        lambda_specs=lambda_specs,
        fit=fit,
        csv_name=csv_name,
        verdict_name=verdict_name,
        checkpoint_name=checkpoint_name,
    )


def echo_config(cfg: RunConfig) -> str:
    """Render every effective value; parsing the result reproduces cfg."""
    p = cfg.params
    it = cfg.integrator
    lines = [
        "# effective configuration (all defaults resolved)",
        f"run.formulation = {cfg.formulation}",
        f"grid.dim = {cfg.dim}",
        f"grid.n_per_axis = {cfg.n_per_axis}",
        f"grid.box_length = {cfg.box_length!r}",
        f"params.mu = {p.mu!r}",
        f"params.lambda = {p.lam!r}",
        f"params.R = {p.R!r}",
        f"params.gamma = {p.gamma!r}",
        f"params.K = {p.K!r}",
        f"params.L = {p.L!r}",
        f"params.zeta = {p.zeta!r}",
        f"params.A0 = {p.A0!r}",
        f"params.lambda1 = {p.lambda1!r}",
        f"params.rho_bar = {p.rho_bar!r}",
        f"params.eta_bar = {p.eta_bar!r}",
        f"integrator.dt = {it.dt!r}",
        f"integrator.t_end = {it.t_end!r}",
        f"integrator.scheme = {it.scheme}",
        f"integrator.cfl_safety = {it.cfl_safety!r}",
        f"integrator.adaptive = {str(it.adaptive).lower()}",
        f"integrator.dealias_every_rhs = {str(it.dealias_every_rhs).lower()}",
        f"integrator.record_every = {it.record_every}",
        f"integrator.checkpoint_every = {it.checkpoint_every}",
        f"initial.generator = {cfg.generator}",
        f"initial.amplitude = {cfg.amplitude!r}",
        f"initial.seed = {cfg.seed}",
        f"initial.xi0_modes = {cfg.xi0_modes!r}",
        f"output.csv = {cfg.csv_name}",
        f"output.verdict = {cfg.verdict_name}",
        f"output.checkpoint = {cfg.checkpoint_name}",
    ]
    if cfg.k0 is not None:
        lines.append(f"lp.k0 = {cfg.k0}")
    if cfg.width is not None:
        lines.append(f"initial.width = {cfg.width!r}")
    if cfg.lambda_specs:
        spec = ", ".join(f"{b:g}:{g}" for b, g in cfg.lambda_specs)
        lines.append(f"diagnostics.lambda_betas = {spec}")
    if cfg.fit is not None:
        lines.append(f"fit.model = {cfg.fit.model}")
        lines.append(f"fit.column = {cfg.fit.column}")
        lines.append(f"fit.window = {cfg.fit.window[0]!r},{cfg.fit.window[1]!r}")
        if cfg.fit.expected is not None:
            lines.append(f"fit.expected = {cfg.fit.expected!r}")
        if cfg.fit.tol is not None:
            lines.append(f"fit.tol = {cfg.fit.tol!r}")
    return "\n".join(lines) + "\n"
