"""The acceptance criteria suite (A1..A11), shared by CLI and tests.

Each criterion function produces a :class:`~oldroyd_lab.scenarios.Verdict`
with its stated tolerance pinned; artifacts (CSV series, verdict files) land
in the output directory so the reporting component can consume them.
A8 is soft: boundary effects on the whole-space surrogate are documented,
and a miss downgrades to a warning rather than failing a suite.
"""

from __future__ import annotations

import math
import time
from pathlib import Path

import numpy as np

from .config import FitSpec, RunConfig
from .diagnostics import fit_decay
from .grid import SYM_INDEX, build_grid
from .integrate import IntegratorConfig, Stepper
from .lp import bony_decompose, build_blocks
from .models import (
    primitive_tendency_to_cauchy,
    rhs_cauchy,
    rhs_effective,
    rhs_primitive,
    rhs_torus,
    torus_tendency_to_effective,
)
from .params import DEFAULT_PARAMS
from .scenarios import (
    Verdict,
    column_expression,
    read_series_csv,
    run_scenario,
    write_verdicts,
)
from .spectral import (
    dealias_arr,
    div_arr,
    lambda_power_arr,
    lap_arr,
    leray_split_arr,
    mean_free,
)
from .states import CauchyState, PrimitiveState, TorusState, map_states
from .grid import ScalarField


# ---------------------------------------------------------------------------
# Random-field helpers (Nyquist-free so derivative conventions are immaterial)
# ---------------------------------------------------------------------------

def rand_scalar(grid, rng):
    noise = rng.standard_normal(grid.shape)
    return grid.irfft(grid.nyquist_free_mask * grid.rfft(noise))


def rand_vector(grid, rng):
    return np.stack([rand_scalar(grid, rng) for _ in range(grid.dim)])


def band_limited_scalar(grid, rng, max_mode: int, amplitude: float = 1.0):
    """Mean-free random field supported on |mode_j| <= max_mode."""
    out = np.zeros(grid.shape)
    coords = grid.coords()
    base = 2.0 * np.pi / grid.box_length
    for _ in range(6):
        modes = rng.integers(-max_mode, max_mode + 1, grid.dim)
        if not np.any(modes):
            continue
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.standard_normal()
        arg = sum(base * m * x for m, x in zip(modes, coords))
        out += amp * np.cos(arg + phase)
    m = float(np.max(np.abs(out)))
    if m > 0:
        out *= amplitude / m
    return out


def _rel_sup(err: np.ndarray, ref: np.ndarray) -> float:
    return float(np.max(np.abs(err)) / max(np.max(np.abs(ref)), 1e-300))


# ---------------------------------------------------------------------------
# A1 - operator identities
# ---------------------------------------------------------------------------

def criterion_a1(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    grid = build_grid(2, 64, 2.0 * np.pi)
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(100):
        v = rand_vector(grid, rng)
        f = rand_scalar(grid, rng)
        p, q = leray_split_arr(grid, v)
        p2, _ = leray_split_arr(grid, p)
        lam2 = lambda_power_arr(grid, lambda_power_arr(grid, f, 1.0), 1.0)
        lap = lap_arr(grid, f)
        worst = max(
            worst,
            _rel_sup(p + q - v, v),
            _rel_sup(p2 - p, v),
            _rel_sup(div_arr(grid, p), div_arr(grid, v)),
            _rel_sup(lam2 + lap, lap),
        )
    elapsed = time.perf_counter() - t0
    return Verdict(
        criterion="A1",
        description="operator identities P+Q=I, P^2=P, div P=0, Lambda^2=-Lap "
                    "on 100 random fields at N=64",
        expected="< 1e-12 relative, < 10 s",
        measured=worst,
        passed=bool(worst < 1e-12 and elapsed < 10.0),
        metadata={"n_per_axis": 64, "fields": 100, "runtime_s": elapsed},
    )


# ---------------------------------------------------------------------------
# A2 - Littlewood-Paley partition of unity
# ---------------------------------------------------------------------------

def criterion_a2(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    grid = build_grid(2, 128, 2.0 * np.pi)
    blocks = build_blocks(grid)
    kmag = grid.kmag
    nz = kmag > 0

    total = np.zeros(grid.cshape)
    active = np.zeros(grid.cshape, dtype=int)
    for k in blocks.ks:
        w = blocks.phi_weight(k)
        total += w
        active += w > 1e-14
    hom_err = float(np.max(np.abs(total[nz] - 1.0)))

    inhom = blocks.chi_weight(0).copy()
    for k in range(0, blocks.k_max + 1):
        inhom += blocks.phi_weight(k)
    inhom_err = float(np.max(np.abs(inhom - 1.0)))

    max_active = int(np.max(active))
    elapsed = time.perf_counter() - t0
    measured = max(hom_err, inhom_err)
    return Verdict(
        criterion="A2",
        description="dyadic partition of unity on all resolved frequencies; "
                    "at most 2 active blocks anywhere",
        expected="|chi+sum(phi)-1| < 1e-10, active blocks <= 2, < 5 s",
        measured=measured,
        passed=bool(measured < 1e-10 and max_active <= 2 and elapsed < 5.0),
        metadata={"n_per_axis": 128, "max_active_blocks": max_active,
                  "homogeneous_err": hom_err, "inhomogeneous_err": inhom_err,
                  "runtime_s": elapsed},
    )


# ---------------------------------------------------------------------------
# A3 - Bernstein ring bounds, exact in L2
# ---------------------------------------------------------------------------

def criterion_a3(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    grid = build_grid(2, 128, 2.0 * np.pi)
    blocks = build_blocks(grid)
    rng = np.random.default_rng(103)
    slack = 1e-12
    lo_fail = 0.0
    checked = 0
    ok = True
    ratios = {}
    for trial in range(20):
        f = rand_scalar(grid, rng)
        c = grid.rfft(f)
        for k in blocks.ks:
            w = blocks.phi_weight(k)
            if not np.any(w > 0):
                continue
            bc = w * c
            norm2 = grid.spectral_sumsq(bc)
            if norm2 <= 0.0:
                continue
            grad2 = float(np.sum(grid.rfft_weights * grid.k2d * np.abs(bc) ** 2))
            ratio = math.sqrt(grad2 / norm2)
            lo = 0.75 * 2.0**k
            hi = 2.667 * 2.0**k
            checked += 1
            ratios[k] = ratio
            if not (lo * (1 - slack) <= ratio <= hi * (1 + slack)):
                ok = False
                lo_fail = ratio
    elapsed = time.perf_counter() - t0
    return Verdict(
        criterion="A3",
        description="L2 Bernstein ratio ||grad block|| / ||block|| inside "
                    "[0.75, 2.667] * 2^k for all nonempty rings, 20 random fields",
        expected="exact ring bound, 1e-12 slack",
        measured=(lo_fail if not ok else max(r / 2.0**k for k, r in ratios.items())),
        passed=bool(ok and checked > 0),
        metadata={"n_per_axis": 128, "checks": checked, "runtime_s": elapsed,
                  "ratios_over_2k": {str(k): r / 2.0**k for k, r in ratios.items()}},
    )


# ---------------------------------------------------------------------------
# A4 - Bony paraproduct reconstruction
# ---------------------------------------------------------------------------

def criterion_a4(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    grid = build_grid(2, 64, 2.0 * np.pi)
    blocks = build_blocks(grid)
    rng = np.random.default_rng(104)
    worst = 0.0
    for _ in range(20):
        # band-limited inside the dealiased band, mean-free
        f = mean_free(grid, dealias_arr(grid, rand_scalar(grid, rng)))
        g = mean_free(grid, dealias_arr(grid, rand_scalar(grid, rng)))
        tfg, tgf, rem = bony_decompose(ScalarField(grid, f), ScalarField(grid, g),
                                       blocks, dealias_products=True)
        recon = tfg.values + tgf.values + rem.values
        target = dealias_arr(grid, f * g)
        worst = max(worst, _rel_sup(recon - target, target))
    elapsed = time.perf_counter() - t0
    return Verdict(
        criterion="A4",
        description="paraproduct + remainder reconstructs the product on "
                    "band-limited random pairs at N=64",
        expected="< 1e-10 relative",
        measured=worst,
        passed=bool(worst < 1e-10),
        metadata={"n_per_axis": 64, "pairs": 20, "runtime_s": elapsed},
    )


# ---------------------------------------------------------------------------
# A5 - cross-formulation RHS equivalence
# ---------------------------------------------------------------------------

def _rel_state_err(pairs) -> float:
    num = 0.0
    den = 0.0
    for a, b in pairs:
        num = max(num, float(np.max(np.abs(a - b))))
        den = max(den, float(np.max(np.abs(a))))
    return num / max(den, 1e-300)


def criterion_a5(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    params = DEFAULT_PARAMS
    grid = build_grid(2, 64, 2.0 * np.pi)
    rng = np.random.default_rng(105)
    worst = 0.0

    for _ in range(50):
        eta = 0.02 + 0.3 * band_limited_scalar(grid, rng, 5, 1e-2)
        a = band_limited_scalar(grid, rng, 5, 1e-2)
        v = np.stack([band_limited_scalar(grid, rng, 5, 1e-2) for _ in range(2)])
        tau = np.stack([band_limited_scalar(grid, rng, 5, 1e-3) for _ in range(3)])
        sigma = tau.copy()
        sigma[0] += params.K * eta
        sigma[2] += params.K * eta
        prim = PrimitiveState(grid, rho=params.rho_bar + a, v=v, sigma=sigma, eta=eta)
        mapped = primitive_tendency_to_cauchy(prim, rhs_primitive(prim, params), params)
        direct = rhs_cauchy(map_states(prim, "cauchy", params), params)
        worst = max(worst, _rel_state_err([
            (mapped.n, direct.n), (mapped.u, direct.u),
            (mapped.tau, direct.tau), (mapped.eta, direct.eta),
        ]))

    for _ in range(50):
        P = 1.0 + band_limited_scalar(grid, rng, 5, 1e-2)
        eta = 1.0 + band_limited_scalar(grid, rng, 5, 1e-2)
        u = np.stack([band_limited_scalar(grid, rng, 5, 1e-2) for _ in range(2)])
        tau = band_limited_scalar(grid, rng, 5, 3e-2) ** 2
        tor = TorusState(grid, P=P, u=u, eta=eta, tau=tau)
        mapped = torus_tendency_to_effective(tor, rhs_torus(tor, params), params)
        direct = rhs_effective(map_states(tor, "effective", params), params)
        worst = max(worst, _rel_state_err([
            (mapped.a_tilde, direct.a_tilde), (mapped.u, direct.u),
            (mapped.tau, direct.tau), (mapped.p, direct.p), (mapped.b, direct.b),
        ]))

    elapsed = time.perf_counter() - t0
    return Verdict(
        criterion="A5",
        description="chain-rule-mapped primitive tendencies match the "
                    "reformulated RHS; torus matches effective (50 states each)",
        expected="< 1e-8 relative, < 60 s",
        measured=worst,
        passed=bool(worst < 1e-8 and elapsed < 60.0),
        metadata={"n_per_axis": 64, "states": 100, "runtime_s": elapsed},
    )


# ---------------------------------------------------------------------------
# A6 - conservation on a torus run
# ---------------------------------------------------------------------------

def a6_config() -> RunConfig:
    return RunConfig(
        formulation="torus",
        dim=2,
        n_per_axis=128,
        box_length=2.0 * math.pi,
        integrator=IntegratorConfig(dt=1e-3, t_end=10.0, record_every=100),
        generator="zero_momentum_projected",
        amplitude=1e-3,
        seed=6,
        csv_name="a6_series.csv",
        verdict_name="a6_run.json",
        checkpoint_name="a6_final.ckpt",
    )


def criterion_a6(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    cfg = a6_config()
    result = run_scenario(cfg, out_dir, quiet=True)
    cols = read_series_csv(result.csv_path)
    mass = cols["mass"]
    mom = np.hypot(cols["momentum_x"], cols["momentum_y"])
    mass_drift = float(np.max(np.abs(mass - mass[0])) / abs(mass[0]))
    max_mom = float(np.max(mom))
    elapsed = time.perf_counter() - t0
    ok = (result.sim.status == "ok" and mass_drift < 1e-8
          and max_mom < 1e-8 and elapsed < 600.0)
    return Verdict(
        criterion="A6",
        description="torus run N=128^2, dt=1e-3, t in [0,10]: mass and "
                    "momentum conservation with projected initial momentum",
        expected="mass drift < 1e-8 relative, |int rho u| < 1e-8, < 10 min",
        measured=f"mass_drift={mass_drift:.3e}, max_momentum={max_mom:.3e}",
        passed=bool(ok),
        metadata={"mass_drift": mass_drift, "max_momentum": max_mom,
                  "csv": str(result.csv_path), "runtime_s": elapsed,
                  "steps": result.sim.steps},
    )


# ---------------------------------------------------------------------------
# A7 - exponential decay on the torus
# ---------------------------------------------------------------------------

def a7_config() -> RunConfig:
    return RunConfig(
        formulation="torus",
        dim=2,
        n_per_axis=128,
        box_length=2.0 * math.pi,
        integrator=IntegratorConfig(dt=8e-3, t_end=20.0, adaptive=True,
                                    record_every=10),
        generator="random_smooth",
        amplitude=1e-2,
        seed=7,
        fit=FitSpec(model="exponential", column="h3_u+h3_tau", window=(2.0, 20.0)),
        csv_name="a7_series.csv",
        verdict_name="a7_run.json",
        checkpoint_name="a7_final.ckpt",
    )


def criterion_a7(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    cfg = a7_config()
    result = run_scenario(cfg, out_dir, quiet=True)
    cols = read_series_csv(result.csv_path)
    y = column_expression(cols, "h3_u+h3_tau")
    fit = fit_decay(list(zip(cols["t"], y)), "exponential", (2.0, 20.0))
    elapsed = time.perf_counter() - t0
    ok = (result.sim.status == "ok" and fit.exponent_or_rate > 0.0
          and fit.r_squared >= 0.99 and elapsed < 900.0)
    return Verdict(
        criterion="A7",
        description="small-data torus run: log ||(u,tau)||_H3 decays linearly "
                    "over t in [2, 20] (exponential decay, shape only)",
        expected="rate > 0 and R^2 >= 0.99, < 15 min",
        measured=f"rate={fit.exponent_or_rate:.4f}, r2={fit.r_squared:.6f}",
        passed=bool(ok),
        metadata={"exponent_or_rate": fit.exponent_or_rate,
                  "amplitude": fit.amplitude,
                  "r_squared": fit.r_squared, "window": [2.0, 20.0],
                  "column": "h3_u+h3_tau", "model": "exponential",
                  "csv": str(result.csv_path), "runtime_s": elapsed,
                  "n_per_axis": cfg.n_per_axis, "dt": cfg.integrator.dt},
    )


# ---------------------------------------------------------------------------
# A8 - algebraic decay on the whole-space surrogate (soft)
# ---------------------------------------------------------------------------

def a8_config() -> RunConfig:
    # the bump must be narrow relative to the box: the self-similar decay
    # regime starts around t ~ width^2 / nu, which has to fit well before
    # wrap-around (box / (2 c) ~ 71 here)
    return RunConfig(
        formulation="cauchy",
        dim=2,
        n_per_axis=512,
        box_length=64.0 * math.pi,
        integrator=IntegratorConfig(dt=0.1, t_end=64.0, adaptive=True,
                                    record_every=5),
        generator="localized_gaussian",
        amplitude=1e-2,
        seed=8,
        width=2.0,
        fit=FitSpec(model="algebraic", column="l2_u", window=(10.0, 63.0),
                    expected=-0.5, tol=0.15),
        csv_name="a8_series.csv",
        verdict_name="a8_run.json",
        checkpoint_name="a8_final.ckpt",
    )


def criterion_a8(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    cfg = a8_config()
    result = run_scenario(cfg, out_dir, quiet=True)
    fitv = result.verdicts[0] if result.verdicts else None
    elapsed = time.perf_counter() - t0
    slope = fitv.measured if fitv is not None else None
    ok = (result.sim.status == "ok" and fitv is not None
          and fitv.passed is True and elapsed < 3600.0)
    meta = dict(fitv.metadata) if fitv is not None else {}
    meta.update({"runtime_s": elapsed, "csv": str(result.csv_path),
                 "soft": True,
                 "note": "whole-space decay checked on a periodic box; "
                         "window capped before wrap-around"})
    return Verdict(
        criterion="A8",
        description="localized data on a 64 pi box: fitted log-log slope of "
                    "||u||_L2 near the whole-space rate (d=2, s=1, beta=0)",
        expected="slope in -0.5 +/- 0.15 before wrap-around (soft)",
        measured=slope,
        passed=bool(ok),
        severity="soft",
        metadata=meta,
    )


# ---------------------------------------------------------------------------
# A9 - integrator order and exact linear sub-flows
# ---------------------------------------------------------------------------

def _state_dist(a, b) -> float:
    grid = a.grid
    tot = 0.0
    for name, arr in a.arrays().items():
        diff = arr - getattr(b, name)
        tot += float(grid.vol * np.mean(diff * diff, axis=tuple(range(-grid.dim, 0))).sum())
    return math.sqrt(tot)


def criterion_a9(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    params = DEFAULT_PARAMS
    grid = build_grid(2, 32, 2.0 * np.pi)
    from .initial_data import initial_data

    state0 = initial_data("random_smooth", 1e-2, 9, grid, params, "torus")
    t_star = 0.4

    def advance(dt):
        stepper = Stepper("torus", params, grid)
        st = state0.copy()
        steps = int(round(t_star / dt))
        t = 0.0
        for _ in range(steps):
            st = stepper.step(st, dt, t)
            t += dt
        return st

    ref = advance(0.0025)
    e1 = _state_dist(advance(0.02), ref)
    e2 = _state_dist(advance(0.01), ref)
    order = math.log2(e1 / e2)

    # exact relaxation: constant stress, everything else at equilibrium
    cst = CauchyState.equilibrium(grid, params)
    tau = cst.tau.copy()
    tau[0] = 1.0
    tau[2] = 1.0
    cst = cst.replace(tau=tau)
    stepper = Stepper("cauchy", params, grid)
    st = cst
    for i in range(10):
        st = stepper.step(st, 0.1, 0.1 * i)
    damp_err = float(np.max(np.abs(st.tau[0] - math.exp(-1.0))))

    # exact heat flow: single solenoidal mode
    x, y = grid.coords()
    u0 = np.stack([np.sin(y), np.zeros(grid.shape)])
    hst = CauchyState.equilibrium(grid, params).replace(u=u0)
    hst = Stepper("cauchy", params, grid).step(hst, 0.5, 0.0)
    heat_err = float(np.max(np.abs(hst.u[0] - math.exp(-0.5) * u0[0])))

    elapsed = time.perf_counter() - t0
    ok = (1.9 <= order <= 2.5 and damp_err < 1e-10 and heat_err < 1e-10)
    return Verdict(
        criterion="A9",
        description="self-convergence order on smooth torus data; exact "
                    "integration of pure damping and heat sub-flows",
        expected="order in [1.9, 2.5]; linear flows exact to 1e-10",
        measured=f"order={order:.3f}, damp_err={damp_err:.2e}, heat_err={heat_err:.2e}",
        passed=bool(ok),
        metadata={"order": order, "damping_error": damp_err,
                  "heat_error": heat_err, "errors": [e1, e2],
                  "runtime_s": elapsed},
    )


# ---------------------------------------------------------------------------
# A10 - stress symmetry along a run
# ---------------------------------------------------------------------------

def criterion_a10(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    params = DEFAULT_PARAMS
    grid = build_grid(2, 32, 2.0 * np.pi)
    from .initial_data import initial_data

    state = initial_data("random_smooth", 1e-2, 10, grid, params, "cauchy")
    stepper = Stepper("cauchy", params, grid)
    worst = 0.0
    t = 0.0
    for i in range(50):
        state = stepper.step(state, 0.01, t)
        t += 0.01
        full = np.empty((2, 2) + grid.shape)
        idx = SYM_INDEX[2]
        for a in range(2):
            for b in range(2):
                full[a, b] = state.tau[idx[a][b]]
        worst = max(worst, float(np.max(np.abs(full - np.swapaxes(full, 0, 1)))))
    elapsed = time.perf_counter() - t0
    return Verdict(
        criterion="A10",
        description="stress stays symmetric along a run from symmetric data "
                    "(upper-triangle storage makes it structural)",
        expected="sup |tau - tau^T| < 1e-12 at every step",
        measured=worst,
        passed=bool(worst < 1e-12),
        metadata={"steps": 50, "runtime_s": elapsed},
    )


# ---------------------------------------------------------------------------
# A11 - decay-fit self test
# ---------------------------------------------------------------------------

def criterion_a11(out_dir, quiet: bool = False) -> Verdict:
    t0 = time.perf_counter()
    t = np.linspace(1.0, 100.0, 200)
    alg = fit_decay(list(zip(t, (1.0 + t) ** -0.75)), "algebraic", (1.0, 100.0))
    t2 = np.linspace(0.0, 20.0, 200)
    exp = fit_decay(list(zip(t2, 5.0 * np.exp(-0.3 * t2))), "exponential", (0.0, 20.0))
    err = max(
        abs(alg.exponent_or_rate + 0.75),
        abs(exp.exponent_or_rate - 0.3),
        abs(exp.amplitude - 5.0),
    )
    r2 = min(alg.r_squared, exp.r_squared)
    elapsed = time.perf_counter() - t0
    return Verdict(
        criterion="A11",
        description="synthetic (1+t)^-0.75 and 5 exp(-0.3 t) series recover "
                    "their parameters",
        expected="parameters to 1e-6, R^2 >= 1 - 1e-12",
        measured=f"param_err={err:.2e}, min_r2={r2!r}",
        passed=bool(err < 1e-6 and r2 >= 1.0 - 1e-12),
        metadata={"alg_exponent": alg.exponent_or_rate,
                  "exp_rate": exp.exponent_or_rate,
                  "exp_amplitude": exp.amplitude, "runtime_s": elapsed},
    )


# ---------------------------------------------------------------------------
# Registry and suite runner
# ---------------------------------------------------------------------------

CRITERIA = {
    "A1": criterion_a1,
    "A2": criterion_a2,
    "A3": criterion_a3,
    "A4": criterion_a4,
    "A5": criterion_a5,
    "A6": criterion_a6,
    "A7": criterion_a7,
    "A8": criterion_a8,
    "A9": criterion_a9,
    "A10": criterion_a10,
    "A11": criterion_a11,
}

SUITES = {
    "quick": ["A1", "A2", "A3", "A4", "A5", "A9", "A10", "A11"],
    "conservation": ["A6"],
    "decay": ["A7", "A8"],
    "full": list(CRITERIA),
}


def resolve_suite(name: str) -> list[str]:
    if name in SUITES:
        return list(SUITES[name])
    ids = [part.strip().upper() for part in name.split(",") if part.strip()]
    unknown = [i for i in ids if i not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown suite or criteria: {unknown}; "
                         f"suites: {sorted(SUITES)}")
    return ids


def run_suite(name: str, out_dir, jobs: int = 1, quiet: bool = False) -> list[Verdict]:
    """Run a verification suite, print one line per criterion, write verdicts."""
    ids = resolve_suite(name)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    verdicts: list[Verdict] = []
    if jobs > 1 and len(ids) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {cid: pool.submit(_run_one, cid, str(out)) for cid in ids}
            for cid in ids:
                verdicts.append(futures[cid].result())
    else:
        for cid in ids:
            verdicts.append(_run_one(cid, out))
    for v in verdicts:
        if not quiet:
            print(f"{v.criterion}: {v.status()}  measured={v.measured}  "
                  f"expected={v.expected}")
    write_verdicts(out / "verdict.json", verdicts,
                   meta={"suite": name, "criteria": ids})
    return verdicts


def _run_one(cid: str, out_dir) -> Verdict:
    try:
        return CRITERIA[cid](out_dir, quiet=True)
    except Exception as exc:  # a crashed criterion is "not evaluated"
        return Verdict(
            criterion=cid,
            description="criterion raised",
            expected="clean evaluation",
            measured=repr(exc),
            passed=None,
            metadata={"error": repr(exc)},
        )
