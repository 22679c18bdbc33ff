"""Secondary acceptance: cross-component checks against real artifacts.

B1 - fits recomputed here agree with the verdict fits to 1e-9 on the
     exponential-decay run's CSV, and the report renders with a
     predicted-slope overlay.
B2 - the schema reader parses every CSV the verification suite produced.

The fixture drives the simulator only through its CLI.  It runs the
conservation and exponential-decay criteria (A6, A7) plus two small runs
covering the 3D and extra-column schema variants; the long soft criterion
A8 writes its series through the same writer with a header identical to
A7's, so it adds no schema coverage (set OLDROYD_REPORT_FULL_A_SUITE=1 to
include it anyway).
"""

import json
import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from oldroyd_report.fits import fit_series
from oldroyd_report.csvio import column_sum, read_series
from oldroyd_report.report import ReportSpec, build_report

RUN_3D = """
run.formulation = cauchy
grid.dim = 3
grid.n_per_axis = 16
grid.box_length = 2pi
integrator.dt = 0.02
integrator.t_end = 0.3
integrator.record_every = 1
initial.generator = random_smooth
initial.amplitude = 1e-3
initial.seed = 3
output.csv = run3d.csv
output.verdict = run3d_verdict.json
output.checkpoint = run3d.ckpt
"""

RUN_LAMBDA = """
run.formulation = torus
grid.dim = 2
grid.n_per_axis = 16
grid.box_length = 2pi
integrator.dt = 0.02
integrator.t_end = 0.3
initial.generator = zero_momentum_projected
initial.amplitude = 1e-3
initial.seed = 4
diagnostics.lambda_betas = 0:nu, 1:tau
output.csv = run_lambda.csv
output.verdict = run_lambda_verdict.json
output.checkpoint = run_lambda.ckpt
"""


def _cli():
    exe = shutil.which("oldroyd-lab")
    if exe:
        return [exe]
    return [sys.executable, "-m", "oldroyd_lab.cli"]


@pytest.fixture(scope="session")
def suite_artifacts(tmp_path_factory):
    if shutil.which("oldroyd-lab") is None:
        try:
            import oldroyd_lab  # noqa: F401
        except ImportError:
            pytest.skip("simulator package not installed")
    out = tmp_path_factory.mktemp("a_suite")
    suite = "A6,A7,A8" if os.environ.get("OLDROYD_REPORT_FULL_A_SUITE") else "A6,A7"
    subprocess.run(
        _cli() + ["--out-dir", str(out), "--quiet", "verify", suite],
        check=True, capture_output=True, text=True,
    )
    for name, text in (("run3d.cfg", RUN_3D), ("run_lambda.cfg", RUN_LAMBDA)):
        cfg = out / name
        cfg.write_text(text)
        subprocess.run(
            _cli() + ["--out-dir", str(out), "--quiet", "run", str(cfg)],
            check=True, capture_output=True, text=True,
        )
    return out


def test_b1_report_fit_agrees_with_verdict(suite_artifacts, tmp_path):
    payload = json.loads((suite_artifacts / "verdict.json").read_text())
    a7 = next(c for c in payload["criteria"] if c["criterion"] == "A7")
    assert a7["status"] == "PASS"
    meta = a7["metadata"]
    csv_path = suite_artifacts / Path(meta["csv"]).name
    cols = read_series(csv_path)
    y = column_sum(cols, meta["column"])
    refit = fit_series(cols["t"], y, meta["model"], tuple(meta["window"]))
    assert abs(refit.exponent_or_rate - meta["exponent_or_rate"]) <= 1e-9

    # full report build performs the same cross-check internally and renders
    # a guide line (unit stress-relaxation rate) on the decay plot
    result = build_report(ReportSpec(
        csv_paths=[csv_path],
        verdict_path=suite_artifacts / "verdict.json",
        out_dir=tmp_path / "report",
        predicted={"A7": 1.0},
    ))
    plot_text = result["plots"][0].read_text()
    assert "predicted rate" in plot_text
    assert (tmp_path / "report" / "report.html").exists()


def test_b2_every_suite_csv_parses(suite_artifacts):
    csvs = sorted(suite_artifacts.glob("*.csv"))
    assert len(csvs) >= 4  # A6, A7 series plus the two schema variants
    for path in csvs:
        cols = read_series(path)
        assert cols["t"].size >= 2
    names = {p.name for p in csvs}
    assert {"a6_series.csv", "a7_series.csv", "run3d.csv",
            "run_lambda.csv"} <= names
