"""Plot rendering and report assembly on synthetic artifacts."""

import json

import numpy as np
import pytest

from oldroyd_report.csvio import SchemaError
from oldroyd_report.plots import plot_decay
from oldroyd_report.report import ConsistencyError, ReportSpec, build_report

from conftest import series_text


def make_verdict(path, csv_name, rate, window=(2.0, 20.0), column="h3_u",
                 model="exponential"):
    payload = {
        "format": "oldroyd-lab-verdict",
        "version": 1,
        "meta": {"suite": "synthetic", "n_per_axis": 16, "dt": 0.01},
        "criteria": [
            {
                "criterion": "A7",
                "description": "synthetic decay",
                "expected": "rate > 0",
                "measured": rate,
                "passed": True,
                "severity": "hard",
                "status": "PASS",
                "metadata": {
                    "column": column,
                    "model": model,
                    "window": list(window),
                    "exponent_or_rate": rate,
                    "csv": csv_name,
                },
            }
        ],
    }
    path.write_text(json.dumps(payload))
    return path


class TestPlotDecay:
    def test_exponential_plot(self, synthetic_csv, tmp_path):
        out, fit = plot_decay(synthetic_csv, "h3_u", "exponential",
                              window=(0.0, 20.0),
                              out_path=tmp_path / "p.svg")
        assert out.exists()
        assert abs(fit.exponent_or_rate - 0.3) < 1e-9
        text = out.read_text()
        assert "fit: rate" in text

    def test_algebraic_annotation(self, algebraic_csv, tmp_path):
        out, fit = plot_decay(algebraic_csv, "l2_u", "algebraic",
                              window=(1.0, 100.0), predicted=-0.75,
                              out_path=tmp_path / "alg.svg")
        assert abs(fit.exponent_or_rate + 0.75) < 1e-6
        text = out.read_text()
        assert "-0.75" in text          # fitted slope annotation
        assert "predicted slope" in text

    def test_zero_column_rejected(self, tmp_path):
        t = np.linspace(0.0, 1.0, 30)
        path = tmp_path / "zeros.csv"
        path.write_text(series_text(t, {"l2_u": np.zeros_like(t)}))
        with pytest.raises(ValueError, match="non-positive"):
            plot_decay(path, "l2_u", "exponential", window=(0.0, 1.0),
                       out_path=tmp_path / "z.svg")

    def test_missing_column_rejected(self, synthetic_csv, tmp_path):
        with pytest.raises(SchemaError):
            plot_decay(synthetic_csv, "no_such", "exponential",
                       out_path=tmp_path / "x.svg")


class TestBuildReport:
    def test_full_report(self, synthetic_csv, tmp_path):
        verdict = make_verdict(tmp_path / "verdict.json", synthetic_csv.name,
                               rate=0.3, window=(0.0, 20.0))
        spec = ReportSpec(csv_paths=[synthetic_csv],
                          verdict_path=verdict,
                          out_dir=tmp_path / "report",
                          predicted={"A7": 0.3})
        result = build_report(spec)
        md = result["markdown"].read_text()
        assert "| A7 | PASS" in md
        assert "Decay plots" in md
        html = result["html"].read_text()
        assert "<table>" in html and "A7" in html
        assert result["plots"][0].exists()

    def test_fit_disagreement_raises(self, synthetic_csv, tmp_path):
        verdict = make_verdict(tmp_path / "verdict.json", synthetic_csv.name,
                               rate=0.31, window=(0.0, 20.0))
        spec = ReportSpec(csv_paths=[synthetic_csv], verdict_path=verdict,
                          out_dir=tmp_path / "report")
        with pytest.raises(ConsistencyError):
            build_report(spec)

    def test_missing_verdict_warns(self, synthetic_csv, tmp_path):
        spec = ReportSpec(csv_paths=[synthetic_csv],
                          verdict_path=tmp_path / "absent.json",
                          out_dir=tmp_path / "report",
                          extra_columns=[("h3_u", "exponential")])
        result = build_report(spec)
        assert any("not found" in w for w in result["warnings"])
        md = result["markdown"].read_text()
        assert "Warning" in md
        assert result["plots"]  # plots still rendered

    def test_two_csvs_overlaid(self, synthetic_csv, tmp_path):
        t = np.linspace(0.0, 20.0, 120)
        other = tmp_path / "other.csv"
        other.write_text(series_text(t, {"h3_u": 3.0 * np.exp(-0.2 * t)}))
        spec = ReportSpec(csv_paths=[synthetic_csv, other],
                          verdict_path=None,
                          out_dir=tmp_path / "report",
                          extra_columns=[("h3_u", "exponential")])
        result = build_report(spec)
        text = result["plots"][0].read_text()
        assert "other.csv" in text  # legend entry for the overlay

    def test_rerun_is_byte_identical(self, synthetic_csv, tmp_path):
        verdict = make_verdict(tmp_path / "verdict.json", synthetic_csv.name,
                               rate=0.3, window=(0.0, 20.0))
        a = ReportSpec(csv_paths=[synthetic_csv], verdict_path=verdict,
                       out_dir=tmp_path / "r1")
        b = ReportSpec(csv_paths=[synthetic_csv], verdict_path=verdict,
                       out_dir=tmp_path / "r2")
        ra = build_report(a)
        rb = build_report(b)
        assert ra["markdown"].read_text() == rb["markdown"].read_text()
        assert ra["plots"][0].read_bytes() == rb["plots"][0].read_bytes()


def test_cli_plot_and_build(synthetic_csv, tmp_path, capsys):
    from oldroyd_report.cli import main

    code = main(["plot", "--csv", str(synthetic_csv), "--column", "h3_u",
                 "--model", "exp", "--window", "0,20",
                 "--out", str(tmp_path / "p.svg")])
    assert code == 0
    assert (tmp_path / "p.svg").exists()
    verdict = make_verdict(tmp_path / "verdict.json", synthetic_csv.name,
                           rate=0.3, window=(0.0, 20.0))
    code = main(["build", "--csv", str(synthetic_csv),
                 "--verdict", str(verdict),
                 "--out-dir", str(tmp_path / "rep"),
                 "--predicted", "A7=0.3"])
    assert code == 0
    assert (tmp_path / "rep" / "report.html").exists()
