import numpy as np
import pytest


def series_text(t, values: dict, dim=2):
    """Render a schema-conforming CSV from a t-array and column arrays."""
    cols = ["t", "E_inf", "E_1", "h3_u", "h3_tau", "h3_n", "h3_eta",
            "l2_n", "l2_u", "l2_tau", "mass", "momentum_x", "momentum_y"]
    if dim == 3:
        cols.append("momentum_z")
    cols.append("tau_min")
    cols += [c for c in values if c not in cols]
    rows = [",".join(cols)]
    for i, ti in enumerate(t):
        row = []
        for c in cols:
            if c == "t":
                row.append(repr(float(ti)))
            elif c in values:
                row.append(repr(float(values[c][i])))
            else:
                row.append("1.0")
        rows.append(",".join(row))
    return "\n".join(rows) + "\n"


@pytest.fixture
def synthetic_csv(tmp_path):
    t = np.linspace(0.0, 20.0, 120)
    y = 5.0 * np.exp(-0.3 * t)
    path = tmp_path / "series.csv"
    path.write_text(series_text(t, {"h3_u": y, "h3_tau": 0.5 * y, "l2_u": y}))
    return path


@pytest.fixture
def algebraic_csv(tmp_path):
    t = np.linspace(1.0, 100.0, 240)
    y = (1.0 + t) ** -0.75
    path = tmp_path / "alg.csv"
    path.write_text(series_text(t, {"l2_u": y}))
    return path
