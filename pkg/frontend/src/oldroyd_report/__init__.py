"""Plots and one-page verification reports from oldroyd-lab artifacts."""

from .csvio import SchemaError, column_sum, read_series
from .fits import FitResult, fit_series
from .plots import plot_decay
from .report import ConsistencyError, ReportSpec, build_report

__all__ = [
    "SchemaError",
    "read_series",
    "column_sum",
    "FitResult",
    "fit_series",
    "plot_decay",
    "ReportSpec",
    "build_report",
    "ConsistencyError",
]

__version__ = "0.1.0"
