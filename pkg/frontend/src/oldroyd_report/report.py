"""One-page verification report from CSV series and verdict files.

Every plotted fit is recomputed from the CSV here and compared against the
fit stored in the verdict; a disagreement beyond 1e-9 aborts the build (it
means the two components no longer read the same numbers).
"""

from __future__ import annotations

import html
import json
from dataclasses import dataclass, field
from pathlib import Path

from .fits import FitResult
from .plots import plot_decay

FIT_AGREEMENT_TOL = 1e-9


class ConsistencyError(RuntimeError):
    """Recomputed fit disagrees with the verdict's stored fit."""


@dataclass
class ReportSpec:
    csv_paths: list
    verdict_path: str | None = None
    out_dir: str = "report"
    image_format: str = "svg"
    # criterion id (or "fit") -> predicted exponent/rate to overlay
    predicted: dict = field(default_factory=dict)
    # extra (column, model) plots rendered from the first CSV
    extra_columns: list = field(default_factory=list)


def _load_verdicts(path):
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != "oldroyd-lab-verdict":
        raise ValueError(f"{path}: not a verdict file")
    return payload


def _match_csv(meta: dict, csv_paths: list[Path]) -> Path | None:
    ref = meta.get("csv")
    if ref:
        name = Path(ref).name
        for p in csv_paths:
            if p.name == name:
                return p
        if Path(ref).exists():
            return Path(ref)
    if len(csv_paths) == 1:
        return csv_paths[0]
    return None


def build_report(spec: ReportSpec) -> dict:
    """Render plots plus Markdown and HTML documents; returns artifact paths.

    Inputs are read-only; two builds from the same inputs produce identical
    bytes.  A missing verdict file downgrades to a warning banner.
    """
    out_dir = Path(spec.out_dir)
    plots_dir = out_dir / "plots"
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_paths = [Path(p) for p in spec.csv_paths]
    for p in csv_paths:
        if not p.exists():
            raise FileNotFoundError(p)

    warnings: list[str] = []
    payload = None
    if spec.verdict_path is not None and Path(spec.verdict_path).exists():
        payload = _load_verdicts(spec.verdict_path)
    elif spec.verdict_path is not None:
        warnings.append(f"verdict file not found: {spec.verdict_path}")
    else:
        warnings.append("no verdict file provided; report shows plots only")

    plot_entries = []   # (title, image path, fit, verdict value or None)
    criteria_rows = []

    if payload is not None:
        for crit in payload["criteria"]:
            criteria_rows.append(crit)
            meta = crit.get("metadata") or {}
            if not {"column", "model", "window"} <= set(meta):
                continue
            csv_path = _match_csv(meta, csv_paths)
            if csv_path is None:
                warnings.append(
                    f"criterion {crit['criterion']}: no matching CSV provided"
                )
                continue
            predicted = spec.predicted.get(crit["criterion"])
            if predicted is None and isinstance(meta.get("expected_value"), (int, float)):
                predicted = meta["expected_value"]
            image, fit = plot_decay(
                csv_path,
                column=meta["column"],
                model=meta["model"],
                window=tuple(meta["window"]),
                predicted=predicted,
                out_path=plots_dir / f"{crit['criterion']}_{meta['column']}"
                                     f".{spec.image_format}".replace("+", "_"),
                image_format=spec.image_format,
            )
            stored = meta.get("exponent_or_rate")
            if stored is not None:
                diff = abs(fit.exponent_or_rate - float(stored))
                if diff > FIT_AGREEMENT_TOL:
                    raise ConsistencyError(
                        f"criterion {crit['criterion']}: recomputed "
                        f"{fit.exponent_or_rate!r} vs verdict {stored!r} "
                        f"(|diff| = {diff:.3e} > {FIT_AGREEMENT_TOL})"
                    )
            plot_entries.append((crit["criterion"], image, fit, stored))

    for column, model in spec.extra_columns:
        image, fit = plot_decay(
            csv_paths[0], column=column, model=model,
            out_path=plots_dir / f"extra_{column}.{spec.image_format}".replace("+", "_"),
            image_format=spec.image_format,
            extra_csvs=csv_paths[1:],
        )
        plot_entries.append((f"column {column}", image, fit, None))

    md_path = out_dir / "report.md"
    html_path = out_dir / "report.html"
    md_path.write_text(_render_markdown(payload, plot_entries, criteria_rows,
                                        warnings, csv_paths, out_dir))
    html_path.write_text(_render_html(payload, plot_entries, criteria_rows,
                                      warnings, csv_paths, out_dir))
    return {
        "markdown": md_path,
        "html": html_path,
        "plots": [e[1] for e in plot_entries],
        "warnings": warnings,
    }


def _fit_line(fit: FitResult, stored) -> str:
    label = "exponent" if fit.model == "algebraic" else "rate"
    extra = ""
    if stored is not None:
        extra = f"; verdict {float(stored):.9g} (agrees to {FIT_AGREEMENT_TOL:g})"
    return (f"{label} {fit.exponent_or_rate:.6g}, amplitude {fit.amplitude:.6g}, "
            f"R^2 {fit.r_squared:.6f}, window [{fit.window[0]:g}, {fit.window[1]:g}]"
            f"{extra}")


def _render_markdown(payload, plot_entries, criteria_rows, warnings,
                     csv_paths, out_dir: Path) -> str:
    lines = ["# Verification report", ""]
    for w in warnings:
        lines += [f"> **Warning:** {w}", ""]
    lines += ["## Inputs", ""]
    lines += [f"- `{p}`" for p in csv_paths]
    if payload is not None:
        meta = payload.get("meta", {})
        if meta:
            lines += ["", "## Run metadata", ""]
            lines += [f"- {k}: `{v}`" for k, v in sorted(meta.items())]
    if criteria_rows:
        lines += ["", "## Criteria", "",
                  "| criterion | status | measured | expected |",
                  "| --- | --- | --- | --- |"]
        for c in criteria_rows:
            lines.append(
                f"| {c['criterion']} | {c.get('status', '?')} "
                f"| {c.get('measured')} | {c.get('expected')} |"
            )
    if plot_entries:
        lines += ["", "## Decay plots", ""]
        for title, image, fit, stored in plot_entries:
            rel = image.relative_to(out_dir)
            lines += [f"### {title}", "",
                      f"![{title}]({rel})", "",
                      f"- {_fit_line(fit, stored)}", ""]
    return "\n".join(lines) + "\n"


def _render_html(payload, plot_entries, criteria_rows, warnings,
                 csv_paths, out_dir: Path) -> str:
    esc = html.escape
    parts = [
        "<!DOCTYPE html><html><head><meta charset='utf-8'>",
        "<title>Verification report</title>",
        "<style>body{font-family:sans-serif;max-width:60em;margin:2em auto}"
        "table{border-collapse:collapse}td,th{border:1px solid #999;"
        "padding:0.3em 0.6em}.warn{background:#fff3cd;border:1px solid #caa;"
        "padding:0.6em}.PASS{color:#070}.FAIL{color:#b00}.WARN{color:#a60}"
        "</style></head><body>",
        "<h1>Verification report</h1>",
    ]
    for w in warnings:
        parts.append(f"<p class='warn'>{esc(w)}</p>")
    parts.append("<h2>Inputs</h2><ul>")
    parts += [f"<li><code>{esc(str(p))}</code></li>" for p in csv_paths]
    parts.append("</ul>")
    if payload is not None and payload.get("meta"):
        parts.append("<h2>Run metadata</h2><ul>")
        parts += [f"<li>{esc(str(k))}: <code>{esc(str(v))}</code></li>"
                  for k, v in sorted(payload["meta"].items())]
        parts.append("</ul>")
    if criteria_rows:
        parts.append("<h2>Criteria</h2><table><tr><th>criterion</th>"
                     "<th>status</th><th>measured</th><th>expected</th></tr>")
        for c in criteria_rows:
            status = c.get("status", "?")
            parts.append(
                f"<tr><td>{esc(c['criterion'])}</td>"
                f"<td class='{esc(status.split()[0])}'>{esc(status)}</td>"
                f"<td>{esc(str(c.get('measured')))}</td>"
                f"<td>{esc(str(c.get('expected')))}</td></tr>"
            )
        parts.append("</table>")
    if plot_entries:
        parts.append("<h2>Decay plots</h2>")
        for title, image, fit, stored in plot_entries:
            rel = image.relative_to(out_dir)
            parts.append(f"<h3>{esc(title)}</h3>")
            parts.append(f"<img src='{rel}' alt='{esc(title)}' width='640'>")
            parts.append(f"<p>{esc(_fit_line(fit, stored))}</p>")
    parts.append("</body></html>")
    return "\n".join(parts) + "\n"
