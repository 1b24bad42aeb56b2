"""Rendering of regression reports: CSV, aligned text, residuals, figures."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .ols import INTERCEPT, RegressionReport


def _fmt(value: float, digits: int = 5) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}f}"


def report_csv(report: RegressionReport) -> str:
    buf = io.StringIO()
    buf.write(f"# n_used={report.n_used}\n")
    buf.write(f"# dropped_rows={report.dropped_rows}\n")
    buf.write(f"# r_squared={report.r_squared!r}\n")
    buf.write(f"# adj_r_squared={report.adj_r_squared!r}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["term", "estimate", "std_error", "t_stat", "p_value", "stars", "vif"])
    for term in report.terms:
        vif = report.vif.get(term.label)
        writer.writerow(
            [
                term.label,
                repr(term.estimate),
                repr(term.std_error),
                repr(term.t_stat),
                repr(term.p_value),
                term.stars,
                "" if vif is None else repr(vif),
            ]
        )
    return buf.getvalue()


def report_text(report: RegressionReport) -> str:
    headers = ["term", "estimate", "std error", "t", "p-value", "", "VIF"]
    rows = [headers]
    for term in report.terms:
        vif = report.vif.get(term.label)
        rows.append(
            [
                term.label,
                _fmt(term.estimate),
                _fmt(term.std_error),
                _fmt(term.t_stat, 3),
                f"{term.p_value:.4g}",
                term.stars,
                "" if vif is None else _fmt(vif, 3),
            ]
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(headers))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [row[i].rjust(widths[i]) for i in range(1, len(headers))]
        lines.append("  ".join(cells).rstrip())
    lines.insert(1, "-" * max(len(line) for line in lines))
    lines.append("")
    lines.append(f"n = {report.n_used} (dropped {report.dropped_rows} incomplete rows)")
    lines.append(
        f"R^2 = {report.r_squared:.5f}, adjusted R^2 = {report.adj_r_squared:.5f}"
    )
    lines.append("significance: *** p<0.001, ** p<0.01, * p<0.05")
    return "\n".join(lines) + "\n"


def residuals_csv(report: RegressionReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row_id", "fitted", "residual"])
    for row_id, fitted, residual in zip(report.row_ids, report.fitted, report.residuals):
        writer.writerow([row_id, repr(fitted), repr(residual)])
    return buf.getvalue()


def _residuals_figure(report: RegressionReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.axhline(0.0, color="#888888", linewidth=1)
    ax.scatter(report.fitted, report.residuals, s=18, color="#2f6db3", alpha=0.75)
    ax.set_xlabel("fitted value")
    ax.set_ylabel("residual")
    ax.set_title(f"Residuals vs fitted (n={report.n_used})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _coefficients_figure(report: RegressionReport, path: Path) -> None:
    terms = [t for t in report.terms if t.label != INTERCEPT]
    labels = [t.label for t in terms]
    estimates = [t.estimate for t in terms]
    halfwidths = [1.96 * t.std_error for t in terms]
    positions = range(len(terms))
    fig, ax = plt.subplots(figsize=(6.4, 0.9 * max(len(terms), 3) + 1.2))
    ax.axvline(0.0, color="#888888", linewidth=1)
    ax.errorbar(
        estimates, list(positions), xerr=halfwidths,
        fmt="o", color="#d7641f", ecolor="#4a4a4a", capsize=4,
    )
    ax.set_yticks(list(positions))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.set_xlabel("estimate (with 95% band)")
    ax.set_title("Coefficient estimates")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report_files(report: RegressionReport, prefix: str | Path) -> list[Path]:
    """Write <prefix>.csv/.txt/-residuals.csv plus the two PNG figures."""
    prefix = Path(prefix)
    if prefix.parent != Path(""):
        prefix.parent.mkdir(parents=True, exist_ok=True)
    outputs = {
        prefix.with_name(prefix.name + ".csv"): report_csv(report),
        prefix.with_name(prefix.name + ".txt"): report_text(report),
        prefix.with_name(prefix.name + "-residuals.csv"): residuals_csv(report),
    }
    for path, payload in outputs.items():
        path.write_text(payload, encoding="utf-8")
    written = list(outputs)
    figure_path = prefix.with_name(prefix.name + "-residuals.png")
    _residuals_figure(report, figure_path)
    written.append(figure_path)
    figure_path = prefix.with_name(prefix.name + "-coefficients.png")
    _coefficients_figure(report, figure_path)
    written.append(figure_path)
    return written
