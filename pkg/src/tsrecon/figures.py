"""Figure rendering for benchmark reports.

matplotlib is imported lazily inside the render functions so commands that
never draw (or machines without a display) pay nothing; the Agg backend is
forced for headless determinism. Every figure lands as a PNG next to the
delimited report files.
"""

import io
import os

from .evaluation import NmseReport, PlotSeries
from .io import atomic_write_bytes


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path) -> None:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=110)
    atomic_write_bytes(path, buf.getvalue())


def render_overlay(plot: PlotSeries, path) -> None:
    """Clean trace as a line, corrupted samples and their reconstructions
    as markers at the masked positions only."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(9.0, 3.4))
    try:
        masked = plot.masked
        ax.plot(plot.t, plot.clean, lw=1.0, color="#30557d", label="clean")
        ax.plot(
            plot.t[masked], plot.corrupted[masked], ".", ms=4.5,
            color="#3aa655", label="corrupted",
        )
        ax.plot(
            plot.t[masked], plot.reconstructed[masked], ".", ms=4.5,
            color="#e0a910", label="reconstructed",
        )
        ax.set_xlabel("sample index")
        ax.set_ylabel(plot.channel)
        ax.set_title(
            f"{plot.method.value}: reconstruction at rho={plot.rho:g}"
        )
        ax.legend(loc="upper right", fontsize=8)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        _save(fig, path)
    finally:
        plt.close(fig)


def render_nmse_curves(report: NmseReport, path) -> None:
    """Mean NMSE against the missing proportion, one line per method."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        rhos = report.plan.proportions
        drew_any = False
        for method in report.plan.methods:
            means = [report.mean_nmse(method, r) for r in rhos]
            xs = [r for r, m in zip(rhos, means) if m is not None]
            ys = [m for m in means if m is not None]
            if xs:
                ax.plot(xs, ys, marker="o", ms=4, label=method.value)
                drew_any = True
        ax.set_xlabel("missing proportion")
        ax.set_ylabel(f"NMSE ({report.plan.nmse_scope})")
        if all(
            c.nmse is None or c.nmse > 0 for c in report.cells
        ) and any(c.nmse for c in report.cells):
            ax.set_yscale("log")
        ax.grid(True, which="both", alpha=0.3)
        if drew_any:
            ax.legend(fontsize=8)
        fig.tight_layout()
        _save(fig, path)
    finally:
        plt.close(fig)


def render_report_figures(report: NmseReport, out_dir) -> list:
    """All figures for a report; returns the written paths."""
    paths = []
    curve_path = os.path.join(os.fspath(out_dir), "fig_nmse.png")
    render_nmse_curves(report, curve_path)
    paths.append(curve_path)
    for plot in report.plots:
        path = os.path.join(
            os.fspath(out_dir), f"fig_overlay_{plot.method.value}.png"
        )
        render_overlay(plot, path)
        paths.append(path)
    return paths
