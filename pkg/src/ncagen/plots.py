"""Report figures, rendered headlessly to image files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .complexity import RatioHistogram
from .config import ComplexityBand
from .metrics import TrainingCurve
from .stats import ZipfReport

__all__ = ["plot_zipf", "plot_ratio_histogram", "plot_curves"]


def _save(fig, out_path) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_zipf(report: ZipfReport, out_path) -> Path:
    """Log-log rank-frequency scatter with the fitted power law overlaid."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ranks = np.arange(1, report.distinct_tokens + 1)
    ax.loglog(ranks, report.frequencies, ".", ms=3, color="tab:blue", label="tokens")
    if report.slope is not None:
        lo, hi = report.fit_rank_range
        fit_ranks = np.array([lo, hi], dtype=np.float64)
        # the line was fit on counts; rescale to relative frequency
        fit = 10 ** (report.intercept + report.slope * np.log10(fit_ranks))
        ax.loglog(
            fit_ranks,
            fit / report.total_tokens,
            "-",
            color="tab:red",
            label=f"slope {report.slope:.2f}, R² {report.r_squared:.2f}",
        )
    ax.set_xlabel("token rank")
    ax.set_ylabel("relative frequency")
    ax.set_title(f"rank-frequency over {report.total_tokens:,} tokens")
    ax.legend(frameon=False)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, out_path)


def plot_ratio_histogram(
    hist: RatioHistogram, out_path, band: ComplexityBand | None = None
) -> Path:
    """Gzip-ratio distribution; an acceptance band is shaded when given."""
    fig, ax = plt.subplots(figsize=(6, 4))
    widths = np.diff(hist.bin_edges)
    ax.bar(
        hist.bin_edges[:-1],
        hist.counts,
        width=widths,
        align="edge",
        color="tab:blue",
        edgecolor="white",
        linewidth=0.4,
    )
    if band is not None:
        high = hist.bin_edges[-1] if band.high_pct is None else band.high_pct
        ax.axvspan(band.low_pct, high, color="tab:green", alpha=0.15, label=f"band {band}")
        ax.legend(frameon=False)
    ax.axvline(hist.median, color="tab:red", lw=1, ls="--")
    ax.set_xlabel("gzip ratio (%)")
    ax.set_ylabel("rules")
    ax.set_title(f"complexity over {hist.total} samples, median {hist.median:.1f}%")
    ax.grid(True, axis="y", alpha=0.25)
    return _save(fig, out_path)


def plot_curves(
    curves: list[TrainingCurve], out_path, target_loss: float | None = None
) -> Path:
    """Validation loss against tokens seen, one line per run."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for i, curve in enumerate(curves):
        label = curve.label or f"run {i}"
        if curve.stage:
            label = f"{label} ({curve.stage})"
        ax.plot(curve.tokens, curve.losses, lw=1.5, label=label)
    if target_loss is not None:
        ax.axhline(target_loss, color="gray", lw=1, ls="--", label=f"target {target_loss:.3f}")
    ax.set_xscale("log")
    ax.set_xlabel("tokens seen")
    ax.set_ylabel("validation loss")
    ax.legend(frameon=False, fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, out_path)
