"""Figure rendering for run outputs.

Renders the standard diagnostic plots to PNG next to the CSV files:
average downstream production, the three size-distribution histograms,
the growth-rate density on a log scale (tent shape) with the fitted
Laplace and Gaussian curves, bankruptcy cross-correlations by lag, and
the avalanche-size histogram. Deterministic: same run, same bytes.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import stats
from .engine import RunResult
from .output import CROSS_CORR_MAX_LAG

_SAVE_KW = dict(dpi=120, metadata={"Software": "creditnet"})


def _save(fig, path: Path):
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def _production_figure(result: RunResult, outdir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 3.2))
    t = [r.t for r in result.records]
    ax.plot(t, [r.avg_output_d for r in result.records], lw=0.8, color="tab:blue")
    ax.set_xlabel("period")
    ax.set_ylabel("avg downstream production")
    fig.tight_layout()
    path = outdir / "production.png"
    _save(fig, path)
    return path


def _sizes_figure(result: RunResult, outdir: Path) -> Path:
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.2))
    panels = (
        ("downstream net worth", result.final_networth_d),
        ("upstream net worth", result.final_networth_u),
        ("bank equity", result.final_equity_b),
    )
    for ax, (label, values) in zip(axes, panels):
        ax.hist(values, bins=40, color="tab:blue", alpha=0.8)
        ax.set_xlabel(label)
    axes[0].set_ylabel("firms / banks")
    fig.tight_layout()
    path = outdir / "size_distributions.png"
    _save(fig, path)
    return path


def _growth_figure(result: RunResult, outdir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    rates = result.growth_networth
    path = outdir / "growth_rates.png"
    if rates.size >= 8 and np.ptp(rates) > 0:
        counts, edges = np.histogram(rates, bins=60, density=True)
        centers = (edges[:-1] + edges[1:]) / 2
        occupied = counts > 0
        ax.semilogy(centers[occupied], counts[occupied], "o", ms=3, label="growth rates")
        fit = stats.compare_fits(stats.Sample(rates))
        grid = np.linspace(edges[0], edges[-1], 400)
        laplace_pdf = np.exp(-np.abs(grid - fit.laplace_location) / fit.laplace_scale) / (
            2 * fit.laplace_scale
        )
        normal_pdf = np.exp(
            -((grid - fit.normal_mean) ** 2) / (2 * fit.normal_sd**2)
        ) / (fit.normal_sd * math.sqrt(2 * math.pi))
        ax.semilogy(grid, laplace_pdf, lw=1.0, label="Laplace fit")
        ax.semilogy(grid, normal_pdf, lw=1.0, ls="--", label="Gaussian fit")
        ax.legend(fontsize=8)
    ax.set_xlabel("net-worth growth rate")
    ax.set_ylabel("density")
    fig.tight_layout()
    _save(fig, path)
    return path


def _correlation_figure(result: RunResult, outdir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    series = {
        "downstream": np.array([r.bankrupt_d for r in result.records], dtype=float),
        "upstream": np.array([r.bankrupt_u for r in result.records], dtype=float),
        "banks": np.array([r.bankrupt_b for r in result.records], dtype=float),
    }
    pairs = (
        ("downstream", "upstream"),
        ("downstream", "banks"),
        ("upstream", "banks"),
    )
    lags = np.arange(-CROSS_CORR_MAX_LAG, CROSS_CORR_MAX_LAG + 1)
    width = 0.25
    if len(result.records) > CROSS_CORR_MAX_LAG + 8:
        for offset, (a, b) in enumerate(pairs):
            corr = stats.cross_correlation(
                stats.Sample(series[a]), stats.Sample(series[b]), CROSS_CORR_MAX_LAG
            )
            heights = [corr[int(lag)] for lag in lags]
            ax.bar(lags + (offset - 1) * width, heights, width=width, label=f"{a}-{b}")
        ax.legend(fontsize=8)
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel("lag (periods)")
    ax.set_ylabel("bankruptcy cross-correlation")
    fig.tight_layout()
    path = outdir / "bankruptcy_correlation.png"
    _save(fig, path)
    return path


def _avalanche_figure(result: RunResult, outdir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    values = stats.avalanche_series(result.records).values
    upper = max(int(values.max()), 1)
    ax.hist(values, bins=np.arange(0, upper + 2) - 0.5, color="tab:red", alpha=0.8)
    ax.set_yscale("log")
    ax.set_xlabel("avalanche size (bankruptcies per period)")
    ax.set_ylabel("periods")
    fig.tight_layout()
    path = outdir / "avalanches.png"
    _save(fig, path)
    return path


def render_figures(result: RunResult, outdir: str | Path) -> list[Path]:
    """Render every figure for a finished run; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        _production_figure(result, outdir),
        _sizes_figure(result, outdir),
        _growth_figure(result, outdir),
        _correlation_figure(result, outdir),
        _avalanche_figure(result, outdir),
    ]
