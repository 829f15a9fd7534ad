"""Result serialization: CSV time series and distributions, histogram
tables for plotting, the statistics report, and the run manifest.

Every data file is a pure function of (parameters, seed); only
manifest.json carries wall-clock timestamps and is excluded from the
byte-identity guarantee. Numbers are written with 6 significant digits,
decimal point, LF line endings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, stats
from .config import format_config
from .core import Parameters
from .engine import RunResult

HIST_BINS = 64
CROSS_CORR_MAX_LAG = 5


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.6g}"


def _write_lines(path: Path, lines: list[str]):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


@dataclass
class RunManifest:
    """Inventory of one run's outputs plus enough to reproduce them."""

    parameters: Parameters
    seed: int
    started_at: str
    finished_at: str
    files: list[str] = field(default_factory=list)
    version: str = __version__

    def deterministic_fields(self) -> dict:
        """The manifest minus wall-clock timestamps (safe to embed in
        byte-stable artifacts)."""
        return {
            "parameters": self.parameters.as_dict(),
            "seed": self.seed,
            "version": self.version,
            "files": sorted(self.files),
        }

    def to_dict(self) -> dict:
        out = self.deterministic_fields()
        out["started_at"] = self.started_at
        out["finished_at"] = self.finished_at
        return out


def emit_timeseries(result: RunResult, outdir: str | Path) -> list[Path]:
    """Write timeseries.csv: one row per period, fixed column set."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    from .engine import PeriodRecord

    lines = [",".join(PeriodRecord.CSV_FIELDS)]
    for record in result.records:
        lines.append(",".join(_fmt(v) for v in record.csv_values()))
    path = outdir / "timeseries.csv"
    _write_lines(path, lines)
    return [path]


def _histogram_lines(values: np.ndarray, log_bins: bool = False) -> list[str]:
    """64-bin histogram as CSV rows (bin_left, bin_right, count); a
    zero-range sample collapses to a single bin.
    """
    lines = ["bin_left,bin_right,count"]
    values = np.asarray(values, dtype=np.float64)
    values = values[np.isfinite(values)]
    if values.size == 0:
        return lines
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        lines.append(f"{_fmt(lo)},{_fmt(hi)},{values.size}")
        return lines
    if log_bins:
        positive = values[values > 0]
        if positive.size == 0:
            return lines
        edges = np.geomspace(float(positive.min()), float(positive.max()), HIST_BINS + 1)
        counts, edges = np.histogram(positive, bins=edges)
    else:
        counts, edges = np.histogram(values, bins=HIST_BINS, range=(lo, hi))
    for i, count in enumerate(counts):
        lines.append(f"{_fmt(edges[i])},{_fmt(edges[i + 1])},{int(count)}")
    return lines


def emit_distributions(result: RunResult, outdir: str | Path) -> list[Path]:
    """Write final cross-sections, pooled growth rates, the avalanche
    series, and binned histogram tables for direct plotting.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    cross_sections = {
        "networth_d": result.final_networth_d,
        "networth_u": result.final_networth_u,
        "equity_b": result.final_equity_b,
    }
    for name, values in cross_sections.items():
        path = outdir / f"{name}.csv"
        _write_lines(path, [_fmt(v) for v in values])
        written.append(path)
        hist_path = outdir / f"hist_{name}.csv"
        _write_lines(hist_path, _histogram_lines(values))
        written.append(hist_path)
        log_path = outdir / f"hist_{name}_log.csv"
        _write_lines(log_path, _histogram_lines(values, log_bins=True))
        written.append(log_path)

    growth_lines = ["networth_rate,output_rate"]
    for nw_rate, out_rate in zip(result.growth_networth, result.growth_output):
        growth_lines.append(f"{_fmt(nw_rate)},{_fmt(out_rate)}")
    path = outdir / "growth_rates.csv"
    _write_lines(path, growth_lines)
    written.append(path)
    hist_path = outdir / "hist_growth_rates.csv"
    _write_lines(hist_path, _histogram_lines(result.growth_networth))
    written.append(hist_path)

    avalanches = stats.avalanche_series(result.records).values
    path = outdir / "avalanches.csv"
    _write_lines(path, [_fmt(v) for v in avalanches])
    written.append(path)
    hist_path = outdir / "hist_avalanches.csv"
    _write_lines(hist_path, _histogram_lines(avalanches))
    written.append(hist_path)
    return written


def _test_report_dict(report: stats.TestReport) -> dict:
    return {
        "statistic": report.statistic,
        "p_value": report.p_value,
        "reject_at_1pct": report.reject_at_1pct,
        "n": report.n,
    }


def build_report(result: RunResult, manifest: RunManifest | None = None) -> dict:
    """Assemble the statistics report for one run."""
    sizes = {
        "downstream": stats.Sample(result.final_networth_d, "downstream net worth"),
        "upstream": stats.Sample(result.final_networth_u, "upstream net worth"),
        "banks": stats.Sample(result.final_equity_b, "bank equity"),
    }
    size_section = {}
    for name, sample in sizes.items():
        try:
            _, _, skew, kurt = stats.moments(sample)
            entry = {"skewness": skew, "excess_kurtosis": kurt}
            if name == "downstream":
                entry["jarque_bera"] = _test_report_dict(stats.bera_jarque(sample))
        except ValueError as exc:
            entry = {"note": str(exc)}
        size_section[name] = entry

    growth = stats.growth_rate_sample(result)
    requested = 100
    growth_section: dict = {
        "n": growth.n,
        "window_transitions": result.growth_window,
        "requested_window": requested,
        "shortened": result.growth_window < requested,
    }
    if growth.n >= 8 and np.ptp(growth.values) > 0:
        fit = stats.compare_fits(growth)
        _, _, g_skew, g_kurt = stats.moments(growth)
        growth_section.update(
            laplace={
                "location": fit.laplace_location,
                "scale": fit.laplace_scale,
                "loglik": fit.laplace_loglik,
            },
            normal={
                "mean": fit.normal_mean,
                "sd": fit.normal_sd,
                "loglik": fit.normal_loglik,
            },
            laplace_preferred=fit.laplace_preferred,
            skewness=g_skew,
            excess_kurtosis=g_kurt,
        )

    avalanches = stats.avalanche_series(result.records)
    avalanche_section: dict = {
        "mean": float(np.mean(avalanches.values)),
        "max": float(np.max(avalanches.values)),
    }
    if avalanches.n >= 8 and np.ptp(avalanches.values) > 0:
        _, _, a_skew, a_kurt = stats.moments(avalanches)
        avalanche_section.update(
            jarque_bera=_test_report_dict(stats.bera_jarque(avalanches)),
            skewness=a_skew,
            excess_kurtosis=a_kurt,
        )

    counts = {
        "downstream": stats.Sample(
            np.array([r.bankrupt_d for r in result.records], dtype=np.float64)
        ),
        "upstream": stats.Sample(
            np.array([r.bankrupt_u for r in result.records], dtype=np.float64)
        ),
        "banks": stats.Sample(
            np.array([r.bankrupt_b for r in result.records], dtype=np.float64)
        ),
    }
    correlation_section = {}
    pairs = (
        ("downstream_upstream", "downstream", "upstream"),
        ("downstream_banks", "downstream", "banks"),
        ("upstream_banks", "upstream", "banks"),
    )
    n_periods = len(result.records)
    if n_periods > CROSS_CORR_MAX_LAG + 8:
        for label, a, b in pairs:
            corr = stats.cross_correlation(counts[a], counts[b], CROSS_CORR_MAX_LAG)
            correlation_section[label] = {str(lag): corr[lag] for lag in sorted(corr)}

    report = {
        "size_distributions": size_section,
        "growth_rates": growth_section,
        "avalanches": avalanche_section,
        "bankruptcy_cross_correlation": correlation_section,
    }
    if manifest is not None:
        report["manifest"] = manifest.deterministic_fields()
    return report


class _ReportEncoder(json.JSONEncoder):
    def default(self, o):
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        if isinstance(o, np.bool_):
            return bool(o)
        return super().default(o)  # pragma: no cover


def emit_report(result: RunResult, outdir: str | Path, manifest: RunManifest | None = None) -> list[Path]:
    """Write report.json with the distributional test results."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "report.json"
    payload = json.dumps(build_report(result, manifest), indent=2, cls=_ReportEncoder)
    path.write_text(payload + "\n", encoding="utf-8", newline="\n")
    return [path]


def emit_all(result: RunResult, outdir: str | Path, figures: bool = True) -> RunManifest:
    """Write every artifact for one run and return the manifest."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    files = []
    files += emit_timeseries(result, outdir)
    files += emit_distributions(result, outdir)
    if figures:
        from .figures import render_figures

        files += render_figures(result, outdir)

    config_path = outdir / "effective_config.cfg"
    config_path.write_text(format_config(result.parameters), encoding="utf-8", newline="\n")
    files.append(config_path)

    manifest = RunManifest(
        parameters=result.parameters,
        seed=result.parameters.seed,
        started_at=started,
        finished_at="",
        files=[f.name for f in files] + ["report.json", "manifest.json"],
    )
    files += emit_report(result, outdir, manifest)
    manifest.finished_at = datetime.now(timezone.utc).isoformat()
    manifest_path = outdir / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8", newline="\n"
    )
    return manifest
