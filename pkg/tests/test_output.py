import json
import math

import numpy as np
import pytest

from creditnet.core import Parameters
from creditnet.engine import run
from creditnet.output import (
    _histogram_lines,
    build_report,
    emit_all,
    emit_distributions,
    emit_report,
    emit_timeseries,
)


@pytest.fixture(scope="module")
def result():
    return run(Parameters(n_agents=250, horizon=30, seed=2))


@pytest.fixture(scope="module")
def outdir(result, tmp_path_factory):
    path = tmp_path_factory.mktemp("emitted")
    emit_all(result, path)
    return path


class TestTimeseries:
    def test_row_count(self, result, tmp_path):
        emit_timeseries(result, tmp_path)
        lines = (tmp_path / "timeseries.csv").read_text().splitlines()
        assert len(lines) == 31  # header + one row per period
        assert lines[0].startswith("t,avg_Y_d,bankrupt_d")

    def test_avalanche_column_is_sum(self, outdir):
        lines = (outdir / "timeseries.csv").read_text().splitlines()
        header = lines[0].split(",")
        idx = {name: header.index(name) for name in
               ("bankrupt_d", "bankrupt_u", "bankrupt_b", "avalanche")}
        for line in lines[1:]:
            cells = line.split(",")
            total = sum(int(cells[idx[k]]) for k in ("bankrupt_d", "bankrupt_u", "bankrupt_b"))
            assert int(cells[idx["avalanche"]]) == total

    def test_rerun_byte_identical(self, result, tmp_path):
        emit_timeseries(result, tmp_path / "a")
        emit_timeseries(result, tmp_path / "b")
        assert (tmp_path / "a/timeseries.csv").read_bytes() == (
            tmp_path / "b/timeseries.csv"
        ).read_bytes()

    def test_lf_endings_and_plain_decimal(self, outdir):
        raw = (outdir / "timeseries.csv").read_bytes()
        assert b"\r" not in raw
        assert b"," in raw and b";" not in raw.splitlines()[0]


class TestDistributions:
    def test_cross_section_sizes(self, result, outdir):
        for name in ("networth_d", "networth_u", "equity_b"):
            lines = (outdir / f"{name}.csv").read_text().splitlines()
            assert len(lines) == 250

    def test_histogram_counts_sum_to_sample_size(self, outdir):
        lines = (outdir / "hist_networth_d.csv").read_text().splitlines()[1:]
        total = sum(int(line.split(",")[2]) for line in lines)
        assert total == 250

    def test_log_binned_variant_written(self, outdir):
        assert (outdir / "hist_networth_d_log.csv").exists()
        assert (outdir / "hist_equity_b_log.csv").exists()

    def test_growth_rates_two_columns(self, outdir):
        lines = (outdir / "growth_rates.csv").read_text().splitlines()
        assert lines[0] == "networth_rate,output_rate"
        assert all(line.count(",") == 1 for line in lines[1:])

    def test_avalanche_file_matches_records(self, result, outdir):
        lines = (outdir / "avalanches.csv").read_text().splitlines()
        assert [int(float(v)) for v in lines] == [r.avalanche for r in result.records]

    def test_degenerate_sample_single_bin(self):
        lines = _histogram_lines(np.full(40, 7.0))
        assert lines == ["bin_left,bin_right,count", "7,7,40"]


class TestReport:
    def test_required_sections(self, outdir):
        report = json.loads((outdir / "report.json").read_text())
        assert "jarque_bera" in report["size_distributions"]["downstream"]
        for sector in ("downstream", "upstream", "banks"):
            assert "skewness" in report["size_distributions"][sector]
        assert "laplace" in report["growth_rates"]
        assert "laplace_preferred" in report["growth_rates"]
        assert "jarque_bera" in report["avalanches"]
        corr = report["bankruptcy_cross_correlation"]
        assert set(corr) == {"downstream_upstream", "downstream_banks", "upstream_banks"}
        for pair in corr.values():
            assert set(pair) == {str(lag) for lag in range(-5, 6)}
        assert report["manifest"]["seed"] == 2

    def test_short_horizon_notes_window(self, tmp_path):
        result = run(Parameters(n_agents=30, horizon=10, seed=3))
        report = build_report(result)
        assert report["growth_rates"]["window_transitions"] == 9
        assert report["growth_rates"]["shortened"] is True

    def test_identical_runs_identical_reports(self, tmp_path):
        p = Parameters(n_agents=40, horizon=25, seed=5)
        emit_report(run(p), tmp_path / "a")
        emit_report(run(p), tmp_path / "b")
        assert (tmp_path / "a/report.json").read_bytes() == (
            tmp_path / "b/report.json"
        ).read_bytes()


class TestManifestAndFigures:
    def test_every_emitted_file_is_listed(self, outdir):
        manifest = json.loads((outdir / "manifest.json").read_text())
        on_disk = {p.name for p in outdir.iterdir()}
        assert set(manifest["files"]) == on_disk

    def test_effective_config_round_trips(self, result, outdir):
        from creditnet.config import parse_config

        assert parse_config(outdir / "effective_config.cfg") == result.parameters

    def test_figures_rendered(self, outdir):
        for name in ("production.png", "size_distributions.png", "growth_rates.png",
                     "bankruptcy_correlation.png", "avalanches.png"):
            path = outdir / name
            assert path.exists() and path.stat().st_size > 1000

    def test_manifest_carries_parameters_and_version(self, outdir):
        manifest = json.loads((outdir / "manifest.json").read_text())
        assert manifest["parameters"]["n_agents"] == 250
        assert manifest["version"]
        assert manifest["started_at"] and manifest["finished_at"]
