import json

import pytest

from creditnet import cli
from creditnet.engine import AccountingAuditError

SMALL = "n_agents=12\nhorizon=25\nseed=4\n"


def config_file(tmp_path, text=SMALL):
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return path


class TestSimulate:
    def test_writes_outputs(self, tmp_path):
        cfg = config_file(tmp_path)
        out = tmp_path / "out"
        code = cli.main(["simulate", "--config", str(cfg), "--out", str(out)])
        assert code == 0
        assert (out / "timeseries.csv").exists()
        assert (out / "report.json").exists()
        assert (out / "manifest.json").exists()
        assert (out / "production.png").exists()

    def test_flags_override_config(self, tmp_path):
        cfg = config_file(tmp_path)
        out = tmp_path / "out"
        code = cli.main([
            "simulate", "--config", str(cfg), "--out", str(out),
            "--seed", "9", "--periods", "10", "--agents", "8", "--no-figures",
        ])
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["parameters"]["seed"] == 9
        assert manifest["parameters"]["horizon"] == 10
        assert manifest["parameters"]["n_agents"] == 8
        assert not (out / "production.png").exists()

    def test_defaults_without_config(self, tmp_path):
        out = tmp_path / "out"
        code = cli.main([
            "simulate", "--out", str(out), "--periods", "5", "--agents", "6",
            "--no-figures",
        ])
        assert code == 0
        lines = (out / "timeseries.csv").read_text().splitlines()
        assert len(lines) == 6

    def test_config_error_exits_1(self, tmp_path, capsys):
        cfg = config_file(tmp_path, "beta=1.5\n")
        code = cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "beta" in capsys.readouterr().err

    def test_audit_failure_exits_2(self, tmp_path, monkeypatch):
        def broken_run(params):
            raise AccountingAuditError("period 3: bank equity law violated")

        monkeypatch.setattr(cli, "run", broken_run)
        code = cli.main(["simulate", "--out", str(tmp_path / "o")])
        assert code == 2


class TestSweep:
    def test_grid_runs_and_summary(self, tmp_path):
        cfg = config_file(tmp_path)
        out = tmp_path / "sweep"
        code = cli.main([
            "sweep", "--config", str(cfg), "--grid", "alpha=0.5:1.0:6",
            "--out", str(out), "--no-figures",
        ])
        assert code == 0
        subdirs = sorted(p.name for p in out.iterdir() if p.is_dir())
        assert subdirs == [
            "alpha=0.5", "alpha=0.6", "alpha=0.7", "alpha=0.8", "alpha=0.9", "alpha=1",
        ]
        lines = (out / "sweep_summary.csv").read_text().splitlines()
        assert len(lines) == 7
        assert lines[0].startswith("key,value,mean_avalanche")

    def test_integer_grid(self, tmp_path):
        cfg = config_file(tmp_path)
        out = tmp_path / "sweep"
        code = cli.main([
            "sweep", "--config", str(cfg), "--grid", "horizon=10:30:3",
            "--out", str(out), "--no-figures",
        ])
        assert code == 0
        assert (out / "horizon=20").is_dir()

    def test_unknown_key_runs_nothing(self, tmp_path):
        cfg = config_file(tmp_path)
        out = tmp_path / "sweep"
        code = cli.main([
            "sweep", "--config", str(cfg), "--grid", "nosuchkey=0:1:2",
            "--out", str(out),
        ])
        assert code == 1
        assert not out.exists() or not any(out.iterdir())

    def test_bad_range_rejected(self, tmp_path):
        cfg = config_file(tmp_path)
        code = cli.main([
            "sweep", "--config", str(cfg), "--grid", "alpha=0.5:1.0:1",
            "--out", str(tmp_path / "s"),
        ])
        assert code == 1


class TestParser:
    def test_subcommands_exist(self):
        parser = cli.build_parser()
        args = parser.parse_args(["verify", "--out", "somewhere"])
        assert args.command == "verify"

    def test_missing_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit):
            cli.build_parser().parse_args([])
