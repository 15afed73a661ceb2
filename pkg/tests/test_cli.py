"""End-to-end CLI contract: exit codes, report schema, determinism, CSV."""

import json
import subprocess
import sys

import pytest


def run_cli(*args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "brightlab.cli", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
        timeout=300,
    )


def write_config(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


class TestExitCodes:
    def test_passing_scenario_exits_zero(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"scenario": "verify-wedge", "samples": 5})
        proc = run_cli("verify-wedge", "--config", cfg, "--seed", "1", cwd=tmp_path)
        assert proc.returncode == 0, proc.stderr
        assert "[PASS]" in proc.stdout

    def test_failing_check_exits_one_and_still_writes_report(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"samples": 5})
        proc = run_cli(
            "verify-wedge",
            "--config",
            cfg,
            "--seed",
            "1",
            "--tolerance",
            "1e-20",
            "--out",
            "r.json",
            cwd=tmp_path,
        )
        assert proc.returncode == 1
        assert "[FAIL]" in proc.stdout
        report = json.loads((tmp_path / "r.json").read_text())
        assert all(not c["pass"] for c in report["checks"])

    def test_missing_seed_exits_two(self, tmp_path):
        proc = run_cli("verify-wedge", cwd=tmp_path)
        assert proc.returncode == 2
        assert "seed" in proc.stderr

    def test_malformed_config_exits_two(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        proc = run_cli("verify-wedge", "--config", str(bad), "--seed", "1", cwd=tmp_path)
        assert proc.returncode == 2
        assert "not valid JSON" in proc.stderr

    def test_unknown_config_key_exits_two(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"sampels": 5})
        proc = run_cli("verify-wedge", "--config", cfg, "--seed", "1", cwd=tmp_path)
        assert proc.returncode == 2
        assert "sampels" in proc.stderr

    def test_scenario_mismatch_exits_two(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"scenario": "brightness"})
        proc = run_cli("verify-wedge", "--config", cfg, "--seed", "1", cwd=tmp_path)
        assert proc.returncode == 2

    def test_invalid_body_document_exits_two(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.json", {"body": {"family": "torus", "params": {}}, "num_frames": 2}
        )
        proc = run_cli("brightness", "--config", cfg, "--seed", "1", cwd=tmp_path)
        assert proc.returncode == 2
        assert "torus" in proc.stderr

    def test_unknown_subcommand_exits_two(self, tmp_path):
        proc = run_cli("frobnicate", cwd=tmp_path)
        assert proc.returncode == 2


class TestReportSchema:
    def test_required_keys_and_uniform_pass_rule(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"samples": 4})
        proc = run_cli(
            "verify-wedge", "--config", cfg, "--seed", "3", "--out", "r.json", cwd=tmp_path
        )
        assert proc.returncode == 0
        report = json.loads((tmp_path / "r.json").read_text())
        assert report["schema"] == 1
        assert report["scenario"] == "verify-wedge"
        assert report["seed"] == 3
        assert isinstance(report["version"], str)
        assert report["wall_time_s"] > 0
        for check in report["checks"]:
            assert set(check) == {"name", "value", "tol", "pass"}
            assert check["pass"] == (check["value"] <= check["tol"])

    def test_determinism_modulo_wall_time(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"samples": 6})
        for name in ("a.json", "b.json"):
            proc = run_cli(
                "verify-wedge", "--config", cfg, "--seed", "9", "--out", name, cwd=tmp_path
            )
            assert proc.returncode == 0
        strip = lambda p: [
            line
            for line in (tmp_path / p).read_text().splitlines()
            if "wall_time_s" not in line
        ]
        assert strip("a.json") == strip("b.json")

    def test_no_temp_files_left_behind(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"samples": 4})
        run_cli("verify-wedge", "--config", cfg, "--seed", "1", "--out", "r.json", cwd=tmp_path)
        leftovers = [p.name for p in tmp_path.iterdir() if p.suffix == ".tmp"]
        assert leftovers == []


class TestCsvExport:
    def test_checks_csv(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"samples": 4})
        proc = run_cli(
            "verify-wedge",
            "--config",
            cfg,
            "--seed",
            "2",
            "--out",
            "r.json",
            "--csv",
            cwd=tmp_path,
        )
        assert proc.returncode == 0
        lines = (tmp_path / "r.csv").read_text().strip().splitlines()
        assert lines[0] == "name,value,tol,pass"
        assert len(lines) == 4  # three grades

    def test_campaign_csv_has_one_row_per_trial(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"trials": 50})
        proc = run_cli(
            "lemma-campaign",
            "--config",
            cfg,
            "--seed",
            "4",
            "--out",
            "camp.json",
            "--csv",
            cwd=tmp_path,
        )
        assert proc.returncode == 0
        lines = (tmp_path / "camp.csv").read_text().strip().splitlines()
        assert lines[0] == "trial,residual,spread,violation"
        assert len(lines) == 51


class TestScenarios:
    def test_brightness_ball_is_constant(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"num_frames": 6, "nodes": 64})
        proc = run_cli(
            "brightness", "--config", cfg, "--seed", "5", "--out", "b.json", cwd=tmp_path
        )
        assert proc.returncode == 0
        report = json.loads((tmp_path / "b.json").read_text())
        assert report["extras"]["volume_median"] == pytest.approx(3.14159, abs=1e-3)

    def test_proportionality_default_pair(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"num_frames": 8, "nodes": 64})
        proc = run_cli(
            "proportionality", "--config", cfg, "--seed", "6", "--out", "p.json", cwd=tmp_path
        )
        assert proc.returncode == 0
        report = json.loads((tmp_path / "p.json").read_text())
        assert report["extras"]["constant"] == pytest.approx(0.49, abs=1e-6)

    def test_umbilic_search_reports_direction(self, tmp_path):
        proc = run_cli("umbilic-search", "--seed", "7", "--out", "u.json", cwd=tmp_path)
        assert proc.returncode == 0
        report = json.loads((tmp_path / "u.json").read_text())
        assert report["extras"]["converged"] is True
        assert report["extras"]["r0"] == pytest.approx(1.0 / 1.4, abs=1e-6)
        assert abs(report["extras"]["u0"][-1]) > 0.999

    def test_ratio_e48_default_pair(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"num_frames": 6, "nodes": 64})
        proc = run_cli(
            "ratio-e48", "--config", cfg, "--seed", "8", "--out", "e.json", cwd=tmp_path
        )
        assert proc.returncode == 0

    def test_lemma_campaign_solver_mode(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"mode": "solver", "solutions": 4})
        proc = run_cli(
            "lemma-campaign", "--config", cfg, "--seed", "9", "--out", "s.json", cwd=tmp_path
        )
        assert proc.returncode == 0
        report = json.loads((tmp_path / "s.json").read_text())
        assert report["extras"]["solutions_found"] == 4

    def test_gallery_needs_no_seed(self, tmp_path):
        proc = run_cli("gallery", cwd=tmp_path)
        assert proc.returncode == 0
        for family in ("ball", "ellipsoid", "spheroid", "homothet", "erosion"):
            assert family in proc.stdout

    def test_threads_flag_keeps_results(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"num_frames": 6, "nodes": 64})
        a = run_cli(
            "proportionality", "--config", cfg, "--seed", "10", "--out", "a.json", cwd=tmp_path
        )
        b = run_cli(
            "proportionality",
            "--config",
            cfg,
            "--seed",
            "10",
            "--out",
            "b.json",
            "--threads",
            "4",
            cwd=tmp_path,
        )
        assert a.returncode == 0 and b.returncode == 0
        ra = json.loads((tmp_path / "a.json").read_text())
        rb = json.loads((tmp_path / "b.json").read_text())
        assert ra["checks"] == rb["checks"]
