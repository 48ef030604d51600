"""
Тесты командной строки: коды выхода и артефакты команд.
"""

import csv
import json

import pytest

from aniso_ns.config import settings
from aniso_ns.main import main
from aniso_ns.services.verifier_service import SuiteReport, VerificationReport, VerifierService

SMALL_GRID = {"n_h": 16, "n_v": 16}
SHORT_RUN = {"dt": 0.001, "horizon": 0.005, "monitor_every": 5}


@pytest.fixture(autouse=True)
def restore_threads(monkeypatch):
    monkeypatch.setattr(settings, "threads", settings.threads)


def write_config(tmp_path, payload, name="config.json"):
    payload = {"output_dir": str(tmp_path / "out"), **payload}
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestArguments:
    """Разбор аргументов."""

    def test_print_schema(self, capsys):
        assert main(["--print-schema"]) == 0
        schema = json.loads(capsys.readouterr().out)
        assert "command" in schema["properties"]

    def test_missing_config(self):
        assert main([]) == 2

    def test_invalid_config(self, tmp_path):
        assert main(["--config", write_config(tmp_path, {"command": "analyze", "seed": -1})]) == 2

    def test_unreadable_config(self, tmp_path):
        assert main(["--config", str(tmp_path / "missing.json")]) == 2

    def test_invalid_threads(self, tmp_path):
        assert main(["--config", write_config(tmp_path, {"command": "analyze"}), "--threads", "0"]) == 2

    def test_invalid_seed(self, tmp_path):
        assert main(["--config", write_config(tmp_path, {"command": "analyze"}), "--seed", "-3"]) == 2

    def test_threads_flag_updates_settings(self, tmp_path):
        config = write_config(tmp_path, {"command": "smallness", "grid": SMALL_GRID})
        assert main(["--config", config, "--threads", "2", "--quiet"]) == 0
        assert settings.threads == 2


class TestCommands:
    """Команды эксперимента."""

    def test_analyze(self, tmp_path):
        config = write_config(tmp_path, {"command": "analyze", "grid": SMALL_GRID})
        assert main(["--config", config]) == 0
        out = tmp_path / "out"
        norms = read_json(out / "norms.json")
        assert norms["divergence_residual"] < 1e-12
        assert "config_hash" in norms and "cutoff_hash" in norms
        smallness = read_json(out / "smallness.json")
        assert smallness["constants"]["L"] == 1.0
        manifest = read_json(out / "manifest.json")
        assert manifest["command"] == "analyze"
        assert {a["path"] for a in manifest["artifacts"]} == {"smallness.json", "norms.json"}
        assert all(a["bytes"] > 0 for a in manifest["artifacts"])

    def test_out_flag_overrides_output_dir(self, tmp_path):
        config = write_config(tmp_path, {"command": "smallness", "grid": SMALL_GRID})
        assert main(["--config", config, "--out", str(tmp_path / "other")]) == 0
        assert (tmp_path / "other" / "smallness.json").is_file()
        assert not (tmp_path / "out").exists()

    def test_inadmissible_data(self, tmp_path):
        config = write_config(
            tmp_path, {"command": "analyze", "grid": SMALL_GRID, "data": {"epsilon": 0.3}}
        )
        assert main(["--config", config]) == 2

    def test_simulate_is_deterministic(self, tmp_path):
        config = write_config(
            tmp_path, {"command": "simulate", "grid": SMALL_GRID, "solver": SHORT_RUN}
        )
        assert main(["--config", config]) == 0
        ledger = tmp_path / "out" / "ledger.csv"
        first = ledger.read_bytes()
        assert (tmp_path / "out" / "u_final_3.afld").is_file()
        assert main(["--config", config]) == 0
        assert ledger.read_bytes() == first

        lines = first.decode("utf-8").splitlines()
        assert lines[0] == "#schema=ledger-v1"
        assert lines[2].startswith("t,energy,dissipation")
        assert len(lines) == 5

    def test_simulate_checkpoints_by_default(self, tmp_path):
        config = write_config(
            tmp_path, {"command": "simulate", "grid": SMALL_GRID, "solver": SHORT_RUN}
        )
        assert main(["--config", config]) == 0
        checkpoints = sorted(p.name for p in (tmp_path / "out" / "checkpoints").iterdir())
        assert "u_step000000_1.afld" in checkpoints
        assert "u_step000005_3.afld" in checkpoints
        manifest = read_json(tmp_path / "out" / "manifest.json")
        assert "checkpoints/u_step000005_3.afld" in {a["path"] for a in manifest["artifacts"]}

    def test_simulate_without_checkpoints(self, tmp_path):
        config = write_config(
            tmp_path,
            {"command": "simulate", "grid": SMALL_GRID, "solver": SHORT_RUN, "write_checkpoints": False},
        )
        assert main(["--config", config]) == 0
        assert not (tmp_path / "out" / "checkpoints").exists()
        assert (tmp_path / "out" / "ledger.csv").is_file()

    def test_simulate_cfl_violation(self, tmp_path):
        config = write_config(
            tmp_path,
            {"command": "simulate", "grid": SMALL_GRID, "solver": {"dt": 0.5, "horizon": 1.0}},
        )
        assert main(["--config", config]) == 3

    def test_decompose(self, tmp_path):
        config = write_config(
            tmp_path, {"command": "decompose", "grid": SMALL_GRID, "solver": SHORT_RUN}
        )
        assert main(["--config", config]) == 0
        out = tmp_path / "out"
        summary = read_json(out / "decomposition.json")
        assert summary["monitor_times"] == 2
        assert summary["bootstrap"]["threshold"] == pytest.approx(1 / 16)
        for name in ("ledger.csv", "vF_final.afld", "w_final.afld", "v_final_1.afld", "ubar_final_2.afld"):
            assert (out / name).is_file()

    def test_sweep(self, tmp_path):
        config = write_config(
            tmp_path,
            {
                "command": "sweep",
                "grid": SMALL_GRID,
                "sweep": {"parameter": "epsilon", "values": [0.25, 0.5]},
            },
        )
        assert main(["--config", config]) == 0
        with open(tmp_path / "out" / "sweep.csv", encoding="utf-8") as f:
            rows = list(csv.reader(line for line in f if not line.startswith("#")))
        assert rows[0][:2] == ["epsilon", "u0_b4neg"]
        assert [row[0] for row in rows[1:]] == ["0.25", "0.5"]
        assert (tmp_path / "out" / "sweep_summary.csv").is_file()

    def test_verify(self, tmp_path):
        config = write_config(
            tmp_path,
            {
                "command": "verify",
                "verify": {"suites": ["partition", "trilinear"], "n_h": 16, "n_v": 16},
            },
        )
        assert main(["--config", config, "--seed", "4"]) == 0
        out = tmp_path / "out"
        report = read_json(out / "verify_report.json")
        assert report["passed"] is True
        assert report["seed"] == 4
        assert (out / "verify_report.xml").is_file()
        assert (out / "manifest.json").is_file()

    def test_verify_failure(self, tmp_path, monkeypatch):
        failing = VerificationReport(
            suites=[SuiteReport(name="partition", kind="hard", passed=False)],
            seed=0,
            cutoff_hash="x",
        )
        monkeypatch.setattr(VerifierService, "run_all", lambda self: failing)
        config = write_config(tmp_path, {"command": "verify"})
        assert main(["--config", config]) == 4
        assert read_json(tmp_path / "out" / "verify_report.json")["failed_suites"] == ["partition"]
        assert (tmp_path / "out" / "manifest.json").is_file()
