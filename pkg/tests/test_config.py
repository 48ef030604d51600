"""
Тесты конфигурации: модели экспериментов, ошибки JSON-pointer и настройки окружения.
"""

import json
from pathlib import Path

import pytest

from aniso_ns.commands.runner import load_config
from aniso_ns.commands.schemas import (
    ConfigError,
    ExperimentConfig,
    check_output_dir,
    json_pointer,
    parse_config,
)
from aniso_ns.config import Settings
from aniso_ns.services.initial_data_service import DataFamily

ROOT = Path(__file__).resolve().parent.parent


def pointers(payload) -> list:
    with pytest.raises(ConfigError) as info:
        parse_config(payload)
    return [message.split(":")[0] for message in info.value.errors]


class TestExperimentConfig:
    """Проверка файла эксперимента."""

    def test_minimal(self):
        config = parse_config({"command": "analyze"})
        assert config.grid.n_h == 32
        assert config.solver.dt == 1e-3
        assert config.data.family is DataFamily.OSCILLATORY
        assert config.constants.N == 4

    @pytest.mark.parametrize(
        "payload, pointer",
        [
            ({"command": "simulate", "solver": {"dt": -1.0}}, "/solver/dt"),
            ({"command": "analyze", "bogus": 1}, "/bogus"),
            ({"command": "analyze", "grid": {"n_h": 14, "n_v": 16}}, "/grid/n_h"),
            ({"command": "analyze", "data": {"family": "custom_file", "input_paths": ["a", "b"]}}, "/data"),
            ({"command": "sweep", "sweep": {"values": [0.5]}}, "/sweep/values"),
            ({"command": "sweep", "sweep": {"values": [0.5, -0.25]}}, "/sweep/values"),
            ({"command": "explode"}, "/command"),
        ],
    )
    def test_error_pointers(self, payload, pointer):
        assert pointer in pointers(payload)

    def test_missing_input_files(self, tmp_path):
        paths = [str(tmp_path / f"u_{i}.afld") for i in range(1, 4)]
        payload = {"command": "analyze", "data": {"family": "custom_file", "input_paths": paths}}
        assert pointers(payload) == ["/data"]

    def test_with_overrides_propagates_seed(self):
        config = parse_config({"command": "verify", "seed": 1}).with_overrides(seed=7, output_dir="elsewhere")
        assert config.seed == 7
        assert config.data.seed == 7
        assert config.verify.seed == 7
        assert config.output_dir == "elsewhere"

    def test_with_overrides_keeps_values(self):
        config = parse_config({"command": "verify", "seed": 5, "output_dir": "out/x"}).with_overrides()
        assert config.seed == 5
        assert config.verify.seed == 5
        assert config.output_dir == "out/x"

    def test_json_pointer_escapes(self):
        assert json_pointer(("a/b", 0, "c~d")) == "/a~1b/0/c~0d"

    @pytest.mark.parametrize("name", sorted(p.name for p in (ROOT / "configs").glob("*.json")))
    def test_shipped_configs(self, name):
        config = load_config(str(ROOT / "configs" / name))
        assert config.command in name

    def test_schema_file_matches_model(self):
        schema = json.loads((ROOT / "schemas" / "experiment_config.schema.json").read_text(encoding="utf-8"))
        assert set(schema["properties"]) == set(ExperimentConfig.model_fields)
        assert schema["required"] == ["command"]


class TestLoading:
    """Чтение файлов и каталог вывода."""

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError) as info:
            load_config(str(path))
        assert info.value.errors[0].startswith("/:")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "missing.json"))

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_output_dir_created(self, tmp_path):
        directory = check_output_dir(str(tmp_path / "a" / "b"))
        assert directory.is_dir()


class TestSettings:
    """Настройки процесса из окружения."""

    def test_env_prefix(self, monkeypatch):
        monkeypatch.setenv("ANISONS_THREADS", "3")
        monkeypatch.setenv("ANISONS_LOG_LEVEL", "DEBUG")
        settings = Settings()
        assert settings.threads == 3
        assert settings.log_level == "DEBUG"

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("ANISONS_THREADS", raising=False)
        settings = Settings(_env_file=None)
        assert settings.threads == 1
        assert settings.divergence_tolerance == 1e-12
