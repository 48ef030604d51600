"""
Исполнитель экспериментов: конфигурация на входе, поля, журналы и отчёты на выходе.
"""

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field as PydField

from .. import __version__
from ..config import get_settings
from ..littlewood_paley.cutoffs import DEFAULT_CUTOFFS
from ..norms.besov import norm_B0half, norm_B4_0half, norm_B4_neg, norm_H
from ..norms.ledger import NormLedger
from ..services.decomposition_service import run_decomposition
from ..services.initial_data_service import (
    DataFamilySpec,
    InadmissibleDataError,
    biot_savart_split,
    generate,
    smallness_report,
)
from ..services.solver_service import AnisotropicSolver, CFLViolationError, SolverStep
from ..services.verifier_service import (
    VerificationFailure,
    VerifierService,
    write_json_report,
    write_junit_xml,
)
from ..spectral.fields import FieldError, VecField
from ..utils.file_utils import (
    AfldFormatError,
    canonical_hash,
    content_hash,
    manifest_entry,
    write_field_afld,
    write_json,
    write_vecfield_afld,
)
from .schemas import ConfigError, ExperimentConfig, check_output_dir, parse_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFICATION = 4

SWEEP_QUANTITIES = ("u0_b4neg", "u3_b4neg", "u3_b0", "uh_l2", "lam3_b0", "lhs_18", "lhs_19")


class RunOutcome(BaseModel):
    """Итог запуска: код выхода и список артефактов."""

    command: str
    exit_code: int
    artifacts: List[str] = PydField(default_factory=list)
    config_hash: str = ""
    cutoff_hash: str = ""
    message: str = ""


def load_config(path: str) -> ExperimentConfig:
    """
    Прочитать и проверить файл конфигурации.

    Raises:
        ConfigError: Файл не читается, не является JSON или не проходит проверку
    """
    try:
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
    except OSError as e:
        raise ConfigError([f"/: не удалось прочитать {path}: {e}"]) from e
    except json.JSONDecodeError as e:
        raise ConfigError([f"/: некорректный JSON в {path}: {e}"]) from e
    if not isinstance(payload, dict):
        raise ConfigError(["/: ожидался JSON-объект"])
    return parse_config(payload)


def field_norms(u: VecField) -> Dict[str, Any]:
    """Нормы начального поля для norms.json."""
    ubar, _ = biot_savart_split(u.horizontal)
    b0 = norm_B0half(u)
    return {
        "l2": u.l2_norm(),
        "h00": norm_H(u, 0.0, 0.0).value,
        "uh_b0": norm_B0half(list(u.horizontal)).value,
        "u3_b0": norm_B0half(u.vertical).value,
        "u_b0": b0.value,
        "u_b4_0half": norm_B4_0half(u).value,
        "u_b4neg": norm_B4_neg(u).value,
        "u3_b4neg": norm_B4_neg(u.vertical).value,
        "ubar0_b0": norm_B0half(list(ubar)).value,
        "vertical_mean": b0.vertical_mean,
        "divergence_residual": u.divergence_residual(),
        "grid": u.grid.describe(),
    }


def sweep_point(spec: DataFamilySpec, config: ExperimentConfig) -> Dict[str, float]:
    """Величины одной точки развёртки."""
    u0 = generate(spec, config.grid)
    report = smallness_report(u0, config.constants.smallness())
    return {
        "u0_b4neg": norm_B4_neg(u0).value,
        "u3_b4neg": report.u3_b4neg,
        "u3_b0": report.u3_b0,
        "uh_l2": report.uh_l2,
        "lam3_b0": report.lam3_b0,
        "lhs_18": report.lhs_18,
        "lhs_19": report.lhs_19,
    }


def loglog_slope(x: np.ndarray, y: np.ndarray) -> Optional[float]:
    """Наклон log y от log x методом наименьших квадратов; None при неположительных y."""
    if len(x) < 2 or not np.all(np.isfinite(y)) or np.any(y <= 0.0):
        return None
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


class ExperimentRunner:
    """Выполнение одной команды эксперимента с записью артефактов и манифеста."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.config_payload = config.model_dump(mode="json")
        self.config_hash = canonical_hash(self.config_payload)
        self.cutoff_hash = DEFAULT_CUTOFFS.profile_hash
        self.output_dir = Path(config.output_dir)
        self.artifacts: List[Path] = []

    @property
    def manifest_path(self) -> Path:
        return self.output_dir / "manifest.json"

    def _initial_data(self) -> VecField:
        return generate(self.config.data, self.config.grid)

    def _json(self, name: str, payload: Dict[str, Any]) -> None:
        payload = {**payload, "config_hash": self.config_hash, "cutoff_hash": self.cutoff_hash}
        self.artifacts.append(write_json(self.output_dir / name, payload))

    def _csv(self, name: str, rows: List[List[str]]) -> None:
        path = self.output_dir / name
        with open(path, "w", encoding="utf-8", newline="") as stream:
            stream.write(f"#cutoff={self.cutoff_hash};config={self.config_hash}\n")
            csv.writer(stream, lineterminator="\n").writerows(rows)
        self.artifacts.append(path)

    def write_manifest(self) -> Path:
        manifest = {
            "command": self.config.command,
            "config": self.config_payload,
            "config_hash": self.config_hash,
            "cutoff_hash": self.cutoff_hash,
            "content_hash": content_hash(self.config_payload, self.config.input_files()),
            "version": __version__,
            "artifacts": [manifest_entry(p, self.output_dir) for p in self.artifacts],
        }
        return write_json(self.manifest_path, manifest)

    # Команды

    def analyze(self) -> None:
        u0 = self._initial_data()
        report = smallness_report(u0, self.config.constants.smallness())
        self._json("smallness.json", report.model_dump(mode="python"))
        self._json("norms.json", field_norms(u0))

    def smallness(self) -> None:
        u0 = self._initial_data()
        report = smallness_report(u0, self.config.constants.smallness())
        logger.info(
            f"Условия малости: lhs_18 {report.verdict_18}, lhs_19 {report.verdict_19}, "
            f"𝔄_N = {report.A_N:.3e}"
        )
        self._json("smallness.json", report.model_dump(mode="python"))

    def simulate(self) -> None:
        u0 = self._initial_data()
        solver = AnisotropicSolver(u0.grid, self.config.solver)
        ledger = NormLedger(u0.grid, config_hash=self.config_hash)
        on_monitor: Optional[Callable[[SolverStep, NormLedger], None]] = None
        if self.config.write_checkpoints:
            checkpoint_dir = self.output_dir / "checkpoints"

            def on_monitor(record: SolverStep, _: NormLedger) -> None:
                self.artifacts.extend(
                    write_vecfield_afld(checkpoint_dir, f"u_step{record.step:06d}", record.u)
                )

        result = solver.integrate(u0, ledger, on_monitor)
        logger.info(
            f"Моделирование завершено: t = {result.t_final:.4f}, "
            f"дрейф энергии {result.max_energy_drift:.3e}"
        )
        self.artifacts.extend(write_vecfield_afld(self.output_dir, "u_final", result.u_final))
        self.artifacts.append(result.ledger.to_csv(self.output_dir / "ledger.csv"))

    def decompose(self) -> None:
        u0 = self._initial_data()
        result = run_decomposition(
            u0,
            self.config.solver,
            self.config.constants.decomposition(),
            config_hash=self.config_hash,
        )
        final = result.final
        self.artifacts.extend(write_vecfield_afld(self.output_dir, "u_final", final.u))
        self.artifacts.extend(write_vecfield_afld(self.output_dir, "ubar_final", final.ubar))
        self.artifacts.extend(write_vecfield_afld(self.output_dir, "v_final", final.v))
        self.artifacts.append(write_field_afld(self.output_dir / "vF_final.afld", final.vF))
        self.artifacts.append(write_field_afld(self.output_dir / "w_final.afld", final.w))
        self.artifacts.append(result.ledger.to_csv(self.output_dir / "ledger.csv"))
        self._json("decomposition.json", result.summary())

    def verify(self) -> None:
        report = VerifierService(self.config.verify, self.config_hash).run_all()
        self.artifacts.append(write_json_report(report, self.output_dir / "verify_report.json"))
        self.artifacts.append(write_junit_xml(report, self.output_dir / "verify_report.xml"))
        self.write_manifest()
        report.raise_for_failures()

    def sweep(self) -> None:
        sweep = self.config.sweep
        specs = [
            self.config.data.model_copy(update={sweep.parameter: value}) for value in sweep.values
        ]
        with ThreadPoolExecutor(max_workers=get_settings().threads) as executor:
            rows = list(executor.map(lambda s: sweep_point(s, self.config), specs))

        table = [[sweep.parameter, *SWEEP_QUANTITIES]]
        for value, row in zip(sweep.values, rows):
            table.append([repr(value)] + [repr(row[q]) for q in SWEEP_QUANTITIES])
        self._csv("sweep.csv", table)

        x = np.array(sweep.values)
        summary = [["quantity", "loglog_slope"]]
        for q in SWEEP_QUANTITIES:
            slope = loglog_slope(x, np.array([row[q] for row in rows]))
            summary.append([q, "" if slope is None else repr(slope)])
            if slope is not None:
                logger.info(f"Наклон {q} по {sweep.parameter}: {slope:.3f}")
        self._csv("sweep_summary.csv", summary)

    def run(self) -> List[Path]:
        """
        Выполнить команду конфигурации.

        Returns:
            List[Path]: Записанные артефакты (включая manifest.json)

        Raises:
            InadmissibleDataError, AfldFormatError, FieldError: Недопустимые данные
            CFLViolationError: Аварийная остановка решателя
            VerificationFailure: Не пройдены жёсткие проверки
        """
        command = self.config.command
        logger.info(f"Команда {command}: вывод в {self.output_dir}, config={self.config_hash[:12]}")
        getattr(self, command)()
        if command != "verify":
            self.write_manifest()
        return self.artifacts + [self.manifest_path]


def run_experiment(config: ExperimentConfig) -> RunOutcome:
    """
    Выполнить эксперимент и отобразить исключения в коды выхода.

    0 - успех, 2 - ошибка конфигурации или входных данных, 3 - остановка
    решателя, 4 - провал жёстких проверок.
    """
    outcome = RunOutcome(command=config.command, exit_code=EXIT_OK)
    runner: Optional[ExperimentRunner] = None
    try:
        check_output_dir(config.output_dir)
        runner = ExperimentRunner(config)
        outcome.config_hash = runner.config_hash
        outcome.cutoff_hash = runner.cutoff_hash
        outcome.artifacts = [str(p) for p in runner.run()]
    except (ConfigError, InadmissibleDataError, AfldFormatError, FieldError) as e:
        logger.error(f"Ошибка конфигурации или данных: {e}")
        outcome.exit_code = EXIT_CONFIG
        outcome.message = str(e)
    except CFLViolationError as e:
        logger.error(f"Решатель остановлен: {e}")
        outcome.exit_code = EXIT_SOLVER
        outcome.message = str(e)
    except VerificationFailure as e:
        logger.error(f"Проверки не пройдены: {e}")
        outcome.exit_code = EXIT_VERIFICATION
        outcome.message = str(e)
        if runner is not None:
            outcome.artifacts = [str(p) for p in runner.artifacts + [runner.manifest_path]]
    return outcome


def summarize(outcome: RunOutcome) -> str:
    status = "успешно" if outcome.exit_code == EXIT_OK else f"код {outcome.exit_code}"
    text = f"{outcome.command}: {status}, артефактов {len(outcome.artifacts)}"
    return f"{text} ({outcome.message})" if outcome.message else text
