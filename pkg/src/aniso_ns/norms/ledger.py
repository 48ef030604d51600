"""
Норм-журнал траектории: строки значений норм по моментам времени,
накопители норм Шемена-Лерне L̃^p_T и взвешенные накопители L̃²_{T,f}.
"""

import copy
import csv
import io
import logging
import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, TextIO, Tuple, Union

import numpy as np

from ..littlewood_paley.ladder import DyadicLadder, build_ladder
from ..spectral.fields import FieldLike, VecField
from ..spectral.grid import Grid
from .besov import (
    Measure,
    combine_b4_neg,
    low_block_l2,
    measure_factors,
    mixed_block_l4l2,
    shell_weights,
    vertical_block_l2,
    vertical_block_l4l2,
)

logger = logging.getLogger(__name__)

LEDGER_SCHEMA = "ledger-v1"
Exponent = Union[int, float, str]


class LedgerError(ValueError):
    """Нарушение инварианта журнала: немонотонное время, отрицательное значение."""


class BlockKind(str, Enum):
    """Какие блочные величины накапливаются во времени."""

    B0HALF = "b0half"
    B4_0HALF = "b4_0half"
    B4_NEG = "b4_neg"


def block_values(kind: BlockKind, x: FieldLike, ladder: DyadicLadder) -> np.ndarray:
    """Плоский вектор блочных норм поля для данного вида накопителя."""
    kind = BlockKind(kind)
    if kind is BlockKind.B0HALF:
        return vertical_block_l2(x, ladder)
    if kind is BlockKind.B4_0HALF:
        return vertical_block_l4l2(x, ladder)
    mixed = mixed_block_l4l2(x, ladder)
    return np.concatenate([mixed.ravel(), low_block_l2(x, ladder)])


def combine_blocks(
    kind: BlockKind,
    per_block: np.ndarray,
    ladder: DyadicLadder,
    measure: Measure = Measure.VOLUME,
) -> np.ndarray:
    """Вклады вертикальных оболочек по блочным нормам (мгновенным или L^p_T)."""
    kind = BlockKind(kind)
    factors = measure_factors(ladder.grid, measure)
    if kind is BlockKind.B0HALF:
        return shell_weights(ladder) * per_block * factors[0]
    if kind is BlockKind.B4_0HALF:
        return shell_weights(ladder) * per_block * factors[1]
    n_l = len(ladder.vertical_shells)
    n_k = len(ladder.horizontal_shells)
    mixed = per_block[: n_l * n_k].reshape(n_l, n_k)
    low = per_block[n_l * n_k :]
    return combine_b4_neg(mixed**2, low, ladder, factors)


def parse_exponent(p: Exponent) -> float:
    value = float(p)
    if value not in (1.0, 2.0, 4.0, math.inf):
        raise LedgerError(f"Показатель p должен быть 1, 2, 4 или inf: {p}")
    return value


def exponent_label(p: float) -> str:
    return "inf" if math.isinf(p) else str(int(p))


@dataclass
class ShellAccumulator:
    """Поблочный интеграл по времени (формула трапеций) или текущий максимум."""

    p: float
    last_t: Optional[float] = None
    last_powered: Optional[np.ndarray] = None
    integral: Optional[np.ndarray] = None

    def update(self, t: float, values: np.ndarray, weight: float = 1.0) -> None:
        if self.last_t is not None and not t > self.last_t:
            raise LedgerError(f"Время должно строго возрастать: {t} после {self.last_t}")
        values = np.asarray(values, dtype=float)
        if math.isinf(self.p):
            self.integral = values.copy() if self.integral is None else np.maximum(self.integral, values)
        else:
            powered = weight * values**self.p
            if self.integral is None:
                self.integral = np.zeros_like(powered)
            else:
                self.integral = self.integral + 0.5 * (t - self.last_t) * (self.last_powered + powered)
            self.last_powered = powered
        self.last_t = t

    def roots(self) -> np.ndarray:
        """‖блок‖_{L^p_T} по всем блокам."""
        if self.integral is None:
            return np.zeros(0)
        if math.isinf(self.p):
            return self.integral
        return self.integral ** (1.0 / self.p)


class NormLedger:
    """
    Журнал норм одной траектории.

    Одна строка на момент мониторинга, столбцы в порядке первой регистрации.
    Запись выполняет один писатель; чтение из других потоков - через snapshot().
    """

    def __init__(
        self,
        grid: Grid,
        ladder: Optional[DyadicLadder] = None,
        config_hash: str = "",
    ):
        self.grid = grid
        self.ladder = ladder or build_ladder(grid)
        self.cutoff_hash = self.ladder.cutoffs.profile_hash
        self.config_hash = config_hash
        self._times: List[float] = []
        self._rows: List[Dict[str, float]] = []
        self._columns: List[str] = []
        self._accumulators: Dict[Tuple[str, str, str], ShellAccumulator] = {}
        self._lock = threading.Lock()

    # Строки

    def record(self, t: float, values: Mapping[str, float]) -> None:
        """
        Добавить строку журнала.

        Raises:
            LedgerError: При немонотонном времени, отрицательном или NaN значении
        """
        checked: Dict[str, float] = {}
        for name, value in values.items():
            value = float(value)
            if math.isnan(value) or value < 0.0:
                raise LedgerError(f"Недопустимое значение {name} = {value} при t = {t}")
            checked[name] = value
        with self._lock:
            if self._times and not t > self._times[-1]:
                raise LedgerError(f"Время строки должно строго возрастать: {t}")
            for name in checked:
                if name not in self._columns:
                    self._columns.append(name)
            self._times.append(float(t))
            self._rows.append(checked)

    @property
    def times(self) -> np.ndarray:
        return np.array(self._times)

    @property
    def columns(self) -> List[str]:
        return list(self._columns)

    def __len__(self) -> int:
        return len(self._rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([row.get(name, math.nan) for row in self._rows])

    def last(self, name: str) -> float:
        return self._rows[-1][name]

    # Накопители

    def cl_accumulate(
        self,
        p: Exponent,
        field_tag: str,
        t: float,
        a: FieldLike,
        kind: BlockKind = BlockKind.B0HALF,
    ) -> "NormLedger":
        """Обновить накопитель L̃^p_T для поля field_tag."""
        exponent = parse_exponent(p)
        key = (field_tag, exponent_label(exponent), BlockKind(kind).value)
        values = block_values(kind, a, self.ladder)
        with self._lock:
            accumulator = self._accumulators.setdefault(key, ShellAccumulator(exponent))
            accumulator.update(t, values)
        return self

    def weighted_cl_accumulate(
        self,
        weight_tag: str,
        f_t: float,
        t: float,
        a: FieldLike,
    ) -> "NormLedger":
        """Обновить взвешенный накопитель ∫ f(t)‖Δ_ℓ^v a‖² dt."""
        if math.isnan(f_t) or f_t < 0.0:
            raise LedgerError(f"Вес {weight_tag} должен быть неотрицательным: {f_t}")
        key = (weight_tag, "weighted", BlockKind.B0HALF.value)
        values = vertical_block_l2(a, self.ladder)
        with self._lock:
            accumulator = self._accumulators.setdefault(key, ShellAccumulator(2.0))
            accumulator.update(t, values, weight=f_t)
        return self

    def _accumulator(self, key: Tuple[str, str, str]) -> ShellAccumulator:
        try:
            return self._accumulators[key]
        except KeyError:
            raise LedgerError(f"Накопитель {key} не зарегистрирован") from None

    def cl_shells(
        self,
        p: Exponent,
        field_tag: str,
        kind: BlockKind = BlockKind.B0HALF,
        measure: Measure = Measure.VOLUME,
    ) -> np.ndarray:
        exponent = parse_exponent(p)
        accumulator = self._accumulator((field_tag, exponent_label(exponent), BlockKind(kind).value))
        return combine_blocks(kind, accumulator.roots(), self.ladder, measure)

    def cl_norm(
        self,
        p: Exponent,
        field_tag: str,
        kind: BlockKind = BlockKind.B0HALF,
        measure: Measure = Measure.VOLUME,
    ) -> float:
        """‖a‖_{L̃^p_T(B)} по накопленным данным."""
        return float(np.sum(self.cl_shells(p, field_tag, kind, measure)))

    def weighted_norm(self, weight_tag: str, measure: Measure = Measure.VOLUME) -> float:
        """‖a‖_{L̃²_{T,f}(B^{0,1/2})}."""
        accumulator = self._accumulator((weight_tag, "weighted", BlockKind.B0HALF.value))
        return float(np.sum(combine_blocks(BlockKind.B0HALF, accumulator.roots(), self.ladder, measure)))

    def has_accumulator(self, tag: str, p: Exponent, kind: BlockKind = BlockKind.B0HALF) -> bool:
        return (tag, exponent_label(parse_exponent(p)), BlockKind(kind).value) in self._accumulators

    # Снимки и сериализация

    def snapshot(self) -> "NormLedger":
        """Независимая копия журнала для чтения из других потоков."""
        with self._lock:
            copy_ = NormLedger(self.grid, self.ladder, self.config_hash)
            copy_._times = list(self._times)
            copy_._rows = [dict(row) for row in self._rows]
            copy_._columns = list(self._columns)
            copy_._accumulators = copy.deepcopy(self._accumulators)
        return copy_

    def header_comment(self) -> str:
        return f"#{self.grid.describe()};cutoff={self.cutoff_hash};config={self.config_hash}"

    def write_csv(self, stream: TextIO) -> None:
        stream.write(f"#schema={LEDGER_SCHEMA}\n")
        stream.write(self.header_comment() + "\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["t"] + self._columns)
        for t, row in zip(self._times, self._rows):
            writer.writerow([repr(t)] + [repr(row[c]) if c in row else "" for c in self._columns])

    def to_csv_text(self) -> str:
        buffer = io.StringIO()
        self.write_csv(buffer)
        return buffer.getvalue()

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        snapshot = self.snapshot()
        with open(path, "w", encoding="utf-8", newline="") as stream:
            snapshot.write_csv(stream)
        logger.info(f"Журнал норм записан: {path} ({len(snapshot)} строк)")
        return path


def cl_accumulate(
    ledger: NormLedger,
    p: Exponent,
    field_tag: str,
    t: float,
    a_t: FieldLike,
    kind: BlockKind = BlockKind.B0HALF,
) -> NormLedger:
    """Обновить накопитель Шемена-Лерне журнала."""
    return ledger.cl_accumulate(p, field_tag, t, a_t, kind)


def weighted_cl_accumulate(
    ledger: NormLedger, weight_tag: str, f_t: float, t: float, a_t: FieldLike
) -> NormLedger:
    """Обновить взвешенный накопитель журнала."""
    return ledger.weighted_cl_accumulate(weight_tag, f_t, t, a_t)


@dataclass
class Trajectory:
    """Упорядоченные по времени состояния и журнал норм."""

    ledger: NormLedger
    times: List[float] = field(default_factory=list)
    states: List[VecField] = field(default_factory=list)

    def append(self, t: float, state: VecField) -> None:
        if self.times and not t > self.times[-1]:
            raise LedgerError(f"Моменты траектории должны строго возрастать: {t}")
        self.times.append(float(t))
        self.states.append(state)
