"""
Утилиты для работы с файлами: бинарный формат полей AFLD1, JSON-артефакты,
хэши содержимого.
"""

import hashlib
import json
import logging
import math
import re
import struct
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np

from ..spectral.fields import Field, VecField, hermitian_defect
from ..spectral.grid import Grid

logger = logging.getLogger(__name__)

AFLD_MAGIC = b"AFLD0001"
AFLD_HEADER = struct.Struct("<8s3I2d")

PathLike = Union[str, Path]


class AfldFormatError(ValueError):
    """Файл не соответствует формату AFLD1."""

    def __init__(self, path: PathLike, reason: str):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{path}: {reason}")


def _to_file_order(coeffs: np.ndarray) -> np.ndarray:
    """Порядок FFT -> возрастающие частоты -n/2+1 ... n/2 по каждой оси."""
    shifts = tuple(n // 2 - 1 for n in coeffs.shape)
    return np.roll(coeffs, shift=shifts, axis=(0, 1, 2))


def _from_file_order(coeffs: np.ndarray) -> np.ndarray:
    shifts = tuple(-(n // 2 - 1) for n in coeffs.shape)
    return np.roll(coeffs, shift=shifts, axis=(0, 1, 2))


def write_field_afld(path: PathLike, field: Field) -> Path:
    """
    Записывает поле в формате AFLD1.

    Args:
        path: Путь к файлу
        field: Поле

    Returns:
        Path: Путь к записанному файлу
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = field.grid
    header = AFLD_HEADER.pack(AFLD_MAGIC, grid.n_h, grid.n_h, grid.n_v, grid.period_h, grid.period_v)
    payload = np.ascontiguousarray(_to_file_order(field.coeffs), dtype="<c16").tobytes()
    with open(path, "wb") as f:
        f.write(header)
        f.write(payload)
    return path


def read_field_afld(path: PathLike) -> Field:
    """
    Читает поле из файла AFLD1.

    Флаг вещественности выставляется, если коэффициенты эрмитовы.

    Raises:
        AfldFormatError: Неверная сигнатура, размеры или длина данных
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        logger.error(f"Ошибка при чтении файла поля {path}: {e}")
        raise AfldFormatError(path, f"не удалось прочитать файл: {e}") from e
    if len(data) < AFLD_HEADER.size:
        raise AfldFormatError(path, "файл короче заголовка")
    magic, n1, n2, n3, period_h, period_v = AFLD_HEADER.unpack_from(data)
    if magic != AFLD_MAGIC:
        raise AfldFormatError(path, f"неверная сигнатура {magic!r}")
    if n1 != n2:
        raise AfldFormatError(path, f"горизонтальные размеры различаются: {n1} и {n2}")
    expected = n1 * n2 * n3 * 16
    if len(data) - AFLD_HEADER.size != expected:
        raise AfldFormatError(path, f"ожидалось {expected} байт коэффициентов")
    try:
        grid = Grid(n_h=n1, n_v=n3, period_h=period_h, period_v=period_v)
    except ValueError as e:
        raise AfldFormatError(path, f"недопустимая сетка: {e}") from e
    coeffs = np.frombuffer(data, dtype="<c16", offset=AFLD_HEADER.size).reshape(grid.shape)
    coeffs = _from_file_order(coeffs.astype(np.complex128))
    scale = max(float(np.max(np.abs(coeffs))), np.finfo(float).tiny)
    reality = hermitian_defect(coeffs) <= 1e-13 * scale
    return Field(grid, coeffs, reality)


def write_vecfield_afld(directory: PathLike, prefix: str, u: Union[VecField, Sequence[Field]]) -> List[Path]:
    """Записывает компоненты как <prefix>_1.afld, <prefix>_2.afld, ..."""
    components = u.components if isinstance(u, VecField) else tuple(u)
    return [
        write_field_afld(component_path(directory, prefix, i), c)
        for i, c in enumerate(components, start=1)
    ]


def read_vecfield_afld(paths: Sequence[PathLike]) -> VecField:
    fields = [read_field_afld(p) for p in paths]
    if len(fields) != 3:
        raise AfldFormatError(", ".join(map(str, paths)), "ожидалось три компоненты")
    return VecField(tuple(fields))  # type: ignore[arg-type]


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_hash(payload: Any) -> str:
    """SHA-256 канонического JSON-представления."""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def content_hash(payload: Any, files: Iterable[PathLike] = ()) -> str:
    """Хэш содержимого входов: канонический JSON плюс байты входных файлов."""
    digest = hashlib.sha256(canonical_json(payload).encode("utf-8"))
    for path in files:
        digest.update(Path(path).read_bytes())
    return digest.hexdigest()


def finite_json(payload: Any) -> Any:
    """Заменяет inf и nan на None: строгий JSON их не допускает."""
    if isinstance(payload, float):
        return payload if math.isfinite(payload) else None
    if isinstance(payload, dict):
        return {k: finite_json(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [finite_json(v) for v in payload]
    return payload


def write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
    """Записывает JSON с сортировкой ключей (детерминированный вывод)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(finite_json(payload), f, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
        f.write("\n")
    return path


_INVALID_NAME = re.compile(r"[^0-9A-Za-z_.-]+")


def component_path(directory: PathLike, prefix: str, index: int) -> Path:
    """
    Путь файла компоненты: <directory>/<prefix>_<index>.afld.

    Символы префикса вне [0-9A-Za-z_.-] заменяются на "_".

    Raises:
        AfldFormatError: Префикс пуст после очистки или индекс вне 1..3
    """
    stem = _INVALID_NAME.sub("_", prefix).strip("._")
    if not stem:
        raise AfldFormatError(directory, f"недопустимый префикс компонент: {prefix!r}")
    if index not in (1, 2, 3):
        raise AfldFormatError(directory, f"индекс компоненты {index} вне 1..3")
    return Path(directory) / f"{stem}_{index}.afld"


def manifest_entry(path: PathLike, root: PathLike) -> Dict[str, Any]:
    """
    Запись манифеста об артефакте: путь относительно root, размер и SHA-256.

    Raises:
        AfldFormatError: Артефакт отсутствует или лежит вне root
    """
    path, root = Path(path), Path(root)
    try:
        data = path.read_bytes()
        relative = path.relative_to(root)
    except (OSError, ValueError) as e:
        logger.error(f"Артефакт {path} не может быть внесён в манифест: {e}")
        raise AfldFormatError(path, f"артефакт недоступен: {e}") from e
    return {
        "path": relative.as_posix(),
        "bytes": len(data),
        "sha256": hashlib.sha256(data).hexdigest(),
    }
