"""
Спектральные поля: скалярное Field и трёхкомпонентное VecField.

Поля неизменяемы: массив коэффициентов копируется при создании и помечается
только для чтения, поэтому поля можно свободно передавать между потоками.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from ..config import get_settings
from .grid import Grid
from .transforms import forward, inverse, wavenumbers

Scalar = Union[int, float, complex]


class FieldError(ValueError):
    """Нарушение инварианта спектрального поля."""


def mirror(coeffs: np.ndarray) -> np.ndarray:
    """Коэффициенты в точке -ξ для массива в порядке FFT."""
    return np.roll(np.flip(coeffs), shift=1, axis=(0, 1, 2))


def hermitian_defect(coeffs: np.ndarray) -> float:
    """max|c(-ξ) - conj(c(ξ))|."""
    if coeffs.size == 0:
        return 0.0
    return float(np.max(np.abs(mirror(coeffs) - np.conj(coeffs))))


def _max_abs(coeffs: np.ndarray) -> float:
    return float(np.max(np.abs(coeffs))) if coeffs.size else 0.0


@dataclass(frozen=True, eq=False)
class Field:
    """
    Скалярное поле на торе в спектральном представлении.

    Коэффициенты нормированы на объём: L2-норма равна sqrt(sum |c|^2),
    постоянное поле 1 имеет норму 1.
    """

    grid: Grid
    coeffs: np.ndarray
    reality: bool = True

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if coeffs.shape != self.grid.shape:
            raise FieldError(
                f"Форма коэффициентов {coeffs.shape} не совпадает с сеткой {self.grid.shape}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        if self.reality:
            scale = max(_max_abs(coeffs), np.finfo(float).tiny)
            defect = hermitian_defect(coeffs)
            if defect > get_settings().hermitian_tolerance * scale:
                raise FieldError(
                    f"Коэффициенты не эрмитовы: дефект {defect:.3e} при масштабе {scale:.3e}"
                )

    @classmethod
    def zeros(cls, grid: Grid, reality: bool = True) -> "Field":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128), reality)

    @classmethod
    def from_physical(cls, grid: Grid, values: np.ndarray) -> "Field":
        """Построить поле по значениям в узлах сетки."""
        values = np.broadcast_to(values, grid.shape)
        return cls(grid, forward(values), reality=bool(np.isrealobj(values)))

    def to_physical(self) -> np.ndarray:
        values = inverse(self.coeffs)
        return values.real if self.reality else values

    def with_coeffs(self, coeffs: np.ndarray) -> "Field":
        return Field(self.grid, coeffs, self.reality)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.vdot(self.coeffs, self.coeffs).real))

    def inner(self, other: "Field") -> complex:
        """Скалярное произведение (a|b) = sum conj(a) b."""
        self._check_same_grid(other)
        return complex(np.vdot(self.coeffs, other.coeffs))

    def max_abs(self) -> float:
        return _max_abs(self.coeffs)

    def _check_same_grid(self, other: "Field") -> None:
        if self.grid != other.grid:
            raise FieldError("Поля заданы на разных сетках")

    def __add__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.coeffs + other.coeffs, self.reality and other.reality)

    def __sub__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.coeffs - other.coeffs, self.reality and other.reality)

    def __neg__(self) -> "Field":
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, scalar: Scalar) -> "Field":
        reality = self.reality and complex(scalar).imag == 0.0
        return Field(self.grid, self.coeffs * scalar, reality)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class VecField:
    """Векторное поле u = (u1, u2, u3)."""

    components: Tuple[Field, Field, Field]
    divergence_free: bool = False

    def __post_init__(self) -> None:
        components = tuple(self.components)
        if len(components) != 3:
            raise FieldError(f"Ожидалось 3 компоненты, получено {len(components)}")
        grid = components[0].grid
        if any(c.grid != grid for c in components):
            raise FieldError("Компоненты заданы на разных сетках")
        object.__setattr__(self, "components", components)
        if self.divergence_free:
            residual = self.divergence_residual()
            if residual > get_settings().divergence_tolerance:
                raise FieldError(f"Поле не бездивергентно: невязка {residual:.3e}")

    @classmethod
    def zeros(cls, grid: Grid) -> "VecField":
        return cls((Field.zeros(grid), Field.zeros(grid), Field.zeros(grid)), True)

    @classmethod
    def from_stack(
        cls, grid: Grid, stack: np.ndarray, divergence_free: bool = False, reality: bool = True
    ) -> "VecField":
        return cls(
            tuple(Field(grid, stack[i], reality) for i in range(3)),  # type: ignore[arg-type]
            divergence_free,
        )

    @classmethod
    def from_physical(cls, grid: Grid, values: Sequence[np.ndarray]) -> "VecField":
        return cls(tuple(Field.from_physical(grid, v) for v in values))  # type: ignore[arg-type]

    @property
    def grid(self) -> Grid:
        return self.components[0].grid

    @property
    def horizontal(self) -> Tuple[Field, Field]:
        return self.components[0], self.components[1]

    @property
    def vertical(self) -> Field:
        return self.components[2]

    @property
    def reality(self) -> bool:
        return all(c.reality for c in self.components)

    def stack(self) -> np.ndarray:
        return np.stack([c.coeffs for c in self.components])

    def divergence_residual(self) -> float:
        """max|ξ·û| / max|û| (0 для нулевого поля)."""
        table = wavenumbers(self.grid)
        div = sum(1j * xi * c.coeffs for xi, c in zip(table.xi, self.components))
        scale = max(c.max_abs() for c in self.components)
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(div))) / scale

    def l2_norm(self) -> float:
        return float(np.sqrt(sum(c.l2_norm() ** 2 for c in self.components)))

    def to_physical(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(c.to_physical() for c in self.components)  # type: ignore[return-value]

    def __add__(self, other: "VecField") -> "VecField":
        return VecField(tuple(a + b for a, b in zip(self.components, other.components)))  # type: ignore[arg-type]

    def __sub__(self, other: "VecField") -> "VecField":
        return VecField(tuple(a - b for a, b in zip(self.components, other.components)))  # type: ignore[arg-type]

    def __mul__(self, scalar: Scalar) -> "VecField":
        return VecField(tuple(c * scalar for c in self.components), self.divergence_free)  # type: ignore[arg-type]

    __rmul__ = __mul__


FieldLike = Union[Field, VecField, Sequence[Field]]


def as_components(x: FieldLike) -> Tuple[Field, ...]:
    """Привести поле, векторное поле или набор полей к кортежу компонент."""
    if isinstance(x, Field):
        return (x,)
    if isinstance(x, VecField):
        return x.components
    components = tuple(x)
    if not components:
        raise FieldError("Пустой набор компонент")
    return components


def random_band_limited(
    grid: Grid,
    rng: np.random.Generator,
    band_h: int,
    band_v: int,
    amplitude: float = 1.0,
    zero_mean: bool = False,
) -> Field:
    """
    Случайное вещественное поле с гауссовыми коэффициентами при |k1|,|k2| <= band_h,
    |k3| <= band_v.

    Коэффициенты генерируются на каноническом кубе частот, поэтому одно и то же
    зерно даёт одну и ту же функцию на любой достаточно подробной сетке.

    Args:
        grid: Сетка
        rng: Генератор случайных чисел
        band_h: Горизонтальная полоса частот
        band_v: Вертикальная полоса частот
        amplitude: L2-норма результата
        zero_mean: Обнулить нулевую моду

    Returns:
        Field: Вещественное поле
    """
    if not (0 <= band_h < grid.n_h // 2 and 0 <= band_v < grid.n_v // 2):
        raise FieldError(
            f"Полоса ({band_h}, {band_v}) не помещается ниже частоты Найквиста сетки"
        )
    shape = (2 * band_h + 1, 2 * band_h + 1, 2 * band_v + 1)
    box = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    box = 0.5 * (box + np.conj(box[::-1, ::-1, ::-1]))
    if zero_mean:
        box[band_h, band_h, band_v] = 0.0
    norm = float(np.sqrt(np.sum(np.abs(box) ** 2)))
    if norm > 0.0:
        box *= amplitude / norm
    return Field(grid, embed_box(grid, box))


def embed_box(grid: Grid, box: np.ndarray) -> np.ndarray:
    """Разместить центрированный куб коэффициентов в массиве сетки (порядок FFT)."""
    bh = (box.shape[0] - 1) // 2
    bv = (box.shape[2] - 1) // 2
    ih = np.arange(-bh, bh + 1) % grid.n_h
    iv = np.arange(-bv, bv + 1) % grid.n_v
    out = np.zeros(grid.shape, dtype=np.complex128)
    out[np.ix_(ih, ih, iv)] = box
    return out
