"""
Гладкие диадические срезки χ и φ.

χ равна 1 при |τ| <= transition_start, нулю при |τ| >= transition_end и гладко
переходит между ними через мягкую ступень на основе exp(-1/x);
φ(τ) = χ(τ/2) - χ(τ).
"""

import hashlib
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

ArrayLike = Union[float, np.ndarray]

PHI_SUPPORT_START = 0.75
CHI_SUPPORT_END = 4.0 / 3.0
_SUPPORT_SLACK = 1e-15


class CutoffProfileError(ValueError):
    """Параметры профиля нарушают условия на носители срезок."""


class CutoffProfile(BaseModel):
    """Параметры профиля срезок."""

    model_config = ConfigDict(frozen=True)

    transition_start: float = Field(default=PHI_SUPPORT_START)
    transition_end: float = Field(default=CHI_SUPPORT_END)
    phi_scale: float = Field(default=1.0, gt=0)
    resolution: int = Field(default=4096, ge=16, description="Точек табуляции для хэша")


def _mollifier(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    positive = x > 0.0
    out[positive] = np.exp(-1.0 / x[positive])
    return out


def smooth_step(s: ArrayLike) -> np.ndarray:
    """C^∞ ступень: 0 при s <= 0, 1 при s >= 1."""
    s = np.asarray(s, dtype=float)
    flat = np.atleast_1d(s)
    left = _mollifier(flat)
    right = _mollifier(1.0 - flat)
    return (left / (left + right)).reshape(s.shape)


@dataclass(frozen=True)
class CutoffPair:
    """Пара срезок (χ, φ) с фиксированным профилем."""

    profile: CutoffProfile
    _hash: str = field(default="", compare=False, repr=False)

    def chi(self, tau: ArrayLike) -> np.ndarray:
        t = np.abs(np.asarray(tau, dtype=float))
        width = self.profile.transition_end - self.profile.transition_start
        return 1.0 - smooth_step((t - self.profile.transition_start) / width)

    def phi(self, tau: ArrayLike) -> np.ndarray:
        t = np.asarray(tau, dtype=float)
        return self.profile.phi_scale * (self.chi(t / 2.0) - self.chi(t))

    @property
    def phi_support(self) -> tuple:
        return (self.profile.transition_start, 2.0 * self.profile.transition_end)

    @property
    def profile_hash(self) -> str:
        return self._hash


def _profile_hash(pair: CutoffPair) -> str:
    p = pair.profile
    tau = np.linspace(0.0, 3.0, p.resolution)
    digest = hashlib.sha256()
    digest.update(
        f"{p.transition_start!r};{p.transition_end!r};{p.phi_scale!r};{p.resolution}".encode()
    )
    digest.update(np.ascontiguousarray(pair.chi(tau), dtype="<f8").tobytes())
    digest.update(np.ascontiguousarray(pair.phi(tau), dtype="<f8").tobytes())
    return digest.hexdigest()[:16]


def build_cutoffs(profile: Union[CutoffProfile, dict, None] = None) -> CutoffPair:
    """
    Построить пару срезок.

    Args:
        profile: Параметры профиля (по умолчанию стандартная ступень на [3/4, 4/3])

    Returns:
        CutoffPair: Срезки с вычисленным хэшем профиля

    Raises:
        CutoffProfileError: Если переход выходит за [3/4, 4/3]
    """
    if profile is None:
        profile = CutoffProfile()
    elif isinstance(profile, dict):
        profile = CutoffProfile(**profile)
    start, end = profile.transition_start, profile.transition_end
    if not (PHI_SUPPORT_START - _SUPPORT_SLACK <= start < end <= CHI_SUPPORT_END + _SUPPORT_SLACK):
        raise CutoffProfileError(
            f"Переход [{start}, {end}] должен лежать в [3/4, 4/3] и иметь положительную длину"
        )
    pair = CutoffPair(profile)
    return CutoffPair(profile, _profile_hash(pair))


DEFAULT_CUTOFFS = build_cutoffs()
