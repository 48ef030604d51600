"""
Анизотропные нормы Бесова и норм-журнал траекторий.
"""

from .besov import (
    Measure,
    NormValue,
    l4h_l2v,
    norm_B0half,
    norm_B4_0half,
    norm_B4_neg,
    norm_H,
)
from .ledger import (
    BlockKind,
    LedgerError,
    NormLedger,
    Trajectory,
    cl_accumulate,
    weighted_cl_accumulate,
)

__all__ = [
    "BlockKind",
    "LedgerError",
    "Measure",
    "NormLedger",
    "NormValue",
    "Trajectory",
    "cl_accumulate",
    "l4h_l2v",
    "norm_B0half",
    "norm_B4_0half",
    "norm_B4_neg",
    "norm_H",
    "weighted_cl_accumulate",
]
