"""Comparação bloco a bloco de dois operadores de Fock."""

from dataclasses import dataclass
from typing import Dict, Iterable, Optional

import pandas as pd

from modules.fock.operator import DEFAULT_TOL, FockOperator
from modules.fock.space import OccVec
from modules.fock.tensor import max_abs


@dataclass
class ComparisonReport:
    """Uma linha por ocupação: maior diferença absoluta de entrada e marca de casca truncada."""

    table: pd.DataFrame
    tolerance: float
    label: str = ""

    @property
    def max_diff(self) -> float:
        return float(self.table["max_diff"].max()) if not self.table.empty else 0.0

    @property
    def worst_occupation(self) -> Optional[str]:
        if self.table.empty:
            return None
        return str(self.table.loc[self.table["max_diff"].idxmax(), "occ"])

    @property
    def passed(self) -> bool:
        return self.max_diff <= self.tolerance

    def summary(self) -> Dict:
        return {
            "label": self.label,
            "max_diff": self.max_diff,
            "worst_occupation": self.worst_occupation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "occupations": int(len(self.table)),
        }


def compare(a: FockOperator, b: FockOperator, tol: float = DEFAULT_TOL,
            occupations: Optional[Iterable[OccVec]] = None, label: str = "") -> ComparisonReport:
    a.space.require_same(b.space)
    occs = list(a.space.occupations if occupations is None else occupations)
    rows = [{
        "occ": str(occ),
        "total": occ.total,
        "max_diff": max_abs(a.block_at(occ) - b.block_at(occ)),
        "possibly_truncated": a.space.on_top_shell(occ),
    } for occ in occs]
    table = pd.DataFrame(rows, columns=["occ", "total", "max_diff", "possibly_truncated"])
    return ComparisonReport(table, tol, label)


def interior(space) -> list:
    """Ocupações fora da casca máxima do truncamento."""
    return [o for o in space.occupations if not space.on_top_shell(o)]
