"""
Biblioteca de portas: matrizes densas complexas associadas a assinaturas de espaços.

Construtores disponíveis
------------------------
- hadamard: (1/√2)[[1, 1], [1, -1]] sobre um espaço de dimensão 2
- fourier n: ω^{jk}/√n, ω = exp(2πi/n)
- shift k: |x⟩ → |x+k⟩ com volta no anel (T_L = shift -1, T_R = shift 1)
- identity: identidade na dimensão da assinatura
- permutation(i0, ..., i_{d-1}): |j⟩ → |i_j⟩
- matrix [ ... ; ... ]: matriz explícita por linhas
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from modules.lang.ast import SpaceSpec

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class GateExpr:
    kind: str  # hadamard | fourier | shift | identity | permutation | matrix
    args: Tuple = ()


@dataclass
class GateEntry:
    name: str
    spaces: Tuple[str, ...]
    dims: Tuple[int, ...]
    expr: GateExpr
    matrix: Optional[np.ndarray]
    unitary: bool
    problem: Optional[str] = None

    @property
    def dimension(self) -> int:
        return int(np.prod(self.dims)) if self.dims else 1


def hadamard() -> np.ndarray:
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)


def fourier(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError(f"Fourier exige n ≥ 1 (recebido {n})")
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.exp(2j * np.pi * j * k / n) / np.sqrt(n)


def shift(k: int, dim: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=np.complex128)
    for x in range(dim):
        m[(x + k) % dim, x] = 1.0
    return m


def permutation(images: Sequence[int]) -> np.ndarray:
    d = len(images)
    if sorted(images) != list(range(d)):
        raise ValueError(f"Permutação inválida: {list(images)}")
    m = np.zeros((d, d), dtype=np.complex128)
    for j, i in enumerate(images):
        m[i, j] = 1.0
    return m


def is_unitary(m: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=tol, rtol=0.0))


def build_matrix(expr: GateExpr, dims: Tuple[int, ...]) -> np.ndarray:
    """Constrói a matriz de uma expressão de porta para as dimensões da assinatura."""
    total = int(np.prod(dims))
    if expr.kind == "hadamard":
        if total != 2:
            raise ValueError(f"hadamard exige dimensão 2, assinatura tem {total}")
        return hadamard()
    if expr.kind == "fourier":
        (n,) = expr.args
        if n != total:
            raise ValueError(f"fourier {n} incompatível com dimensão {total}")
        return fourier(n)
    if expr.kind == "shift":
        if len(dims) != 1:
            raise ValueError("shift age sobre um único espaço")
        return shift(expr.args[0], total)
    if expr.kind == "identity":
        return np.eye(total, dtype=np.complex128)
    if expr.kind == "permutation":
        if len(expr.args) != total:
            raise ValueError(f"permutação de {len(expr.args)} elementos em dimensão {total}")
        return permutation(expr.args)
    if expr.kind == "matrix":
        rows = expr.args
        if any(len(row) != len(rows) for row in rows):
            raise ValueError("matriz não quadrada")
        if len(rows) != total:
            raise ValueError(f"matriz {len(rows)}×{len(rows)} em assinatura de dimensão {total}")
        return np.array(rows, dtype=np.complex128)
    raise ValueError(f"Expressão de porta desconhecida: {expr.kind}")


@dataclass
class GateLibrary:
    entries: Dict[str, GateEntry] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __getitem__(self, name: str) -> GateEntry:
        return self.entries[name]

    def define(self, name: str, spaces: List[SpaceSpec], expr: GateExpr) -> GateEntry:
        """Registra a porta; problemas de dimensão ficam anotados para a validação."""
        dims = tuple(space.dimension for space in spaces)
        matrix, problem = None, None
        try:
            matrix = build_matrix(expr, dims)
        except ValueError as e:
            problem = str(e)
        entry = GateEntry(
            name=name,
            spaces=tuple(space.name for space in spaces),
            dims=dims,
            expr=expr,
            matrix=matrix,
            unitary=matrix is not None and is_unitary(matrix),
            problem=problem,
        )
        self.entries[name] = entry
        return entry

    def matrix(self, name: str) -> np.ndarray:
        entry = self.entries[name]
        if entry.matrix is None:
            raise ValueError(f"Porta '{name}' sem matriz válida: {entry.problem}")
        return entry.matrix
