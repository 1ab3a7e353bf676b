"""
Operadores de permutação sobre as cópias de uma moeda.

Convenção: P_π|ψ_0 ⊗ … ⊗ ψ_{n−1}⟩ = |ψ_{π(0)} ⊗ … ⊗ ψ_{π(n−1)}⟩, isto é, o fator
de saída k recebe o fator de entrada mapping[k]. Com o produto π @ σ definido por
k ↦ σ(π(k)) vale P_π P_σ = P_{π @ σ}.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Iterator, Tuple

import scipy.sparse as sp

from modules.fock.space import FockSpace, OccVec
from modules.fock.tensor import permutation_matrix, permuted_index_map
from modules.utils.errors import SpaceMismatchError


@dataclass(frozen=True)
class PermutationSpec:
    mapping: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"{self.mapping} não é uma bijeção de {{0..{len(self.mapping) - 1}}}")

    def __len__(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, n: int) -> "PermutationSpec":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "PermutationSpec":
        mapping = list(range(n))
        mapping[i], mapping[j] = mapping[j], mapping[i]
        return cls(tuple(mapping))

    @classmethod
    def all(cls, n: int) -> Iterator["PermutationSpec"]:
        for mapping in permutations(range(n)):
            yield cls(mapping)

    @cached_property
    def sign(self) -> int:
        """(−1)^{inversões}."""
        inversions = sum(1 for i in range(len(self)) for j in range(i + 1, len(self))
                         if self.mapping[i] > self.mapping[j])
        return -1 if inversions % 2 else 1

    def __matmul__(self, other: "PermutationSpec") -> "PermutationSpec":
        if len(self) != len(other):
            raise ValueError("permutações de tamanhos diferentes")
        return PermutationSpec(tuple(other.mapping[k] for k in self.mapping))

    def inverse(self) -> "PermutationSpec":
        inv = [0] * len(self)
        for k, image in enumerate(self.mapping):
            inv[image] = k
        return PermutationSpec(tuple(inv))


def permutation_operator(pi: PermutationSpec, coin: str, occ: OccVec, space: FockSpace) -> sp.csr_matrix:
    """Matriz de P_π sobre as cópias de `coin` no bloco `occ`; identidade nos demais fatores."""
    space.check(occ)
    if len(pi) != occ[coin]:
        raise SpaceMismatchError(f"permutação de {len(pi)} elementos para {occ[coin]} cópias de '{coin}'")
    index_map = permuted_index_map(space.dims(occ), tuple(space.coin_axes(occ, coin)), pi.mapping)
    return permutation_matrix(index_map)
