"""
Espaço de Fock livre truncado: vetores de ocupação e o layout tensorial dos blocos.

Layout de um bloco na ocupação n̄: moedas na ordem global de declaração; dentro de
cada moeda, cópias com índice crescente da esquerda para a direita (cópia 0 mais à
esquerda); os sistemas principais ficam à direita, na ordem de declaração.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

import numpy as np

from modules.lang.ast import SpaceSpec
from modules.utils.errors import SpaceMismatchError, TruncationError


@dataclass(frozen=True)
class OccVec:
    coins: Tuple[str, ...]
    counts: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coins) != len(self.counts):
            raise ValueError("OccVec com moedas e contagens de tamanhos diferentes")
        if any(n < 0 for n in self.counts):
            raise ValueError(f"Ocupação negativa: {self.counts}")

    def __getitem__(self, coin: str) -> int:
        return self.counts[self.coins.index(coin)]

    def __le__(self, other: "OccVec") -> bool:
        return all(a <= b for a, b in zip(self.counts, other.counts))

    @property
    def total(self) -> int:
        return sum(self.counts)

    def plus(self, coin: str, k: int = 1) -> "OccVec":
        counts = list(self.counts)
        counts[self.coins.index(coin)] += k
        return OccVec(self.coins, tuple(counts))

    def minus(self, other: "OccVec") -> "OccVec":
        return OccVec(self.coins, tuple(a - b for a, b in zip(self.counts, other.counts)))

    def as_dict(self) -> Dict[str, int]:
        return dict(zip(self.coins, self.counts))

    def __str__(self) -> str:
        return "{" + ",".join(f"{c}:{n}" for c, n in zip(self.coins, self.counts)) + "}"


@dataclass(frozen=True)
class FockSpace:
    """Moedas, sistemas principais e truncamento (limite por moeda e limite total)."""

    coins: Tuple[SpaceSpec, ...]
    principals: Tuple[SpaceSpec, ...]
    caps: Tuple[int, ...]
    max_total: Optional[int] = None

    def __post_init__(self):
        if len(self.caps) != len(self.coins):
            raise ValueError("um limite de ocupação por moeda é obrigatório")
        names = [s.name for s in self.coins] + [s.name for s in self.principals]
        if len(set(names)) != len(names):
            raise ValueError("moedas e sistemas principais precisam ter nomes distintos")

    @classmethod
    def build(cls, spaces: Iterable[SpaceSpec], trunc=8, max_total: Optional[int] = None,
              ring: Optional[int] = None) -> "FockSpace":
        """trunc: inteiro (todas as moedas) ou dicionário moeda → limite."""
        spaces = list(spaces)
        coins = tuple(s for s in spaces if s.kind == "coin")
        principals = tuple(SpaceSpec.ring_system(s.name, ring) if ring is not None and s.ring is not None else s
                           for s in spaces if s.kind == "principal")
        if isinstance(trunc, Mapping):
            caps = tuple(int(trunc.get(c.name, max(trunc.values(), default=0))) for c in coins)
        else:
            caps = tuple(int(trunc) for _ in coins)
        if max_total is None and caps:
            max_total = max(caps)
        return cls(coins, principals, caps, max_total)

    # ----------------------------------------------------------- ocupações
    @cached_property
    def coin_names(self) -> Tuple[str, ...]:
        return tuple(c.name for c in self.coins)

    def coin(self, name: str) -> SpaceSpec:
        for c in self.coins:
            if c.name == name:
                return c
        raise SpaceMismatchError(f"moeda não declarada: {name}")

    def cap(self, name: str) -> int:
        return self.caps[self.coin_names.index(name)]

    def occ(self, counts: Optional[Mapping[str, int]] = None, **kwargs) -> OccVec:
        merged = dict(counts or {}, **kwargs)
        unknown = set(merged) - set(self.coin_names)
        if unknown:
            raise SpaceMismatchError(f"moedas desconhecidas na ocupação: {sorted(unknown)}")
        return OccVec(self.coin_names, tuple(int(merged.get(c, 0)) for c in self.coin_names))

    @cached_property
    def vacuum(self) -> OccVec:
        return self.occ()

    def contains(self, occ: OccVec) -> bool:
        if occ.coins != self.coin_names:
            return False
        if any(n > cap for n, cap in zip(occ.counts, self.caps)):
            return False
        return self.max_total is None or occ.total <= self.max_total

    def check(self, occ: OccVec) -> None:
        if occ.coins != self.coin_names:
            raise SpaceMismatchError(f"ocupação {occ} não pertence a este espaço")
        if not self.contains(occ):
            raise TruncationError(f"ocupação {occ} excede o truncamento {self.caps} (total ≤ {self.max_total})")

    @cached_property
    def occupations(self) -> Tuple[OccVec, ...]:
        """Todas as ocupações dentro do truncamento, em ordem lexicográfica."""
        ranges = [range(cap + 1) for cap in self.caps]
        occs = [OccVec(self.coin_names, tuple(counts)) for counts in product(*ranges)]
        return tuple(o for o in occs if self.contains(o))

    def on_top_shell(self, occ: OccVec) -> bool:
        """Ocupações na casca máxima: possivelmente contaminadas pelo truncamento."""
        if any(n == cap for n, cap in zip(occ.counts, self.caps)):
            return True
        return self.max_total is not None and occ.total == self.max_total

    def below_closure(self, occs: Iterable[OccVec]) -> Set[OccVec]:
        occs = list(occs)
        return {o for o in self.occupations if any(o <= m for m in occs)}

    # ----------------------------------------------------------- layout
    @cached_property
    def principal_dim(self) -> int:
        return int(np.prod([s.dimension for s in self.principals])) if self.principals else 1

    def dims(self, occ: OccVec) -> Tuple[int, ...]:
        coin_dims = [c.dimension for c, n in zip(self.coins, occ.counts) for _ in range(n)]
        return tuple(coin_dims + [s.dimension for s in self.principals])

    def block_dim(self, occ: OccVec) -> int:
        return int(np.prod(self.dims(occ)))

    def coin_axis(self, occ: OccVec, coin: str, copy: int) -> int:
        k = self.coin_names.index(coin)
        if not 0 <= copy < occ.counts[k]:
            raise TruncationError(f"cópia {coin}_{copy} ausente na ocupação {occ}")
        return sum(occ.counts[:k]) + copy

    def coin_axes(self, occ: OccVec, coin: str) -> List[int]:
        k = self.coin_names.index(coin)
        start = sum(occ.counts[:k])
        return list(range(start, start + occ.counts[k]))

    def principal_axis(self, occ: OccVec, name: str) -> int:
        names = [s.name for s in self.principals]
        if name not in names:
            raise SpaceMismatchError(f"sistema principal não declarado: {name}")
        return occ.total + names.index(name)

    def principal_space(self, name: str) -> SpaceSpec:
        for s in self.principals:
            if s.name == name:
                return s
        raise SpaceMismatchError(f"sistema principal não declarado: {name}")

    def require_same(self, other: "FockSpace") -> None:
        if self != other:
            raise SpaceMismatchError("operadores definidos sobre espaços de Fock diferentes")
