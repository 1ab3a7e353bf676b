"""
Árvore sintática abstrata dos esquemas de programas quânticos recursivos.

Os nós são dataclasses congeladas: imutáveis, comparáveis por estrutura e
hasháveis. A posição no fonte não participa da igualdade.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, NamedTuple, Optional, Set, Tuple, Union


class SourcePos(NamedTuple):
    line: int
    column: int


def _pos():
    return field(default=None, compare=False, hash=False, repr=False)


@dataclass(frozen=True)
class SpaceSpec:
    """Espaço de uma variável: moeda (coin) ou sistema principal."""

    kind: str  # "coin" | "principal"
    name: str
    labels: Tuple[str, ...]
    ring: Optional[int] = None  # W para anéis de posições −W..W

    def __post_init__(self):
        if self.kind not in ("coin", "principal"):
            raise ValueError(f"Tipo de espaço inválido: {self.kind}")
        if not self.labels:
            raise ValueError(f"Espaço '{self.name}' sem rótulos de base")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"Rótulos repetidos no espaço '{self.name}'")

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"Rótulo '{label}' não pertence ao espaço '{self.name}'") from None

    @classmethod
    def coin(cls, name: str, labels) -> "SpaceSpec":
        return cls("coin", name, tuple(str(label) for label in labels))

    @classmethod
    def ring_system(cls, name: str, w: int) -> "SpaceSpec":
        if w < 1:
            raise ValueError(f"Anel '{name}' precisa de W ≥ 1 (recebido {w})")
        return cls("principal", name, tuple(str(x) for x in range(-w, w + 1)), ring=w)

    @classmethod
    def dim_system(cls, name: str, dim: int) -> "SpaceSpec":
        if dim < 1:
            raise ValueError(f"Sistema '{name}' precisa de dimensão ≥ 1")
        return cls("principal", name, tuple(str(x) for x in range(dim)))


@dataclass(frozen=True)
class CoinRef:
    coin: str
    copy: int = 0

    def shifted(self, k: int = 1) -> "CoinRef":
        return CoinRef(self.coin, self.copy + k)


@dataclass(frozen=True)
class Abort:
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Skip:
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Unitary:
    gate: str
    coins: Tuple[CoinRef, ...] = ()
    systems: Tuple[str, ...] = ()
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Seq:
    first: "ProgramScheme"
    second: "ProgramScheme"
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Qif:
    guard: CoinRef
    branches: Tuple[Tuple[str, "ProgramScheme"], ...]
    pos: Optional[SourcePos] = _pos()

    def branch_for(self, label: str) -> "ProgramScheme":
        """Ramo associado ao rótulo; rótulos omitidos valem abort."""
        for branch_label, body in self.branches:
            if branch_label == label:
                return body
        return Abort()


@dataclass(frozen=True)
class ProcCall:
    name: str
    pos: Optional[SourcePos] = _pos()


ProgramScheme = Union[Abort, Skip, Unitary, Seq, Qif, ProcCall]


@dataclass(frozen=True)
class Declaration:
    """Sistema de equações X_k ⇐ P_k mais o comando principal."""

    equations: Tuple[Tuple[str, ProgramScheme], ...]
    main: ProgramScheme

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.equations]

    @property
    def bodies(self) -> Dict[str, ProgramScheme]:
        return dict(self.equations)

    def body(self, name: str) -> ProgramScheme:
        for eq_name, body in self.equations:
            if eq_name == name:
                return body
        raise KeyError(f"Identificador de procedimento desconhecido: {name}")

    def declaration_coins(self) -> Set[str]:
        coins: Set[str] = set()
        for _, body in self.equations:
            coins |= free_coins(body)
        return coins


def walk(p: ProgramScheme) -> Iterator[ProgramScheme]:
    """Percorre a árvore em pré-ordem."""
    yield p
    if isinstance(p, Seq):
        yield from walk(p.first)
        yield from walk(p.second)
    elif isinstance(p, Qif):
        for _, body in p.branches:
            yield from walk(body)


def coin_refs(p: ProgramScheme) -> Iterator[CoinRef]:
    for node in walk(p):
        if isinstance(node, Unitary):
            yield from node.coins
        elif isinstance(node, Qif):
            yield node.guard


def free_coins(p: ProgramScheme) -> Set[str]:
    """Nomes-base das moedas que ocorrem em p, em qualquer cópia."""
    return {ref.coin for ref in coin_refs(p)}


def max_copies(p: ProgramScheme) -> Dict[str, int]:
    """Maior índice de cópia usado por moeda."""
    result: Dict[str, int] = {}
    for ref in coin_refs(p):
        result[ref.coin] = max(result.get(ref.coin, 0), ref.copy)
    return result


def has_identifiers(p: ProgramScheme) -> bool:
    return any(isinstance(node, ProcCall) for node in walk(p))


def seq_power(p: ProgramScheme, n: int) -> ProgramScheme:
    """P^n: composição sequencial aninhada à direita de n cópias de p."""
    if n < 1:
        raise ValueError(f"Potência sequencial exige n ≥ 1 (recebido {n})")
    result = p
    for _ in range(n - 1):
        result = Seq(p, result)
    return result


def desugar_choice(coin_program: ProgramScheme, guard: CoinRef,
                   branches: List[Tuple[str, ProgramScheme]]) -> ProgramScheme:
    """Escolha quântica: P; qif [c] (□ i · |i⟩ → P_i) fiq."""
    for node in walk(coin_program):
        if isinstance(node, Unitary) and node.systems:
            raise ValueError("O programa da moeda não pode agir sobre variáveis principais")
        if isinstance(node, (Unitary, Qif)) and any(ref.coin != guard.coin for ref in coin_refs(node)):
            raise ValueError(f"O programa da moeda só pode agir sobre a moeda '{guard.coin}'")
        if isinstance(node, ProcCall):
            raise ValueError("O programa da moeda não pode chamar procedimentos")
    return Seq(coin_program, Qif(guard, tuple(branches)))


def rename_coin(p: ProgramScheme, coin: str, from_copy: int, k: int = 1) -> ProgramScheme:
    """Desloca por k as cópias de `coin` com índice ≥ from_copy."""

    def ref(r: CoinRef) -> CoinRef:
        return r.shifted(k) if r.coin == coin and r.copy >= from_copy else r

    if isinstance(p, Unitary):
        return Unitary(p.gate, tuple(ref(r) for r in p.coins), p.systems, pos=p.pos)
    if isinstance(p, Seq):
        return Seq(rename_coin(p.first, coin, from_copy, k),
                   rename_coin(p.second, coin, from_copy, k), pos=p.pos)
    if isinstance(p, Qif):
        return Qif(ref(p.guard),
                   tuple((label, rename_coin(body, coin, from_copy, k)) for label, body in p.branches),
                   pos=p.pos)
    return p
