"""
Operadores sobre o espaço de Fock livre truncado: famílias de blocos esparsos
indexadas por ocupação.

Duas leituras de uma mesma família convivem no motor:

- forma cumulativa (cilíndrica): o bloco em n̄ é o operador com n̄ cópias presentes;
  cópias não usadas recebem identidade à direita do grupo de cada moeda. Produto,
  composição guardada e a iteração de Kleene operam nesta forma;
- forma exata: o bloco em n̄ reúne os caminhos que usam exatamente n̄ cópias. É a
  forma das semânticas em fecho, da ordem plana e da semântica do sistema principal.

A passagem entre as duas é uma inversão de Möbius sobre subconjuntos de moedas.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
import scipy.sparse as sp

from modules.fock.space import FockSpace, OccVec
from modules.fock.tensor import chop, embed, max_abs
from modules.utils.errors import NotAChainError, SpaceMismatchError
from modules.utils.logger import setup_logger

logger = setup_logger("fock_operator")

DEFAULT_TOL = 1e-12


@dataclass
class TruncationReport:
    """Blocos empurrados para além do truncamento por funcionais de criação."""

    dropped: List[Tuple[str, OccVec]] = field(default_factory=list)

    def record(self, coin: str, occ: OccVec) -> None:
        self.dropped.append((coin, occ))

    @property
    def count(self) -> int:
        return len(self.dropped)


@dataclass
class FockOperator:
    space: FockSpace
    blocks: Dict[OccVec, sp.csr_matrix] = field(default_factory=dict)

    def __post_init__(self):
        for occ, block in list(self.blocks.items()):
            self.space.check(occ)
            dim = self.space.block_dim(occ)
            if block.shape != (dim, dim):
                raise SpaceMismatchError(f"bloco em {occ} com forma {block.shape}, esperado {(dim, dim)}")
            block = sp.csr_matrix(block, dtype=np.complex128)
            block.eliminate_zeros()
            if block.nnz:
                self.blocks[occ] = block
            else:
                del self.blocks[occ]

    def block_at(self, occ: OccVec) -> sp.csr_matrix:
        self.space.check(occ)
        block = self.blocks.get(occ)
        if block is None:
            dim = self.space.block_dim(occ)
            return sp.csr_matrix((dim, dim), dtype=np.complex128)
        return block

    def support(self, tol: float = DEFAULT_TOL) -> Set[OccVec]:
        return {occ for occ, block in self.blocks.items() if max_abs(block) > tol}

    def sorted_blocks(self) -> List[Tuple[OccVec, sp.csr_matrix]]:
        return sorted(self.blocks.items(), key=lambda item: item[0].counts)

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return not self.support(tol)

    def equals(self, other: "FockOperator", tol: float = DEFAULT_TOL,
               occupations: Optional[Iterable[OccVec]] = None) -> bool:
        self.space.require_same(other.space)
        occs = self.space.occupations if occupations is None else occupations
        return all(max_abs(self.block_at(o) - other.block_at(o)) <= tol for o in occs)

    def restrict(self, occupations: Iterable[OccVec]) -> "FockOperator":
        keep = set(occupations)
        return FockOperator(self.space, {o: b for o, b in self.blocks.items() if o in keep})

    def scaled(self, factor: complex) -> "FockOperator":
        return FockOperator(self.space, {o: b * factor for o, b in self.blocks.items()})

    def __add__(self, other: "FockOperator") -> "FockOperator":
        self.space.require_same(other.space)
        blocks = dict(self.blocks)
        for occ, block in other.blocks.items():
            blocks[occ] = blocks[occ] + block if occ in blocks else block
        return FockOperator(self.space, blocks)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return self + other.scaled(-1.0)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return product(self, other)

    def to_json(self) -> List[dict]:
        """Blocos ordenados por ocupação; entradas em ordem de linha."""
        dump = []
        for occ, block in self.sorted_blocks():
            coo = block.tocoo()
            order = np.lexsort((coo.col, coo.row))
            entries = [[int(coo.row[k]), int(coo.col[k]), float(coo.data[k].real), float(coo.data[k].imag)]
                       for k in order if coo.data[k] != 0]
            dump.append({"occ": occ.as_dict(), "dim": int(block.shape[0]), "entries": entries})
        return dump


# ----------------------------------------------------------------- construtores
def zero_operator(space: FockSpace) -> FockOperator:
    return FockOperator(space, {})


def identity_operator(space: FockSpace) -> FockOperator:
    return FockOperator(space, {occ: sp.identity(space.block_dim(occ), dtype=np.complex128, format="csr")
                                for occ in space.occupations})


def block_at(a: FockOperator, occ: OccVec) -> sp.csr_matrix:
    return a.block_at(occ)


def product(a: FockOperator, b: FockOperator) -> FockOperator:
    """(A·B)(n̄) = A(n̄)·B(n̄)."""
    a.space.require_same(b.space)
    blocks = {occ: a.blocks[occ] @ b.blocks[occ] for occ in a.blocks if occ in b.blocks}
    return FockOperator(a.space, blocks)


# ----------------------------------------------------------------- funcionais de criação
def _slot0_targets(space: FockSpace, occ: OccVec, coin: str) -> List[int]:
    slot0 = space.coin_axis(occ, coin, 0)
    return [slot0] + [a for a in range(len(space.dims(occ))) if a != slot0]


def creation_functional(coin: str, a: FockOperator,
                        report: Optional[TruncationReport] = None) -> FockOperator:
    """𝕂_c: bloco em m̄ (m_c ≥ 1) é I_c ⊗ A(m̄ − e_c), com a identidade na cópia 0."""
    space = a.space
    d_c = space.coin(coin).dimension
    blocks = {}
    for occ, block in a.blocks.items():
        target = occ.plus(coin)
        if not space.contains(target):
            if report is not None:
                report.record(coin, occ)
            continue
        blocks[target] = embed(sp.kron(sp.identity(d_c, format="csr"), block), _slot0_targets(space, target, coin),
                               space.dims(target))
    return FockOperator(space, blocks)


def creation_functional_all(coins: Iterable[str], a: FockOperator,
                            report: Optional[TruncationReport] = None) -> FockOperator:
    """𝕂_C = 𝕂_{c1} ∘ … ∘ 𝕂_{ck}, na ordem global das moedas; C vazio é a identidade."""
    selected = [c for c in a.space.coin_names if c in set(coins)]
    result = a
    for coin in reversed(selected):
        result = creation_functional(coin, result, report)
    return result


def guarded_composition(coin: str, basis: Sequence[str], parts: Sequence[Optional[FockOperator]],
                        space: Optional[FockSpace] = None) -> FockOperator:
    """
    □(c, |i⟩ → A_i): bloco em m̄ com m_c ≥ 1 é Σ_i |i⟩⟨i| ⊗ A_i(m̄ − e_c), com |i⟩⟨i|
    na cópia 0 de c; blocos com m_c = 0 são nulos.
    """
    present = [p for p in parts if p is not None]
    space = space or (present[0].space if present else None)
    if space is None:
        raise SpaceMismatchError("composição guardada sem espaço de referência")
    for part in present:
        space.require_same(part.space)
    coin_space = space.coin(coin)
    if tuple(basis) != coin_space.labels:
        raise SpaceMismatchError(f"base {list(basis)} não coincide com a base de '{coin}' {list(coin_space.labels)}")
    if len(parts) != coin_space.dimension:
        raise SpaceMismatchError(f"'{coin}' tem {coin_space.dimension} rótulos, recebidas {len(parts)} partes")

    d_c = coin_space.dimension
    blocks = {}
    for occ in space.occupations:
        if occ[coin] == 0:
            continue
        inner = occ.plus(coin, -1)
        acc = None
        for i, part in enumerate(parts):
            if part is None or inner not in part.blocks:
                continue
            proj = sp.csr_matrix(([1.0], ([i], [i])), shape=(d_c, d_c), dtype=np.complex128)
            term = sp.kron(proj, part.blocks[inner], format="csr")
            acc = term if acc is None else acc + term
        if acc is not None:
            blocks[occ] = embed(acc, _slot0_targets(space, occ, coin), space.dims(occ))
    return FockOperator(space, blocks)


# ----------------------------------------------------------------- ordem plana
def below_closure(space: FockSpace, occupations: Iterable[OccVec]) -> Set[OccVec]:
    return space.below_closure(occupations)


def flat_leq(a: FockOperator, b: FockOperator, tol: float = DEFAULT_TOL) -> bool:
    """A ⊑ B sse A e B coincidem no fecho inferior do suporte de A."""
    a.space.require_same(b.space)
    witness = below_closure(a.space, a.support(tol))
    return all(max_abs(a.block_at(o) - b.block_at(o)) <= tol for o in witness)


def lub_chain(chain: Sequence[FockOperator], tol: float = DEFAULT_TOL) -> FockOperator:
    """Supremo de uma cadeia finita na ordem plana."""
    if not chain:
        raise NotAChainError("cadeia vazia")
    space = chain[0].space
    for prev, nxt in zip(chain, chain[1:]):
        if not flat_leq(prev, nxt, tol):
            raise NotAChainError("a sequência de operadores não é crescente na ordem plana")
    closures = [below_closure(space, a.support(tol)) for a in chain]
    blocks = {}
    for occ in space.occupations:
        for a, closure in zip(chain, closures):
            if occ in closure:
                if occ in a.blocks:
                    blocks[occ] = a.blocks[occ]
                break
    return FockOperator(space, blocks)


# ----------------------------------------------------------------- extensões
def _pad_right(block: sp.spmatrix, space: FockSpace, small: OccVec, big: OccVec) -> sp.csr_matrix:
    """Completa com identidades nas cópias de maior índice (big ≥ small)."""
    targets = []
    for coin in space.coin_names:
        targets.extend(space.coin_axes(big, coin)[:small[coin]])
    targets.extend(range(big.total, big.total + len(space.principals)))
    return embed(block, targets, space.dims(big))


def cylindrical_extension(m, base: OccVec, space: FockSpace) -> FockOperator:
    """Bloco em base + k̄ é m com identidades nas k̄ cópias à direita; nulo fora de ↑base."""
    space.check(base)
    m = sp.csr_matrix(m, dtype=np.complex128)
    dim = space.block_dim(base)
    if m.shape != (dim, dim):
        raise SpaceMismatchError(f"matriz {m.shape} incompatível com a ocupação-base {base} (dimensão {dim})")
    return FockOperator(space, {occ: _pad_right(m, space, base, occ)
                                for occ in space.occupations if base <= occ})


def lift_evolution(u, coin: str, space: FockSpace) -> FockOperator:
    """𝐔(n) = U^{⊗n} nas cópias de c, identidade nos demais fatores; nulo em n_c = 0."""
    u = sp.csr_matrix(u, dtype=np.complex128)
    d_c = space.coin(coin).dimension
    if u.shape != (d_c, d_c):
        raise SpaceMismatchError(f"evolução {u.shape} incompatível com a moeda '{coin}' de dimensão {d_c}")
    blocks = {}
    for occ in space.occupations:
        n = occ[coin]
        if n == 0:
            continue
        tensor_power = u
        for _ in range(n - 1):
            tensor_power = sp.kron(tensor_power, u, format="csr")
        blocks[occ] = embed(tensor_power, space.coin_axes(occ, coin), space.dims(occ))
    return FockOperator(space, blocks)


# ----------------------------------------------------------------- forma exata × cumulativa
def _nonempty_subsets(coins: Sequence[str]):
    for size in range(1, len(coins) + 1):
        yield from combinations(coins, size)


def _shrink(occ: OccVec, subset: Sequence[str]) -> OccVec:
    for coin in subset:
        occ = occ.plus(coin, -1)
    return occ


def exact_form(a: FockOperator) -> FockOperator:
    """Forma exata: E(n̄) = Σ_S (−1)^{|S|} pad_S(A(n̄ − e_S))."""
    space = a.space
    blocks = {}
    for occ in space.occupations:
        acc = a.block_at(occ)
        active = [c for c in space.coin_names if occ[c] >= 1]
        for subset in _nonempty_subsets(active):
            small = _shrink(occ, subset)
            if small in a.blocks:
                sign = -1.0 if len(subset) % 2 else 1.0
                acc = acc + sign * _pad_right(a.blocks[small], space, small, occ)
        blocks[occ] = chop(acc)
    return FockOperator(space, blocks)


def cumulative_form(e: FockOperator) -> FockOperator:
    """Inversa de exact_form: A(n̄) = Σ_{k̄ ≤ n̄} pad(E(k̄))."""
    space = e.space
    blocks: Dict[OccVec, sp.csr_matrix] = {}
    for occ in sorted(space.occupations, key=lambda o: (o.total, o.counts)):
        acc = e.block_at(occ)
        active = [c for c in space.coin_names if occ[c] >= 1]
        for subset in _nonempty_subsets(active):
            small = _shrink(occ, subset)
            if small in blocks:
                sign = -1.0 if len(subset) % 2 else 1.0
                acc = acc - sign * _pad_right(blocks[small], space, small, occ)
        blocks[occ] = chop(acc)
    return FockOperator(space, blocks)


def possibly_truncated(a: FockOperator) -> List[OccVec]:
    return [occ for occ, _ in a.sorted_blocks() if a.space.on_top_shell(occ)]
