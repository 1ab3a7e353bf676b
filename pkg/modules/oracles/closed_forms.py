"""
Semânticas em forma fechada (forma exata) das caminhadas recursivas e do laço
quântico, usadas como oráculos do motor semântico.
"""

from collections import Counter
from math import comb, factorial
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from modules.fock.operator import FockOperator
from modules.fock.space import FockSpace, OccVec
from modules.fock.tensor import embed
from modules.lang.gates import GateLibrary
from modules.utils.errors import SpaceMismatchError
from modules.utils.logger import setup_logger

logger = setup_logger("closed_forms")

FAMILIES = ("unidirectional", "bidirectional", "symmetric", "loop")


# ----------------------------------------------------------------- auxiliares
def distinct_arrangements(word: Sequence[str]) -> Iterator[Tuple[str, ...]]:
    """Permutações distintas de um multiconjunto, em ordem lexicográfica dos rótulos."""
    counts = Counter(word)
    symbols = sorted(counts)
    n = len(word)

    def build(prefix: List[str]):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for s in symbols:
            if counts[s]:
                counts[s] -= 1
                prefix.append(s)
                yield from build(prefix)
                prefix.pop()
                counts[s] += 1

    yield from build([])


def arrangement_count(word: Sequence[str]) -> int:
    total = factorial(len(word))
    for k in Counter(word).values():
        total //= factorial(k)
    return total


def _projector(space: FockSpace, coin: str, word: Sequence[str]) -> sp.csr_matrix:
    labels = space.coin(coin).labels
    d = len(labels)
    index = 0
    for label in word:
        index = index * d + labels.index(label)
    size = d ** len(word)
    return sp.csr_matrix(([1.0], ([index], [index])), shape=(size, size), dtype=np.complex128)


def _averaged_projector(space: FockSpace, coin: str, word: Sequence[str]) -> sp.csr_matrix:
    arrangements = list(distinct_arrangements(word))
    acc = _projector(space, coin, arrangements[0])
    for arrangement in arrangements[1:]:
        acc = acc + _projector(space, coin, arrangement)
    return acc / len(arrangements)


def _tensor_power(m, n: int) -> sp.csr_matrix:
    m = sp.csr_matrix(m, dtype=np.complex128)
    result = sp.identity(1, dtype=np.complex128, format="csr")
    for _ in range(n):
        result = sp.kron(result, m, format="csr")
    return result


def _coin_block(space: FockSpace, occ: OccVec, coin: str, coin_mat, principal_mat, system: str) -> sp.csr_matrix:
    """coin_mat nas cópias de `coin` e principal_mat no sistema `system`."""
    targets = space.coin_axes(occ, coin) + [space.principal_axis(occ, system)]
    return embed(sp.kron(coin_mat, principal_mat, format="csr"), targets, space.dims(occ))


def _single_coin_occupations(space: FockSpace, coin: str, n_max: int) -> List[Tuple[int, OccVec]]:
    out = []
    for n in range(1, n_max + 1):
        occ = space.occ({coin: n})
        if space.contains(occ):
            out.append((n, occ))
    return out


def walk_gates(gates: GateLibrary, coin_gate: str = "H", left: str = "TL", right: str = "TR"):
    """Matrizes (moeda, T_L, T_R) de uma caminhada declarada com os nomes usuais."""
    missing = [g for g in (coin_gate, left, right) if g not in gates]
    if missing:
        raise SpaceMismatchError(f"portas ausentes para a forma fechada: {missing}")
    return gates.matrix(coin_gate), gates.matrix(left), gates.matrix(right)


# ----------------------------------------------------------------- caminhada unidirecional
def unidirectional_path(i: int) -> Tuple[str, ...]:
    return ("R",) * i + ("L",)


def unidirectional_closed_form(space: FockSpace, n: Optional[int], h, t_left, t_right,
                               coin: str = "d", system: str = "p", symmetric: bool = False) -> FockOperator:
    """
    Σ_{i<n} (ρ_{R^i L} 𝐇^{⊗(i+1)}) ⊗ T_L T_R^i, com blocos em {d:i+1}.
    `symmetric=True` troca ρ pela média G_i dos projetores com um único L.
    """
    n = space.cap(coin) if n is None else n
    blocks = {}
    for size, occ in _single_coin_occupations(space, coin, n):
        word = unidirectional_path(size - 1)
        proj = _averaged_projector(space, coin, word) if symmetric else _projector(space, coin, word)
        translation = np.asarray(t_left) @ np.linalg.matrix_power(np.asarray(t_right), size - 1)
        blocks[occ] = _coin_block(space, occ, coin, proj @ _tensor_power(h, size), translation, system)
    return FockOperator(space, blocks)


# ----------------------------------------------------------------- caminhada bidirecional
def bidirectional_path(n: int, dual: bool = False) -> Tuple[str, ...]:
    """Σ_n = (RL)^k L para n = 2k+1 e (RL)^k RR para n = 2k+2; o dual troca L e R."""
    if n < 1:
        raise ValueError(f"caminho exige n ≥ 1 (recebido {n})")
    k = (n - 1) // 2
    word = ("R", "L") * k + (("L",) if n % 2 else ("R", "R"))
    if dual:
        word = tuple("L" if s == "R" else "R" for s in word)
    return word


def bidirectional_closed_form(space: FockSpace, h, t_left, t_right, coin: str = "d", system: str = "p",
                              symmetric: bool = False) -> Tuple[FockOperator, FockOperator]:
    """
    (⟦X⟧, ⟦Y⟧) da caminhada bidirecional com equações mutuamente recursivas:
    blocos ρ_{Σ_n} 𝐇^{⊗n} ⊗ T_n com T_n = T_L (n ímpar) ou T_R² (n par); Y é o dual.
    `symmetric=True` usa as médias γ_n/δ_n sobre os arranjos de Σ_n.
    """
    t_left, t_right = np.asarray(t_left), np.asarray(t_right)
    result = []
    for dual in (False, True):
        blocks = {}
        for n, occ in _single_coin_occupations(space, coin, space.cap(coin)):
            word = bidirectional_path(n, dual)
            proj = _averaged_projector(space, coin, word) if symmetric else _projector(space, coin, word)
            if n % 2:
                translation = t_right if dual else t_left
            else:
                translation = t_left @ t_left if dual else t_right @ t_right
            blocks[occ] = _coin_block(space, occ, coin, proj @ _tensor_power(h, n), translation, system)
        result.append(FockOperator(space, blocks))
    return result[0], result[1]


def symmetrised_closed_forms(space: FockSpace, h, t_left, t_right, coin: str = "d",
                             system: str = "p") -> Dict[str, FockOperator]:
    """Formas simetrizadas: G_i (unidirecional) e γ/δ (bidirecional, X e Y)."""
    x, y = bidirectional_closed_form(space, h, t_left, t_right, coin, system, symmetric=True)
    return {
        "unidirectional": unidirectional_closed_form(space, None, h, t_left, t_right, coin, system, symmetric=True),
        "bidirectional_x": x,
        "bidirectional_y": y,
    }


# ----------------------------------------------------------------- laço quântico
def loop_closed_form(space: FockSpace, w, u, coin: str = "c", system: str = "q") -> FockOperator:
    """
    Blocos em {c:k}: |0⟩⟨0|_{c_{k−1}} W_{k−1} · Π_{j=k−2..0} (U |1⟩⟨1|_{c_j} W_j),
    com W_j agindo em (c_j, q) e o primeiro fator aplicado sendo W_0.
    """
    w = sp.csr_matrix(np.asarray(w, dtype=np.complex128))
    u = np.asarray(u, dtype=np.complex128)
    d_c = space.coin(coin).dimension
    p0 = sp.csr_matrix(([1.0], ([0], [0])), shape=(d_c, d_c), dtype=np.complex128)
    p1 = sp.csr_matrix(([1.0], ([1], [1])), shape=(d_c, d_c), dtype=np.complex128)
    blocks = {}
    for k, occ in _single_coin_occupations(space, coin, space.cap(coin)):
        dims = space.dims(occ)
        q_axis = space.principal_axis(occ, system)
        axes = space.coin_axes(occ, coin)
        acc = sp.identity(space.block_dim(occ), dtype=np.complex128, format="csr")
        for j in range(k - 1):
            step = embed(u, [q_axis], dims) @ embed(p1, [axes[j]], dims) @ embed(w, [axes[j], q_axis], dims)
            acc = step @ acc
        acc = embed(p0, [axes[k - 1]], dims) @ embed(w, [axes[k - 1], q_axis], dims) @ acc
        blocks[occ] = acc
    return FockOperator(space, blocks)


def symmetrised_loop_closed_form(space: FockSpace, v, u, coin: str = "c", system: str = "q") -> FockOperator:
    """Para W = V ⊗ I: blocos 𝐀(k) V^{⊗k} ⊗ U^{k−1}, 𝐀(k) a média dos projetores com um único |0⟩."""
    labels = space.coin(coin).labels
    zero, one = labels[0], labels[1]
    u = np.asarray(u, dtype=np.complex128)
    blocks = {}
    for k, occ in _single_coin_occupations(space, coin, space.cap(coin)):
        proj = _averaged_projector(space, coin, (one,) * (k - 1) + (zero,))
        blocks[occ] = _coin_block(space, occ, coin, proj @ _tensor_power(v, k),
                                  np.linalg.matrix_power(u, k - 1), system)
    return FockOperator(space, blocks)


# ----------------------------------------------------------------- inicialização por bósons
def bosonic_trace_series(n: int) -> float:
    """Traço de ⟦X, |L^n⟩⟧(|0⟩) na caminhada bidirecional: 1/(2^n · m_n), m_n = arranjos de Σ_n."""
    return 1.0 / (2 ** n * arrangement_count(bidirectional_path(n)))


def published_bosonic_trace(n: int) -> float:
    return 1.0 / 2 ** n


def bosonic_position(n: int) -> str:
    return "-1" if n % 2 else "2"


def coherent_weight_series(cap: int) -> Dict[str, float]:
    """
    Pesos nas posições −1 e 2 para o estado coerente |L⟩_coh truncado em N = cap:
    e^{−1} Σ_n (1/n!) · bosonic_trace_series(n).
    """
    weights = {"-1": 0.0, "2": 0.0}
    for n in range(1, cap + 1):
        weights[bosonic_position(n)] += np.exp(-1.0) / factorial(n) * bosonic_trace_series(n)
    return {
        "-1": weights["-1"],
        "2": weights["2"],
        "ratio": weights["-1"] / weights["2"] if weights["2"] else float("inf"),
        "trace": weights["-1"] + weights["2"],
    }


def published_coherent_weights() -> Dict[str, float]:
    scale = 1.0 / np.sqrt(np.e)
    return {"-1": 2 * scale / 3, "2": scale / 3, "ratio": 2.0, "trace": scale}


def published_coherent_partial_sum(cap: int) -> float:
    """Soma parcial da série publicada: e^{−1/2} Σ_{n≤N} 2^{−n}."""
    return float(np.exp(-0.5) * sum(0.5 ** n for n in range(1, cap + 1)))


def binomial_prefactor(n: int) -> int:
    """C(2k+1, k) para n = 2k+1 e C(2k+2, k) para n = 2k+2."""
    k = (n - 1) // 2
    return comb(n, k)
