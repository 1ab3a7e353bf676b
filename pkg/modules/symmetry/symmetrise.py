"""
Simetrizadores de estados S± e o funcional de simetrização 𝕊 sobre operadores.

𝕊 é a média exata das conjugações por todas as famílias de permutações das cópias
de cada moeda, calculada pela recursão sobre classes laterais
Avg_{S_k}(X) = (1/k) Σ_j τ_{j,k−1} Avg_{S_{k−1}}(X) τ_{j,k−1}.
"""

from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from config.settings import SETTINGS
from modules.fock.operator import DEFAULT_TOL, FockOperator
from modules.fock.space import FockSpace, OccVec
from modules.fock.tensor import chop, conjugate, embed, max_abs, permuted_index_map
from modules.symmetry.permutations import PermutationSpec
from modules.utils.errors import FactorialBudgetError, SpaceMismatchError, StatisticsError
from modules.utils.logger import setup_logger

logger = setup_logger("symmetrise")

BOSON = "boson"
FERMION = "fermion"
STATISTICS = (BOSON, FERMION)


def check_statistics(statistics: str) -> str:
    if statistics not in STATISTICS:
        raise StatisticsError(f"Estatística inválida: {statistics} (use {' ou '.join(STATISTICS)})")
    return statistics


# ----------------------------------------------------------------- estados
@lru_cache(maxsize=256)
def state_projector(n: int, d: int, statistics: str) -> sp.csr_matrix:
    """
    S_v = (1/n!) Σ_π v^π P_π sobre (C^d)^{⊗n}.

    Cada cadeia de dígitos s pertence a uma classe de multiconjunto; para bósons a
    entrada de S₊x em s é a média de x na classe de s. Para férmions, cadeias com
    dígito repetido dão 0 e as demais recebem sinal(s)·média de sinal(t)·x[t].
    """
    check_statistics(statistics)
    total = d ** n
    if n == 0:
        return sp.identity(1, dtype=np.complex128, format="csr")
    digits = np.stack(np.unravel_index(np.arange(total), (d,) * n), axis=1)
    keys = np.sort(digits, axis=1)
    _, classes = np.unique(keys, axis=0, return_inverse=True)
    classes = np.asarray(classes).ravel()
    n_classes = int(classes.max()) + 1
    sizes = np.bincount(classes, minlength=n_classes).astype(float)

    if statistics == BOSON:
        signs = np.ones(total)
    else:
        inversions = np.zeros(total, dtype=np.int64)
        for i in range(n):
            for j in range(i + 1, n):
                inversions += digits[:, i] > digits[:, j]
        signs = np.where(inversions % 2, -1.0, 1.0)
        repeated = np.array([len(set(row)) < n for row in digits])
        signs[repeated] = 0.0

    members = sp.csr_matrix((np.ones(total), (np.arange(total), classes)), shape=(total, n_classes))
    weights = sp.diags(1.0 / sizes)
    sign_diag = sp.diags(signs)
    return sp.csr_matrix(sign_diag @ members @ weights @ members.T @ sign_diag, dtype=np.complex128)


def symmetric_projection(vec: np.ndarray, dims: Sequence[int], axes: Sequence[int],
                         statistics: str) -> np.ndarray:
    """Aplica S_v aos fatores `axes` (todos da mesma dimensão) de um vetor sobre `dims`."""
    axes = list(axes)
    if len(axes) <= 1:
        return np.asarray(vec, dtype=np.complex128)
    d = dims[axes[0]]
    if any(dims[a] != d for a in axes):
        raise SpaceMismatchError("S_v exige fatores de mesma dimensão")
    projector = state_projector(len(axes), d, statistics)
    return np.asarray(embed(projector, axes, dims) @ np.asarray(vec, dtype=np.complex128)).ravel()


def symmetrise_state_vector(factors: Sequence[np.ndarray], statistics: str) -> np.ndarray:
    """S_v(ψ_1 ⊗ … ⊗ ψ_n) para vetores de um mesmo espaço de moeda."""
    factors = [np.asarray(f, dtype=np.complex128).ravel() for f in factors]
    if not factors:
        return np.ones(1, dtype=np.complex128)
    product = factors[0]
    for f in factors[1:]:
        product = np.kron(product, f)
    dims = [len(f) for f in factors]
    return symmetric_projection(product, dims, range(len(factors)), statistics)


# ----------------------------------------------------------------- operadores
def _check_budget(occ: OccVec, cap: int) -> None:
    over = {c: n for c, n in zip(occ.coins, occ.counts) if n > cap}
    if over:
        raise FactorialBudgetError(f"simetrização exata limitada a {cap} cópias por moeda; recebido {over}")


def _average_coin(block: sp.csr_matrix, dims, axes) -> sp.csr_matrix:
    dims = tuple(dims)
    axes = tuple(axes)
    current = block
    for k in range(2, len(axes) + 1):
        acc = current
        for j in range(k - 1):
            swap = PermutationSpec.transposition(len(axes), j, k - 1)
            acc = acc + conjugate(current, permuted_index_map(dims, axes, swap.mapping))
        current = acc / k
    return current


def symmetrise_block(block: sp.spmatrix, occ: OccVec, space: FockSpace,
                     cap: Optional[int] = None) -> sp.csr_matrix:
    """Π_c (1/n_c!) Σ_{π_c} (Π P_{π_c}) b (Π P_{π_c})⁻¹."""
    cap = SETTINGS["symmetrise_cap"] if cap is None else cap
    _check_budget(occ, cap)
    result = sp.csr_matrix(block, dtype=np.complex128)
    dims = space.dims(occ)
    for coin in space.coin_names:
        if occ[coin] >= 2:
            result = _average_coin(result, dims, space.coin_axes(occ, coin))
    return chop(result)


def symmetrise_operator(a: FockOperator, cap: Optional[int] = None) -> FockOperator:
    """𝕊(𝐀) = Σ_n̄ 𝕊(𝐀(n̄))."""
    return FockOperator(a.space, {occ: symmetrise_block(block, occ, a.space, cap)
                                  for occ, block in a.blocks.items()})


def is_symmetric(a: FockOperator, tol: float = DEFAULT_TOL) -> bool:
    """Comutação de cada bloco com as transposições adjacentes das cópias de cada moeda."""
    for occ, block in a.blocks.items():
        dims = a.space.dims(occ)
        for coin in a.space.coin_names:
            axes = tuple(a.space.coin_axes(occ, coin))
            for j in range(len(axes) - 1):
                swap = PermutationSpec.transposition(len(axes), j, j + 1)
                if max_abs(conjugate(block, permuted_index_map(dims, axes, swap.mapping)) - block) > tol:
                    logger.debug(f"Bloco {occ} não comuta com a troca ({j},{j + 1}) em '{coin}'")
                    return False
    return True


def one_body_observable(a_single, coin: str, space: FockSpace) -> FockOperator:
    """𝐀(n) = Σ_j A_j^{(n)}: A na cópia j, identidade nos demais fatores; nulo em n_c = 0."""
    a_single = np.asarray(a_single, dtype=np.complex128)
    if a_single.ndim != 2 or a_single.shape[0] != a_single.shape[1]:
        raise SpaceMismatchError(f"observável de um corpo precisa ser quadrado (forma {a_single.shape})")
    if a_single.shape[0] != space.coin(coin).dimension:
        raise SpaceMismatchError(f"observável de dimensão {a_single.shape[0]} para a moeda '{coin}'")
    if not np.allclose(a_single, a_single.conj().T):
        logger.warning(f"Observável sobre '{coin}' não é hermitiano")
    blocks = {}
    for occ in space.occupations:
        axes = space.coin_axes(occ, coin)
        if not axes:
            continue
        dims = space.dims(occ)
        acc = embed(a_single, [axes[0]], dims)
        for axis in axes[1:]:
            acc = acc + embed(a_single, [axis], dims)
        blocks[occ] = acc
    return FockOperator(space, blocks)
