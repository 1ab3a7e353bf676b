"""Operações de índice sobre produtos tensoriais: embutir operadores em fatores escolhidos."""

from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
import scipy.sparse as sp

CHOP = 1e-14


@lru_cache(maxsize=8192)
def _inverse_axis_permutation(dims: Tuple[int, ...], order: Tuple[int, ...]) -> np.ndarray:
    """Para cada índice na ordem `order`, o índice correspondente na ordem natural."""
    total = int(np.prod(dims)) if dims else 1
    ordered_dims = [dims[a] for a in order]
    natural_to_ordered = np.arange(total).reshape(ordered_dims).transpose(np.argsort(order)).ravel()
    inverse = np.empty(total, dtype=np.int64)
    inverse[natural_to_ordered] = np.arange(total)
    return inverse


def embed(op, targets: Sequence[int], dims: Sequence[int]) -> sp.csr_matrix:
    """
    Embute `op`, que age sobre os fatores `targets` (nessa ordem), no espaço com
    fatores de dimensões `dims`; os demais fatores recebem a identidade.
    """
    dims = tuple(int(d) for d in dims)
    targets = tuple(int(t) for t in targets)
    rest = tuple(a for a in range(len(dims)) if a not in targets)
    order = targets + rest
    rest_dim = int(np.prod([dims[a] for a in rest])) if rest else 1
    op = sp.csr_matrix(op, dtype=np.complex128)
    target_dim = int(np.prod([dims[a] for a in targets])) if targets else 1
    if op.shape != (target_dim, target_dim):
        raise ValueError(f"operador {op.shape} incompatível com fatores de dimensão {target_dim}")
    big = sp.kron(op, sp.identity(rest_dim, dtype=np.complex128, format="csr"), format="coo")
    if order == tuple(range(len(dims))):
        return big.tocsr()
    inverse = _inverse_axis_permutation(dims, order)
    total = big.shape[0]
    return sp.csr_matrix((big.data, (inverse[big.row], inverse[big.col])), shape=(total, total))


@lru_cache(maxsize=8192)
def permuted_index_map(dims: Tuple[int, ...], axes: Tuple[int, ...], mapping: Tuple[int, ...]) -> np.ndarray:
    """
    Índice de saída y(x) do operador de permutação sobre os fatores `axes`:
    o fator de saída axes[k] recebe o fator de entrada axes[mapping[k]].
    """
    total = int(np.prod(dims)) if dims else 1
    digits = list(np.unravel_index(np.arange(total), dims)) if dims else []
    new_digits = list(digits)
    for k, axis in enumerate(axes):
        new_digits[axis] = digits[axes[mapping[k]]]
    if not dims:
        return np.zeros(1, dtype=np.int64)
    return np.ravel_multi_index(new_digits, dims)


def permutation_matrix(index_map: np.ndarray) -> sp.csr_matrix:
    n = len(index_map)
    return sp.csr_matrix((np.ones(n, dtype=np.complex128), (index_map, np.arange(n))), shape=(n, n))


def conjugate(block: sp.spmatrix, index_map: np.ndarray) -> sp.csr_matrix:
    """P A P⁻¹ para a permutação de base x → index_map[x]."""
    coo = sp.coo_matrix(block)
    return sp.csr_matrix((coo.data, (index_map[coo.row], index_map[coo.col])), shape=coo.shape)


def chop(block: sp.spmatrix, tol: float = CHOP) -> sp.csr_matrix:
    """Remove entradas com módulo ≤ tol (resíduos de cancelamento)."""
    block = sp.csr_matrix(block, dtype=np.complex128)
    block.data[np.abs(block.data) <= tol] = 0
    block.eliminate_zeros()
    return block


def max_abs(block: sp.spmatrix) -> float:
    block = sp.csr_matrix(block)
    return float(np.abs(block.data).max()) if block.nnz else 0.0
