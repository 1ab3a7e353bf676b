"""
Estados no espaço de Fock truncado e operadores de criação/aniquilação.

Componentes sem o sistema principal (estados só de moedas) têm dimensão
Π_c d_c^{n_c}; com o principal, o fator principal fica à direita.
"""

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from config.settings import SETTINGS
from modules.fock.operator import FockOperator
from modules.fock.space import FockSpace, OccVec
from modules.symmetry.symmetrise import BOSON, check_statistics, symmetric_projection
from modules.utils.errors import SpaceMismatchError, StatisticsError
from modules.utils.logger import setup_logger

logger = setup_logger("fock_state")

Statistics = Union[str, Mapping[str, str]]


def _statistics_map(space: FockSpace, statistics: Statistics) -> Dict[str, str]:
    if isinstance(statistics, str):
        return {c: check_statistics(statistics) for c in space.coin_names}
    stats = {c: check_statistics(statistics.get(c, BOSON)) for c in space.coin_names}
    return stats


@dataclass
class FockState:
    space: FockSpace
    components: Dict[OccVec, np.ndarray]
    statistics: Dict[str, str]
    with_principal: bool = False
    truncation_loss: float = 0.0

    def __post_init__(self):
        for occ, vec in list(self.components.items()):
            self.space.check(occ)
            vec = np.asarray(vec, dtype=np.complex128).ravel()
            if vec.shape[0] != self.dim(occ):
                raise SpaceMismatchError(f"componente em {occ} com dimensão {vec.shape[0]}, esperado {self.dim(occ)}")
            self.components[occ] = vec

    def dims(self, occ: OccVec) -> Tuple[int, ...]:
        dims = self.space.dims(occ)
        return dims if self.with_principal else dims[:occ.total]

    def dim(self, occ: OccVec) -> int:
        return int(np.prod(self.dims(occ))) if self.dims(occ) else 1

    def component(self, occ: OccVec) -> np.ndarray:
        vec = self.components.get(occ)
        return np.zeros(self.dim(occ), dtype=np.complex128) if vec is None else vec

    def norm_squared(self) -> float:
        return float(sum(np.vdot(v, v).real for v in self.components.values()))

    def inner(self, other: "FockState") -> complex:
        """⟨self|other⟩."""
        self.space.require_same(other.space)
        return complex(sum(np.vdot(v, other.components[o]) for o, v in self.components.items()
                           if o in other.components))

    def scaled(self, factor: complex) -> "FockState":
        return self._with({o: v * factor for o, v in self.components.items()})

    def __add__(self, other: "FockState") -> "FockState":
        self.space.require_same(other.space)
        components = dict(self.components)
        for occ, vec in other.components.items():
            components[occ] = components[occ] + vec if occ in components else vec
        return self._with(components, self.truncation_loss + other.truncation_loss)

    def _with(self, components, truncation_loss: Optional[float] = None) -> "FockState":
        loss = self.truncation_loss if truncation_loss is None else truncation_loss
        return FockState(self.space, components, dict(self.statistics), self.with_principal, loss)

    def is_symmetric(self, tol: float = 1e-10) -> bool:
        """Cada componente está na imagem de S_v para a estatística de cada moeda."""
        for occ, vec in self.components.items():
            for coin in self.space.coin_names:
                axes = self.space.coin_axes(occ, coin)
                projected = symmetric_projection(vec, self.dims(occ), axes, self.statistics[coin])
                if np.max(np.abs(projected - vec), initial=0.0) > tol:
                    return False
        return True


# ----------------------------------------------------------------- construtores
def vacuum(space: FockSpace, statistics: Statistics = BOSON) -> FockState:
    return FockState(space, {space.vacuum: np.ones(1, dtype=np.complex128)}, _statistics_map(space, statistics))


def basis_state(space: FockSpace, coin: str, labels: Sequence[str], statistics: Statistics = BOSON) -> FockState:
    """|l_1, …, l_n⟩_v normalizado: S_v(|l_1⟩ ⊗ … ⊗ |l_n⟩)/‖·‖."""
    stats = _statistics_map(space, statistics)
    coin_space = space.coin(coin)
    occ = space.occ({coin: len(labels)})
    space.check(occ)
    vec = np.ones(1, dtype=np.complex128)
    for label in labels:
        e = np.zeros(coin_space.dimension, dtype=np.complex128)
        e[coin_space.index_of(label)] = 1.0
        vec = np.kron(vec, e)
    vec = symmetric_projection(vec, space.dims(occ)[:occ.total], space.coin_axes(occ, coin), stats[coin])
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise StatisticsError(f"estado {list(labels)} é nulo para {stats[coin]}s (exclusão de Pauli)")
    return FockState(space, {occ: vec / norm}, stats)


def tensor_principal(s: FockState, phi) -> FockState:
    """Ψ ⊗ φ: acrescenta o fator principal a um estado só de moedas."""
    if s.with_principal:
        raise SpaceMismatchError("o estado já inclui o sistema principal")
    phi = np.asarray(phi, dtype=np.complex128).ravel()
    if phi.shape[0] != s.space.principal_dim:
        raise SpaceMismatchError(f"vetor principal de dimensão {phi.shape[0]}, esperado {s.space.principal_dim}")
    return FockState(s.space, {o: np.kron(v, phi) for o, v in s.components.items()},
                     dict(s.statistics), True, s.truncation_loss)


def principal_basis_vector(space: FockSpace, label: str, system: Optional[str] = None) -> np.ndarray:
    """|label⟩ no sistema principal (os demais sistemas principais no primeiro rótulo)."""
    if not space.principals:
        raise SpaceMismatchError("não há sistema principal declarado")
    target = system or space.principals[0].name
    vec = np.ones(1, dtype=np.complex128)
    for spec in space.principals:
        e = np.zeros(spec.dimension, dtype=np.complex128)
        e[spec.index_of(label) if spec.name == target else 0] = 1.0
        vec = np.kron(vec, e)
    return vec


def apply_operator(a: FockOperator, s: FockState) -> FockState:
    """𝐀 Σ|Ψ(n̄)⟩ = Σ 𝐀(n̄)|Ψ(n̄)⟩."""
    a.space.require_same(s.space)
    if not s.with_principal:
        raise SpaceMismatchError("aplicar um operador exige o fator principal no estado")
    components = {occ: a.blocks[occ] @ vec for occ, vec in s.components.items() if occ in a.blocks}
    return s._with(components)


# ----------------------------------------------------------------- segunda quantização
def _check_single(psi, space: FockSpace, coin: str) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    if psi.shape[0] != space.coin(coin).dimension:
        raise SpaceMismatchError(f"vetor de partícula de dimensão {psi.shape[0]} para a moeda '{coin}'")
    return psi


def creation_op(psi, s: FockState, coin: str) -> FockState:
    """a†(ψ): componente n+1 = √(n+1)·S_v(ψ na cópia 0 ⊗ componente n); excedentes descartados."""
    psi = _check_single(psi, s.space, coin)
    components: Dict[OccVec, np.ndarray] = {}
    lost = 0.0
    for occ, vec in s.components.items():
        target = occ.plus(coin)
        pos = sum(occ.counts[:occ.coins.index(coin)])
        raised = np.moveaxis(np.multiply.outer(psi, vec.reshape(s.dims(occ))), 0, pos).ravel()
        dims = list(s.dims(occ))
        dims.insert(pos, len(psi))
        raised = np.sqrt(occ[coin] + 1) * symmetric_projection(raised, dims, range(pos, pos + occ[coin] + 1),
                                                               s.statistics[coin])
        if not s.space.contains(target):
            lost += float(np.vdot(raised, raised).real)
            continue
        components[target] = components[target] + raised if target in components else raised
    if lost:
        logger.warning(f"a†: peso {lost:.3e} descartado acima do truncamento de '{coin}'")
    return s._with(components, s.truncation_loss + lost)


def annihilation_op(psi, s: FockState, coin: str) -> FockState:
    """a(ψ): componente n = √(n+1)·(⟨ψ| contraído na cópia 0 da componente n+1); a(ψ)|0⟩ = 0."""
    psi = _check_single(psi, s.space, coin)
    components: Dict[OccVec, np.ndarray] = {}
    for occ, vec in s.components.items():
        if occ[coin] == 0:
            continue
        axis = s.space.coin_axes(occ, coin)[0]
        lowered = np.tensordot(psi.conj(), vec.reshape(s.dims(occ)), axes=([0], [axis])).ravel()
        lowered = np.sqrt(occ[coin]) * lowered
        target = occ.plus(coin, -1)
        components[target] = components[target] + lowered if target in components else lowered
    return s._with(components)


def coherent_state(psi, coin: str, space: FockSpace, cap: Optional[int] = None,
                   statistics: str = BOSON) -> FockState:
    """
    e^{−⟨ψ|ψ⟩/2} Σ_{n≤N} a†(ψ)^n/n! |vac⟩ para bósons. O peso da cauda,
    e^{−|ψ|²} Σ_{n>N} |ψ|^{2n}/n!, fica em `truncation_loss`.
    """
    if statistics != BOSON:
        raise StatisticsError("estados coerentes só existem para bósons")
    cap = SETTINGS["coherent_cap"] if cap is None else cap
    psi = _check_single(psi, space, coin)
    limit = space.cap(coin) if space.max_total is None else min(space.cap(coin), space.max_total)
    if cap > limit:
        logger.warning(f"Estado coerente em '{coin}': N = {cap} reduzido para {limit} pelo truncamento")
        cap = limit
    weight = float(np.vdot(psi, psi).real)

    state = vacuum(space, BOSON)
    term = state
    for n in range(1, cap + 1):
        term = creation_op(psi, term, coin).scaled(1.0 / n)
        state = state + term
    tail = float(special.gammainc(cap + 1, weight)) if weight > 0 else 0.0
    coherent = state.scaled(np.exp(-weight / 2))
    coherent.truncation_loss = tail
    logger.info(f"Estado coerente em '{coin}' com N = {cap}: peso da cauda {tail:.3e}")
    return coherent

