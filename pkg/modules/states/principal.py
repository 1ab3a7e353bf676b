"""
Semântica do sistema principal: aplica a semântica simetrizada a uma entrada
moedas ⊗ principal e toma o traço parcial sobre todas as moedas.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config.settings import SETTINGS
from modules.fock.operator import FockOperator
from modules.fock.space import FockSpace
from modules.lang.ast import Declaration
from modules.lang.gates import GateLibrary
from modules.semantics.config import SemanticsConfig
from modules.semantics.engine import SemanticsEngine
from modules.states.fock_state import (FockState, basis_state, coherent_state,
                                       principal_basis_vector, tensor_principal, vacuum)
from modules.symmetry.symmetrise import BOSON, symmetric_projection, symmetrise_block
from modules.utils.errors import FockrecError, SpaceMismatchError
from modules.utils.logger import setup_logger

logger = setup_logger("principal")

PSD_TOL = 1e-10


@dataclass
class PartialDensityOperator:
    matrix: np.ndarray
    labels: Tuple[str, ...]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def validate(self) -> None:
        """Positivo semidefinido com traço ≤ 1."""
        eigenvalues = np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)
        if eigenvalues.size and eigenvalues.min() < -PSD_TOL:
            raise FockrecError(f"operador de densidade com autovalor negativo {eigenvalues.min():.3e}")
        if self.trace > 1 + PSD_TOL:
            raise FockrecError(f"operador de densidade com traço {self.trace:.6f} > 1")

    def support(self, tol: float = PSD_TOL) -> List[str]:
        return [label for label, p in position_distribution(self).items() if p > tol]


def partial_trace_coins(s: FockState) -> PartialDensityOperator:
    """ρ = Σ_n̄ tr_moedas |Φ(n̄)⟩⟨Φ(n̄)|."""
    if not s.with_principal:
        raise SpaceMismatchError("traço parcial exige o fator principal no estado")
    dim_h = s.space.principal_dim
    rho = np.zeros((dim_h, dim_h), dtype=np.complex128)
    for occ, vec in s.components.items():
        m = vec.reshape(-1, dim_h)
        rho += m.T @ m.conj()
    return PartialDensityOperator(rho, principal_labels(s.space))


def principal_labels(space: FockSpace) -> Tuple[str, ...]:
    labels = [()]
    for spec in space.principals:
        labels = [prefix + (label,) for prefix in labels for label in spec.labels]
    return tuple(",".join(parts) for parts in labels)


def position_distribution(rho: PartialDensityOperator) -> Dict[str, float]:
    """Diagonal de ρ na base principal; soma igual ao traço."""
    diag = np.real(np.diag(rho.matrix))
    return {label: float(p) for label, p in zip(rho.labels, diag)}


def distribution_frame(rho: PartialDensityOperator, tol: float = 0.0) -> pd.DataFrame:
    rows = [{"position": label, "probability": p} for label, p in position_distribution(rho).items() if abs(p) > tol]
    return pd.DataFrame(rows, columns=["position", "probability"])


def distribution_json(rho: PartialDensityOperator, tol: float = PSD_TOL) -> Dict:
    return {"trace": rho.trace,
            "probs": {label: p for label, p in position_distribution(rho).items() if abs(p) > tol}}


def apply_symmetrised(a: FockOperator, s: FockState, cap: Optional[int] = None) -> FockState:
    """
    𝕊(𝐀)Ψ. Até o limite de cópias usa a simetrização exata dos blocos; acima dele
    usa S_v(𝐀Ψ), igual a 𝕊(𝐀)Ψ quando Ψ é simétrico (ou antissimétrico) em cada moeda.
    """
    cap = SETTINGS["symmetrise_cap"] if cap is None else cap
    components = {}
    for occ, vec in s.components.items():
        if occ not in a.blocks:
            continue
        if all(n <= cap for n in occ.counts):
            components[occ] = symmetrise_block(a.blocks[occ], occ, a.space, cap) @ vec
        else:
            out = a.blocks[occ] @ vec
            for coin in a.space.coin_names:
                out = symmetric_projection(out, s.dims(occ), a.space.coin_axes(occ, coin), s.statistics[coin])
            components[occ] = out
    return s._with(components)


def principal_semantics(d: Declaration, coin_init: FockState, psi, space: FockSpace, gates: GateLibrary,
                        cfg: Optional[SemanticsConfig] = None, cap: Optional[int] = None,
                        main: Optional[FockOperator] = None) -> PartialDensityOperator:
    """ρ = tr_moedas(𝕊(⟦main⟧)(Ψ_moedas ⊗ ψ))."""
    if main is None:
        main = SemanticsEngine(space, gates, cfg).kleene_fixpoint(d).main
    if not coin_init.is_symmetric():
        logger.warning("Inicialização das moedas fora da imagem de S_v: 𝕊(A)Ψ ≠ S_v(AΨ) acima do limite")
    state = tensor_principal(coin_init, psi)
    rho = partial_trace_coins(apply_symmetrised(main, state, cap))
    rho.validate()
    logger.info(f"📊 Semântica principal: traço {rho.trace:.6f}, suporte {rho.support()}")
    return rho


def parse_coin_init(spec: str, space: FockSpace, coin: Optional[str] = None,
                    statistics: str = BOSON, coherent_cap: Optional[int] = None) -> FockState:
    """
    Inicialização das moedas:
      basis:L,L,L   estado de base simetrizado (normalizado)
      coherent:L@12 estado coerente de |L⟩ truncado em N = 12
      vacuum        vácuo
    """
    coin = coin or (space.coin_names[0] if space.coin_names else None)
    kind, _, body = spec.partition(":")
    if kind == "vacuum" and not body:
        return vacuum(space, statistics)
    if coin is None:
        raise SpaceMismatchError("programa sem moedas declaradas")
    if kind == "basis" and body:
        return basis_state(space, coin, [label.strip() for label in body.split(",")], statistics)
    if kind == "coherent" and body:
        label, _, n = body.partition("@")
        coin_space = space.coin(coin)
        psi = np.zeros(coin_space.dimension, dtype=np.complex128)
        psi[coin_space.index_of(label.strip())] = 1.0
        cap = int(n) if n else coherent_cap
        return coherent_state(psi, coin, space, cap, statistics)
    raise ValueError(f"Inicialização de moedas inválida: '{spec}' (use basis:L,L | coherent:L@12 | vacuum)")


def run_principal(d: Declaration, space: FockSpace, gates: GateLibrary, coin_spec: str, input_label: str,
                  statistics: str = BOSON, cfg: Optional[SemanticsConfig] = None,
                  coin: Optional[str] = None) -> PartialDensityOperator:
    coin_init = parse_coin_init(coin_spec, space, coin, statistics)
    psi = principal_basis_vector(space, input_label)
    return principal_semantics(d, coin_init, psi, space, gates, cfg)
