"""
Simulador por reescrita de configurações: cada configuração é (continuação,
registradores de cópias de moedas, estado de base do principal) com uma amplitude.

É um algoritmo independente do motor de blocos de Fock: chamadas de procedimento
são desdobradas pela inserção do corpo com cópias novas, portas agem sobre os
registradores e o qif despacha o ramo conforme o registrador da guarda.
"""

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from modules.fock.space import FockSpace
from modules.lang.ast import (Abort, CoinRef, Declaration, ProcCall, ProgramScheme, Qif, Seq, Skip, SpaceSpec,
                              Unitary, rename_coin)
from modules.lang.gates import GateLibrary
from modules.parser.printer import print_program
from modules.utils.logger import setup_logger

AMP_TOL = 1e-15
WEIGHT_TOL = 1e-10
STEP_MODES = ("call", "choice")

END_QIF = ("end",)

Offsets = Tuple[Tuple[str, int], ...]
Frame = Tuple
Registers = Tuple[Tuple[Tuple[str, int], int], ...]


def _bump(offsets: Offsets, coin: str) -> Offsets:
    table = dict(offsets)
    table[coin] = table.get(coin, 0) + 1
    return tuple(sorted(table.items()))


def _apply_offsets(p: ProgramScheme, offsets: Offsets) -> ProgramScheme:
    for coin, k in offsets:
        if k:
            p = rename_coin(p, coin, 0, k)
    return p


@dataclass(frozen=True)
class Configuration:
    continuation: Tuple[Frame, ...]
    registers: Registers
    principal: Tuple[int, ...]

    @property
    def terminated(self) -> bool:
        return not self.continuation


@dataclass
class WeightedConfiguration:
    config: Configuration
    amplitude: complex


class ConfigurationSimulator:
    def __init__(self, d: Declaration, spaces: List[SpaceSpec], gates: GateLibrary, mode: str = "call",
                 fresh_label: Optional[str] = None):
        if mode not in STEP_MODES:
            raise ValueError(f"Modo de passo inválido: {mode} (use {' ou '.join(STEP_MODES)})")
        self.d = d
        self.gates = gates
        self.mode = mode
        self.coins = {s.name: s for s in spaces if s.kind == "coin"}
        self.principals = [s for s in spaces if s.kind == "principal"]
        self.coin_order = [s.name for s in spaces if s.kind == "coin"]
        self.fresh = {name: (spec.index_of(fresh_label) if fresh_label is not None and fresh_label in spec.labels
                             else 0)
                      for name, spec in self.coins.items()}
        self.logger = setup_logger(self.__class__.__name__)

    # ------------------------------------------------------------ estado inicial
    def initial(self, principal_labels: Optional[Dict[str, str]] = None,
                coin_labels: Optional[Dict[Tuple[str, int], str]] = None,
                program: Optional[ProgramScheme] = None) -> List[WeightedConfiguration]:
        principal_labels = principal_labels or {}
        principal = tuple(spec.index_of(principal_labels[spec.name]) if spec.name in principal_labels
                          else self._default_principal(spec) for spec in self.principals)
        registers = tuple(sorted(((coin, copy), self.coins[coin].index_of(label))
                                 for (coin, copy), label in (coin_labels or {}).items()))
        program = self.d.main if program is None else program
        return [WeightedConfiguration(Configuration(((program, ()),), registers, principal), 1.0 + 0j)]

    @staticmethod
    def _default_principal(spec: SpaceSpec) -> int:
        return spec.index_of("0") if "0" in spec.labels else 0

    # ------------------------------------------------------------ passos
    def step(self, configs: List[WeightedConfiguration]) -> List[WeightedConfiguration]:
        merged: Dict[Configuration, complex] = {}
        for wc in configs:
            if wc.config.terminated:
                merged[wc.config] = merged.get(wc.config, 0j) + wc.amplitude
                continue
            for config, amp in self._advance(wc.config, wc.amplitude):
                merged[config] = merged.get(config, 0j) + amp
        result = [WeightedConfiguration(c, a) for c, a in merged.items() if abs(a) >= AMP_TOL]
        weight = sum(abs(wc.amplitude) ** 2 for wc in result)
        if weight > 1 + WEIGHT_TOL:
            self.logger.warning(f"Peso total {weight:.12f} acima de 1")
        return result

    def run(self, depth: int, configs: Optional[List[WeightedConfiguration]] = None
            ) -> List[List[WeightedConfiguration]]:
        """Lista de superposições: a inicial seguida de uma por passo."""
        if depth < 0:
            raise ValueError(f"profundidade negativa: {depth}")
        configs = self.initial() if configs is None else configs
        history = [configs]
        for _ in range(depth):
            configs = self.step(configs)
            history.append(configs)
        self.logger.info(f"✓ Simulação em modo '{self.mode}' com {depth} passo(s): "
                         f"{len(configs)} configuração(ões)")
        return history

    def _advance(self, config: Configuration, amp: complex) -> List[Tuple[Configuration, complex]]:
        frames = config.continuation
        head = frames[0]
        if head is not END_QIF and isinstance(head[0], ProcCall):
            frames = ((self.d.body(head[0].name), head[1]),) + frames[1:]
        finished: List[Tuple[Configuration, complex]] = []
        work = [(frames, dict(config.registers), config.principal, amp)]
        while work:
            frames, registers, principal, amp = work.pop()
            if not frames:
                finished.append((Configuration((), self._freeze(registers), principal), amp))
                continue
            head, rest = frames[0], frames[1:]
            if head is END_QIF:
                if self.mode == "choice":
                    finished.append((Configuration(rest, self._freeze(registers), principal), amp))
                else:
                    work.append((rest, registers, principal, amp))
                continue
            node, offsets = head
            if isinstance(node, ProcCall):
                finished.append((Configuration(frames, self._freeze(registers), principal), amp))
            elif isinstance(node, Abort):
                continue
            elif isinstance(node, Skip):
                work.append((rest, registers, principal, amp))
            elif isinstance(node, Seq):
                work.append((((node.first, offsets), (node.second, offsets)) + rest, registers, principal, amp))
            elif isinstance(node, Qif):
                ref = self._actual(node.guard, offsets)
                value = registers.get((ref.coin, ref.copy), self.fresh[ref.coin])
                registers = dict(registers)
                registers[(ref.coin, ref.copy)] = value
                branch = node.branch_for(self.coins[ref.coin].labels[value])
                work.append((((branch, _bump(offsets, ref.coin)), END_QIF) + rest, registers, principal, amp))
            elif isinstance(node, Unitary):
                for registers_out, principal_out, factor in self._apply_unitary(node, offsets, registers, principal):
                    work.append((rest, registers_out, principal_out, amp * factor))
            else:
                raise TypeError(f"Nó desconhecido: {type(node).__name__}")
        return finished

    # ------------------------------------------------------------ auxiliares
    @staticmethod
    def _actual(ref: CoinRef, offsets: Offsets) -> CoinRef:
        return ref.shifted(dict(offsets).get(ref.coin, 0))

    @staticmethod
    def _freeze(registers: Dict[Tuple[str, int], int]) -> Registers:
        return tuple(sorted(registers.items()))

    def _apply_unitary(self, node: Unitary, offsets: Offsets, registers: Dict, principal: Tuple[int, ...]):
        matrix = self.gates.matrix(node.gate)
        refs = [self._actual(r, offsets) for r in node.coins]
        names = [s.name for s in self.principals]
        dims = [self.coins[r.coin].dimension for r in refs] + \
               [self.principals[names.index(q)].dimension for q in node.systems]
        digits = [registers.get((r.coin, r.copy), self.fresh[r.coin]) for r in refs] + \
                 [principal[names.index(q)] for q in node.systems]
        x = int(np.ravel_multi_index(digits, dims)) if dims else 0
        column = matrix[:, x]
        for y in np.flatnonzero(np.abs(column) >= AMP_TOL):
            out = np.unravel_index(int(y), dims) if dims else ()
            registers_out = dict(registers)
            for r, v in zip(refs, out[:len(refs)]):
                registers_out[(r.coin, r.copy)] = int(v)
            principal_out = list(principal)
            for q, v in zip(node.systems, out[len(refs):]):
                principal_out[names.index(q)] = int(v)
            yield registers_out, tuple(principal_out), complex(column[y])

    # ------------------------------------------------------------ relatórios
    def residual_text(self, config: Configuration) -> str:
        if config.terminated:
            return "E"
        parts = [print_program(_apply_offsets(frame[0], frame[1])) for frame in config.continuation
                 if frame is not END_QIF]
        return "; ".join(parts)

    def describe(self, wc: WeightedConfiguration) -> Dict:
        registers = dict(wc.config.registers)
        ordered = sorted(registers, key=lambda key: (self.coin_order.index(key[0]), key[1]))
        principal = [spec.labels[i] for spec, i in zip(self.principals, wc.config.principal)]
        position = principal[0] if len(principal) == 1 else ",".join(principal)
        if len(principal) == 1 and self.principals[0].ring is not None:
            position = int(position)
        return {
            "amplitude": [float(wc.amplitude.real), float(wc.amplitude.imag)],
            "coins": [self.coins[c].labels[registers[(c, k)]] for c, k in ordered],
            "registers": {f"{c}@{k}" if k else c: self.coins[c].labels[registers[(c, k)]] for c, k in ordered},
            "position": position,
            "residual": self.residual_text(wc.config),
        }

    def trace_json(self, history: List[List[WeightedConfiguration]]) -> str:
        steps = [[self.describe(wc) for wc in self._sorted(configs)] for configs in history]
        return json.dumps(steps, ensure_ascii=False, indent=2)

    def trace_frame(self, history: List[List[WeightedConfiguration]]) -> pd.DataFrame:
        rows = []
        for step, configs in enumerate(history):
            for wc in self._sorted(configs):
                entry = self.describe(wc)
                rows.append({"step": step, "re": entry["amplitude"][0], "im": entry["amplitude"][1],
                             "coins": " ".join(entry["coins"]), "position": entry["position"],
                             "residual": entry["residual"]})
        return pd.DataFrame(rows, columns=["step", "re", "im", "coins", "position", "residual"])

    def _sorted(self, configs: List[WeightedConfiguration]) -> List[WeightedConfiguration]:
        return sorted(configs, key=lambda wc: (wc.config.terminated is False, self.residual_text(wc.config),
                                               wc.config.registers, wc.config.principal))


def total_weight(configs: List[WeightedConfiguration]) -> float:
    return float(sum(abs(wc.amplitude) ** 2 for wc in configs))


def config_simulate(d: Declaration, spaces: List[SpaceSpec], gates: GateLibrary, depth: int,
                    mode: str = "call", principal_labels: Optional[Dict[str, str]] = None,
                    fresh_label: Optional[str] = None) -> List[WeightedConfiguration]:
    simulator = ConfigurationSimulator(d, spaces, gates, mode, fresh_label)
    return simulator.run(depth, simulator.initial(principal_labels))[-1]


def terminated_vectors(configs: List[WeightedConfiguration], space: FockSpace, fresh: int = 0) -> Dict:
    """Configurações terminadas como componentes de estado por ocupação (cópias usadas)."""
    vectors: Dict = {}
    for wc in configs:
        if not wc.config.terminated:
            continue
        registers = dict(wc.config.registers)
        occ = space.occ({c: 1 + max((k for (cc, k) in registers if cc == c), default=-1)
                         for c in space.coin_names})
        dims = space.dims(occ)
        digits = []
        for coin in space.coin_names:
            digits.extend(registers.get((coin, k), fresh) for k in range(occ[coin]))
        digits.extend(wc.config.principal)
        index = int(np.ravel_multi_index(digits, dims))
        vec = vectors.setdefault(occ, np.zeros(space.block_dim(occ), dtype=np.complex128))
        vec[index] += wc.amplitude
    return vectors
