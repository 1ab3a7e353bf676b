import pandas as pd
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from modules.lang.ast import (CoinRef, Declaration, ProcCall, ProgramScheme, Qif,
                              SourcePos, SpaceSpec, Unitary, free_coins, walk)
from modules.lang.gates import GateLibrary
from modules.utils.logger import setup_logger

logger = setup_logger("validator")

_KIND = {"coin": "moeda", "principal": "sistema principal"}


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    where: str = ""
    pos: Optional[SourcePos] = None


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> List[str]:
        return [v.kind for v in self.violations]

    def to_frame(self) -> pd.DataFrame:
        rows = [{"kind": v.kind, "where": v.where, "message": v.message,
                 "line": v.pos.line if v.pos else None,
                 "column": v.pos.column if v.pos else None} for v in self.violations]
        return pd.DataFrame(rows, columns=["kind", "where", "message", "line", "column"])


class Validator:
    """
    Valida uma declaração recursiva já analisada.

    Verifica:
    - Moeda de guarda ocorrendo dentro de um ramo do qif
    - Moedas compartilhadas entre o comando principal e as equações
    - Portas, identificadores, variáveis e rótulos desconhecidos
    - Dimensões das aplicações de portas
    - Portas não unitárias
    - Nomes repetidos entre moedas, sistemas principais e procedimentos
    """

    NAME_CLASH = "name-clash"
    GUARD_IN_BRANCH = "guard-coin-in-branch"
    COIN_OVERLAP = "main-declaration-coin-overlap"
    UNKNOWN_GATE = "unknown-gate"
    UNKNOWN_IDENTIFIER = "unknown-identifier"
    UNKNOWN_VARIABLE = "unknown-variable"
    UNKNOWN_LABEL = "unknown-label"
    DIMENSION_MISMATCH = "dimension-mismatch"
    NON_UNITARY = "non-unitary-gate"

    def __init__(self):
        self.logger = setup_logger(self.__class__.__name__)

    def validate(self, d: Declaration, gates: GateLibrary, spaces: List[SpaceSpec]) -> ValidationReport:
        report = ValidationReport()
        coins = {s.name: s for s in spaces if s.kind == "coin"}
        systems = {s.name: s for s in spaces if s.kind == "principal"}
        names = set(d.names)

        # 0. NOMES
        report.violations.extend(self._check_names(d, spaces))

        # 1. PORTAS DA BIBLIOTECA
        for name, entry in gates.entries.items():
            if entry.problem:
                report.violations.append(Violation(self.DIMENSION_MISMATCH, entry.problem, f"gate {name}"))
            elif not entry.unitary:
                report.violations.append(Violation(self.NON_UNITARY, f"porta '{name}' não é unitária", f"gate {name}"))

        # 2. CORPOS E COMANDO PRINCIPAL
        programs = list(d.equations) + [("main", d.main)]
        for where, body in programs:
            for node in walk(body):
                report.violations.extend(self._check_node(node, where, gates, coins, systems, names))

        # 3. MOEDAS DO PRINCIPAL × MOEDAS DAS EQUAÇÕES
        overlap = free_coins(d.main) & d.declaration_coins()
        if overlap:
            report.violations.append(Violation(
                self.COIN_OVERLAP,
                f"moedas do comando principal também usadas nas equações: {sorted(overlap)}",
                "main", getattr(d.main, "pos", None)))

        if report.ok:
            self.logger.info(f"✓ Validação concluída: {len(d.equations)} equação(ões) bem formada(s)")
        else:
            self.logger.warning(f"Validação encontrou {len(report.violations)} violação(ões)")
            for v in report.violations:
                self.logger.warning(f"  • {v.kind} em {v.where}: {v.message}")
        return report

    def _check_names(self, d: Declaration, spaces: List[SpaceSpec]) -> List[Violation]:
        found: List[Violation] = []
        declared: Dict[str, SpaceSpec] = {}
        for space in spaces:
            if space.name in declared:
                found.append(Violation(
                    self.NAME_CLASH,
                    f"'{space.name}' declarado como {_KIND[declared[space.name].kind]} e como {_KIND[space.kind]}",
                    f"space {space.name}"))
            else:
                declared[space.name] = space
        for name, body in d.equations:
            if name in declared:
                found.append(Violation(self.NAME_CLASH,
                                       f"procedimento '{name}' tem o nome de um(a) {_KIND[declared[name].kind]}",
                                       name, getattr(body, "pos", None)))
        return found

    def _check_node(self, node: ProgramScheme, where: str, gates: GateLibrary,
                    coins: Dict[str, SpaceSpec], systems: Dict[str, SpaceSpec], names) -> List[Violation]:
        found: List[Violation] = []
        pos = getattr(node, "pos", None)

        if isinstance(node, ProcCall) and node.name not in names:
            found.append(Violation(self.UNKNOWN_IDENTIFIER, f"procedimento '{node.name}' não declarado", where, pos))

        elif isinstance(node, Unitary):
            found.extend(self._check_unitary(node, where, gates, coins, systems))

        elif isinstance(node, Qif):
            guard: CoinRef = node.guard
            if guard.coin not in coins:
                found.append(Violation(self.UNKNOWN_VARIABLE, f"moeda '{guard.coin}' não declarada", where, pos))
                return found
            labels = [label for label, _ in node.branches]
            if len(set(labels)) != len(labels):
                found.append(Violation(self.UNKNOWN_LABEL, "rótulos repetidos no qif", where, pos))
            for label in labels:
                if label not in coins[guard.coin].labels:
                    found.append(Violation(self.UNKNOWN_LABEL,
                                           f"rótulo '{label}' não pertence à base de '{guard.coin}'", where, pos))
            for label, body in node.branches:
                if guard.coin in free_coins(body):
                    found.append(Violation(self.GUARD_IN_BRANCH,
                                           f"moeda de guarda '{guard.coin}' ocorre no ramo |{label}>", where, pos))
        return found

    def _check_unitary(self, node: Unitary, where: str, gates: GateLibrary,
                       coins: Dict[str, SpaceSpec], systems: Dict[str, SpaceSpec]) -> List[Violation]:
        found: List[Violation] = []
        pos = node.pos
        unknown = [r.coin for r in node.coins if r.coin not in coins] + \
                  [q for q in node.systems if q not in systems]
        for name in unknown:
            found.append(Violation(self.UNKNOWN_VARIABLE, f"variável '{name}' não declarada", where, pos))
        if node.gate not in gates:
            found.append(Violation(self.UNKNOWN_GATE, f"porta '{node.gate}' não declarada", where, pos))
            return found
        if unknown:
            return found
        entry = gates[node.gate]
        arg_dims = tuple(coins[r.coin].dimension for r in node.coins) + \
                   tuple(systems[q].dimension for q in node.systems)
        if arg_dims != entry.dims:
            found.append(Violation(self.DIMENSION_MISMATCH,
                                   f"'{node.gate}' espera dimensões {entry.dims}, recebeu {arg_dims}", where, pos))
        args = [r.coin for r in node.coins] + list(node.systems)
        if len(set(args)) != len(args):
            found.append(Violation(self.DIMENSION_MISMATCH, f"variável repetida na aplicação de '{node.gate}'",
                                   where, pos))
        return found


def validate(d: Declaration, gates: GateLibrary, spaces: List[SpaceSpec]) -> ValidationReport:
    return Validator().validate(d, gates, spaces)
