from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import pandas as pd

from modules.fock.operator import (FockOperator, TruncationReport, creation_functional_all, cumulative_form,
                                   exact_form, guarded_composition, identity_operator, lub_chain,
                                   possibly_truncated, product, zero_operator)
from modules.fock.space import FockSpace, OccVec
from modules.fock.tensor import embed
from modules.lang.ast import Abort, Declaration, ProcCall, ProgramScheme, Qif, Seq, Skip, Unitary
from modules.lang.gates import GateLibrary
from modules.oracles.compare import ComparisonReport, compare
from modules.semantics.config import SemanticsConfig
from modules.semantics.generalised import GeneralisedInterpreter
from modules.semantics.substitution import approximations, main_approximation
from modules.utils.errors import ProgramError
from modules.utils.logger import setup_logger

ProcEnvironment = Dict[str, FockOperator]


@dataclass
class SemanticsResult:
    """Semânticas na forma exata, mais a forma cumulativa usada internamente."""

    procedures: Dict[str, FockOperator]
    main: FockOperator
    cumulative: Dict[str, FockOperator]
    iterations: int
    truncation: TruncationReport = field(default_factory=TruncationReport)

    def possibly_truncated(self) -> Dict[str, List[OccVec]]:
        flagged = {name: possibly_truncated(op) for name, op in self.procedures.items()}
        flagged["main"] = possibly_truncated(self.main)
        return flagged


def _identical(a: FockOperator, b: FockOperator) -> bool:
    """Igualdade estrutural com tolerância 0."""
    if set(a.blocks) != set(b.blocks):
        return False
    return all((a.blocks[o] != b.blocks[o]).nnz == 0 for o in a.blocks)


class SemanticsEngine:
    """
    Funcional semântico, semântica de ponto fixo (Kleene) e semântica operacional
    (aproximações sintáticas) de declarações recursivas.
    """

    def __init__(self, space: FockSpace, gates: GateLibrary, cfg: Optional[SemanticsConfig] = None):
        self.space = space
        self.gates = gates
        self.cfg = cfg or SemanticsConfig()
        self.logger = setup_logger(self.__class__.__name__)
        self._unitary_cache: Dict[Tuple, FockOperator] = {}
        self._skip: Optional[FockOperator] = None

    # ------------------------------------------------------------ funcional semântico
    def skip_operator(self) -> FockOperator:
        if self._skip is None:
            identity = identity_operator(self.space)
            if self.cfg.skip_convention == "occupied":
                identity = identity.restrict(o for o in self.space.occupations if all(n >= 1 for n in o.counts))
            self._skip = identity
        return self._skip

    def unitary_operator(self, p: Unitary) -> FockOperator:
        """Extensão cilíndrica de U: age na cópia 0 de cada moeda; nula sem a moeda."""
        key = (p.gate, p.coins, p.systems)
        if key not in self._unitary_cache:
            if any(ref.copy != 0 for ref in p.coins):
                raise ProgramError("o funcional semântico opera sobre esquemas com cópia 0")
            matrix = self.gates.matrix(p.gate)
            blocks = {}
            for occ in self.space.occupations:
                if any(occ[ref.coin] == 0 for ref in p.coins):
                    continue
                targets = [self.space.coin_axis(occ, ref.coin, 0) for ref in p.coins] + \
                          [self.space.principal_axis(occ, q) for q in p.systems]
                blocks[occ] = embed(matrix, targets, self.space.dims(occ))
            self._unitary_cache[key] = FockOperator(self.space, blocks)
        return self._unitary_cache[key]

    def semantic_functional(self, p: ProgramScheme, env: Mapping[str, FockOperator]) -> FockOperator:
        """⟦P⟧(Ā) na forma cumulativa."""
        if isinstance(p, Abort):
            return zero_operator(self.space)
        if isinstance(p, Skip):
            return self.skip_operator()
        if isinstance(p, Unitary):
            return self.unitary_operator(p)
        if isinstance(p, ProcCall):
            if p.name not in env:
                raise ProgramError(f"ambiente sem operador para '{p.name}'")
            self.space.require_same(env[p.name].space)
            return env[p.name]
        if isinstance(p, Seq):
            first = self.semantic_functional(p.first, env)
            if first.is_zero(0.0):
                return first
            return product(self.semantic_functional(p.second, env), first)
        if isinstance(p, Qif):
            if p.guard.copy != 0:
                raise ProgramError("o funcional semântico opera sobre esquemas com cópia 0")
            labels = self.space.coin(p.guard.coin).labels
            parts = [self.semantic_functional(p.branch_for(label), env) for label in labels]
            return guarded_composition(p.guard.coin, labels, parts, self.space)
        raise TypeError(f"Nó desconhecido: {type(p).__name__}")

    def decl_functional(self, d: Declaration, env: Mapping[str, FockOperator],
                        report: Optional[TruncationReport] = None) -> ProcEnvironment:
        if set(env) != set(d.names):
            raise ProgramError(f"aridade do ambiente {sorted(env)} difere das equações {d.names}")
        if self.cfg.creation == "environment":
            coins = d.declaration_coins()
            env = {name: creation_functional_all(coins, op, report) for name, op in env.items()}
        return {name: self.semantic_functional(body, env) for name, body in d.equations}

    # ------------------------------------------------------------ ponto fixo
    def iteration_cap(self, d: Declaration) -> int:
        depth = sum(self.space.caps)
        if self.space.max_total is not None:
            depth = min(depth, self.space.max_total)
        return depth + len(d.equations) + 2

    def kleene_fixpoint(self, d: Declaration) -> SemanticsResult:
        """Itera ⟦D⟧ a partir do ambiente nulo até a estabilidade estrutural."""
        self.logger.info(f"🚀 Iteração de Kleene: {d.names} (skip={self.cfg.skip_convention}, "
                         f"criação={self.cfg.creation})")
        report = TruncationReport()
        env: ProcEnvironment = {name: zero_operator(self.space) for name in d.names}
        cap = self.iteration_cap(d)
        iterations = 0
        while True:
            nxt = self.decl_functional(d, env, report)
            iterations += 1
            if all(_identical(nxt[name], env[name]) for name in d.names):
                break
            env = nxt
            if iterations >= cap:
                self.logger.warning(f"Limite de {cap} iterações atingido sem estabilizar")
                break
        self.logger.info(f"✓ Ponto fixo após {iterations} iteração(ões)")
        if report.count:
            self.logger.warning(f"{report.count} bloco(s) descartado(s) pelo truncamento")
        return self._result(d, env, iterations, report)

    def _result(self, d: Declaration, env: ProcEnvironment, iterations: int,
                report: TruncationReport) -> SemanticsResult:
        main = exact_form(self.semantic_functional(d.main, env))
        return SemanticsResult(
            procedures={name: exact_form(op) for name, op in env.items()},
            main=main,
            cumulative=dict(env),
            iterations=iterations,
            truncation=report,
        )

    # ------------------------------------------------------------ semântica operacional
    def interpret_generalised(self, q: ProgramScheme, form: str = "exact") -> FockOperator:
        return GeneralisedInterpreter(self.space, self.gates, self.cfg).interpret(q, form)

    def operational_semantics(self, d: Declaration) -> SemanticsResult:
        """⊔_n ⟦X^{(n)}⟧ por aproximações sintáticas, depois ⟦main⟧ sobre os supremos."""
        self.logger.info(f"🚀 Semântica operacional: {d.names}")
        interpreter = GeneralisedInterpreter(self.space, self.gates, self.cfg)
        chains: Dict[str, List[FockOperator]] = {name: [] for name in d.names}
        previous = None
        cap = self.iteration_cap(d)
        depth = 0
        for depth in range(cap + 1):
            current = {name: interpreter.interpret(q) for name, q in approximations(d, depth).items()}
            for name, op in current.items():
                chains[name].append(op)
            if previous is not None and all(current[n].equals(previous[n], self.cfg.tolerance) for n in d.names):
                break
            previous = current
        self.logger.info(f"✓ Aproximações estabilizadas na profundidade {depth}")
        lubs = {name: lub_chain(chain, self.cfg.tolerance) for name, chain in chains.items()}
        env = {name: cumulative_form(op) for name, op in lubs.items()}
        main = exact_form(self.semantic_functional(d.main, env))
        return SemanticsResult(procedures=lubs, main=main, cumulative=env, iterations=depth)

    def main_limit(self, d: Declaration, depth: int) -> FockOperator:
        """⟦main^{(n)}⟧ na forma exata."""
        return self.interpret_generalised(main_approximation(d, depth))


def kleene_fixpoint(d: Declaration, space: FockSpace, gates: GateLibrary,
                    cfg: Optional[SemanticsConfig] = None) -> SemanticsResult:
    return SemanticsEngine(space, gates, cfg).kleene_fixpoint(d)


def operational_semantics(d: Declaration, space: FockSpace, gates: GateLibrary,
                          cfg: Optional[SemanticsConfig] = None) -> SemanticsResult:
    return SemanticsEngine(space, gates, cfg).operational_semantics(d)


@dataclass
class EquivalenceReport:
    """Diferenças bloco a bloco entre ponto fixo e semântica operacional, por identificador e main."""

    comparisons: List[ComparisonReport]
    fixpoint: SemanticsResult
    operational: SemanticsResult

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons)

    @property
    def max_diff(self) -> float:
        return max((c.max_diff for c in self.comparisons), default=0.0)

    def to_frame(self) -> pd.DataFrame:
        frames = [c.table.assign(target=c.label) for c in self.comparisons]
        return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()

    def summary(self) -> Dict:
        return {
            "passed": self.passed,
            "max_diff": self.max_diff,
            "kleene_iterations": self.fixpoint.iterations,
            "operational_depth": self.operational.iterations,
            "targets": [c.summary() for c in self.comparisons],
        }


def check_equivalence(d: Declaration, space: FockSpace, gates: GateLibrary,
                      cfg: Optional[SemanticsConfig] = None,
                      operational_cfg: Optional[SemanticsConfig] = None) -> EquivalenceReport:
    """
    Compara ⟦D⟧_fix e ⟦D⟧_op em todas as ocupações do truncamento.

    `operational_cfg` permite configurar o lado operacional de forma diferente
    (controle negativo: a comparação deve falhar).
    """
    cfg = cfg or SemanticsConfig()
    operational_cfg = operational_cfg or cfg
    logger = setup_logger("equivalence")
    try:
        fix = SemanticsEngine(space, gates, cfg).kleene_fixpoint(d)
        op = SemanticsEngine(space, gates, operational_cfg).operational_semantics(d)
    except Exception as e:
        logger.error(f"Erro ao calcular as semânticas: {e}")
        raise

    comparisons = [compare(fix.procedures[name], op.procedures[name], cfg.tolerance, label=name)
                   for name in d.names]
    comparisons.append(compare(fix.main, op.main, cfg.tolerance, label="main"))
    report = EquivalenceReport(comparisons, fix, op)
    if report.passed:
        logger.info(f"✓ Semânticas equivalentes (diferença máxima {report.max_diff:.3e})")
    else:
        worst = max(comparisons, key=lambda c: c.max_diff)
        logger.warning(f"Semânticas divergem em '{worst.label}' na ocupação {worst.worst_occupation} "
                       f"(diferença {worst.max_diff:.3e})")
    return report
