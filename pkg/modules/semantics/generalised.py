"""
Interpretação de programas generalizados (sem identificadores): cada cópia c_j é um
fator tensorial próprio; uma guarda ou porta sobre uma cópia ausente vale zero.
"""

from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from modules.fock.operator import FockOperator, cylindrical_extension, exact_form
from modules.fock.space import FockSpace, OccVec
from modules.fock.tensor import embed
from modules.lang.ast import Abort, ProcCall, ProgramScheme, Qif, Seq, Skip, Unitary, max_copies
from modules.lang.gates import GateLibrary
from modules.semantics.config import SemanticsConfig
from modules.utils.errors import ProgramError
from modules.utils.logger import setup_logger

Block = Optional[sp.csr_matrix]


class GeneralisedInterpreter:
    def __init__(self, space: FockSpace, gates: GateLibrary, cfg: SemanticsConfig):
        self.space = space
        self.gates = gates
        self.cfg = cfg
        self.logger = setup_logger(self.__class__.__name__)
        self._unitary_cache: Dict[Tuple, sp.csr_matrix] = {}
        self._projector_cache: Dict[Tuple, sp.csr_matrix] = {}

    def interpret(self, q: ProgramScheme, form: str = "exact") -> FockOperator:
        copies = max_copies(q)
        base = self.space.occ({c: copies.get(c, -1) + 1 for c in self.space.coin_names})
        blocks: Dict[OccVec, sp.csr_matrix] = {}

        # acima da ocupação-base o bloco é a extensão cilíndrica do bloco-base
        extension = None
        if self.cfg.skip_convention == "full-identity" and self.space.contains(base):
            base_block = self._eval(q, base, {})
            if base_block is not None:
                extension = cylindrical_extension(base_block, base, self.space)

        for occ in self.space.occupations:
            if extension is not None and base <= occ:
                block = extension.blocks.get(occ)
            else:
                block = self._eval(q, occ, {})
            if block is not None:
                blocks[occ] = block

        cumulative = FockOperator(self.space, blocks)
        return exact_form(cumulative) if form == "exact" else cumulative

    def _identity(self, occ: OccVec) -> sp.csr_matrix:
        return sp.identity(self.space.block_dim(occ), dtype=np.complex128, format="csr")

    def _eval(self, p: ProgramScheme, occ: OccVec, guards: Dict[str, int]) -> Block:
        if isinstance(p, Abort):
            return None
        if isinstance(p, Skip):
            if self.cfg.skip_convention == "full-identity":
                return self._identity(occ)
            local_ok = all(occ[c] - guards.get(c, 0) >= 1 for c in self.space.coin_names)
            return self._identity(occ) if local_ok else None
        if isinstance(p, Unitary):
            return self._unitary(p, occ)
        if isinstance(p, Seq):
            first = self._eval(p.first, occ, guards)
            if first is None:
                return None
            second = self._eval(p.second, occ, guards)
            return None if second is None else second @ first
        if isinstance(p, Qif):
            return self._qif(p, occ, guards)
        if isinstance(p, ProcCall):
            raise ProgramError(f"programa generalizado contém o identificador '{p.name}'")
        raise TypeError(f"Nó desconhecido: {type(p).__name__}")

    def _unitary(self, p: Unitary, occ: OccVec) -> Block:
        key = (p.gate, p.coins, p.systems, occ)
        if key in self._unitary_cache:
            return self._unitary_cache[key]
        if any(ref.copy >= occ[ref.coin] for ref in p.coins):
            block = None
        else:
            targets = [self.space.coin_axis(occ, ref.coin, ref.copy) for ref in p.coins] + \
                      [self.space.principal_axis(occ, q) for q in p.systems]
            block = embed(self.gates.matrix(p.gate), targets, self.space.dims(occ))
        self._unitary_cache[key] = block
        return block

    def _projector(self, coin: str, copy: int, index: int, occ: OccVec) -> sp.csr_matrix:
        key = (coin, copy, index, occ)
        if key not in self._projector_cache:
            d_c = self.space.coin(coin).dimension
            proj = sp.csr_matrix(([1.0], ([index], [index])), shape=(d_c, d_c), dtype=np.complex128)
            self._projector_cache[key] = embed(proj, [self.space.coin_axis(occ, coin, copy)], self.space.dims(occ))
        return self._projector_cache[key]

    def _qif(self, p: Qif, occ: OccVec, guards: Dict[str, int]) -> Block:
        coin, copy = p.guard.coin, p.guard.copy
        if copy >= occ[coin]:
            return None
        inner_guards = dict(guards)
        inner_guards[coin] = inner_guards.get(coin, 0) + 1
        acc = None
        for index, label in enumerate(self.space.coin(coin).labels):
            branch = self._eval(p.branch_for(label), occ, inner_guards)
            if branch is None:
                continue
            term = self._projector(coin, copy, index, occ) @ branch
            acc = term if acc is None else acc + term
        return acc
