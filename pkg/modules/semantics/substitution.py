"""Substituição com renomeação de cópias de moedas e aproximações sintáticas."""

from typing import Dict, Mapping

from modules.lang.ast import (Abort, Declaration, ProcCall, ProgramScheme, Qif, Seq,
                              has_identifiers, rename_coin)
from modules.utils.errors import ProgramError


def substitute(p: ProgramScheme, bodies: Mapping[str, ProgramScheme]) -> ProgramScheme:
    """
    P[Q̄/X̄]. Dentro de cada ramo de um qif sobre a cópia d_k, toda cópia d_{k+j}
    do ramo substituído passa a d_{k+j+1}; a cópia da guarda não muda.
    """
    for name, body in bodies.items():
        if has_identifiers(body):
            raise ProgramError(f"o corpo substituído para '{name}' contém identificadores de procedimento")
    return _substitute(p, bodies)


def _substitute(p: ProgramScheme, bodies: Mapping[str, ProgramScheme]) -> ProgramScheme:
    if isinstance(p, ProcCall):
        if p.name not in bodies:
            raise ProgramError(f"sem corpo para o identificador '{p.name}'")
        return bodies[p.name]
    if isinstance(p, Seq):
        return Seq(_substitute(p.first, bodies), _substitute(p.second, bodies), pos=p.pos)
    if isinstance(p, Qif):
        guard = p.guard
        branches = tuple((label, rename_coin(_substitute(body, bodies), guard.coin, guard.copy))
                         for label, body in p.branches)
        return Qif(guard, branches, pos=p.pos)
    return p


def approximations(d: Declaration, n: int) -> Dict[str, ProgramScheme]:
    """X̄^{(n)}: X^{(0)} = abort, X^{(n+1)} = P[X̄^{(n)}/X̄]."""
    if n < 0:
        raise ValueError(f"profundidade negativa: {n}")
    current: Dict[str, ProgramScheme] = {name: Abort() for name in d.names}
    for _ in range(n):
        current = {name: substitute(body, current) for name, body in d.equations}
    return current


def syntactic_approx(d: Declaration, name: str, n: int) -> ProgramScheme:
    if name not in d.names:
        raise ProgramError(f"identificador desconhecido: {name}")
    return approximations(d, n)[name]


def main_approximation(d: Declaration, n: int) -> ProgramScheme:
    """main^{(n)} = main[X̄^{(n)}/X̄]."""
    return substitute(d.main, approximations(d, n))
