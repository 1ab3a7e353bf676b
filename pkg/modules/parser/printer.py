"""Impressão canônica de declarações; o texto gerado é reanalisado em uma AST igual."""

from typing import List, Optional

from modules.lang.ast import (Abort, CoinRef, Declaration, ProcCall, ProgramScheme, Qif, Seq,
                              Skip, SpaceSpec, Unitary)
from modules.lang.gates import GateExpr, GateLibrary


def _coin(ref: CoinRef) -> str:
    # cópias > 0 só aparecem em programas generalizados (apenas exibição)
    return ref.coin if ref.copy == 0 else f"{ref.coin}@{ref.copy}"


def print_program(p: ProgramScheme) -> str:
    if isinstance(p, Abort):
        return "abort"
    if isinstance(p, Skip):
        return "skip"
    if isinstance(p, ProcCall):
        return p.name
    if isinstance(p, Unitary):
        args = [_coin(r) for r in p.coins] + list(p.systems)
        return f"{p.gate}[{', '.join(args)}]"
    if isinstance(p, Seq):
        first = print_program(p.first)
        if isinstance(p.first, Seq):
            first = f"({first})"
        return f"{first}; {print_program(p.second)}"
    if isinstance(p, Qif):
        branches = " [] ".join(f"|{label}> -> {print_program(body)}" for label, body in p.branches)
        return f"qif [{_coin(p.guard)}] {branches} fiq"
    raise TypeError(f"Nó desconhecido: {type(p).__name__}")


def _number(x: float) -> str:
    text = repr(float(x))
    return text.lstrip("-") if text == "-0.0" else text


def _complex(z: complex) -> str:
    if z.imag == 0:
        return _number(z.real)
    imag = f"{_number(abs(z.imag))}i"
    if z.real == 0:
        return f"-{imag}" if z.imag < 0 else imag
    return f"{_number(z.real)}{'-' if z.imag < 0 else '+'}{imag}"


def print_gate_expr(expr: GateExpr) -> str:
    if expr.kind in ("hadamard", "identity"):
        return expr.kind
    if expr.kind in ("fourier", "shift"):
        return f"{expr.kind} {expr.args[0]}"
    if expr.kind == "permutation":
        return f"permutation({', '.join(str(i) for i in expr.args)})"
    rows = "; ".join(", ".join(_complex(z) for z in row) for row in expr.args)
    return f"matrix [{rows}]"


def print_space(space: SpaceSpec) -> str:
    if space.kind == "coin":
        return f"coin {space.name} : basis {{{', '.join(space.labels)}}};"
    if space.ring is not None:
        return f"system {space.name} : ring {space.ring};"
    return f"system {space.name} : dim {space.dimension};"


def pretty_print(d: Declaration, spaces: Optional[List[SpaceSpec]] = None,
                 gates: Optional[GateLibrary] = None) -> str:
    lines: List[str] = [print_space(s) for s in spaces or []]
    if gates is not None:
        for name, entry in gates.entries.items():
            lines.append(f"gate {name} on ({', '.join(entry.spaces)}) = {print_gate_expr(entry.expr)};")
    for name, body in d.equations:
        lines.append(f"proc {name} <= {print_program(body)};")
    lines.append(f"main = {print_program(d.main)};")
    return "\n".join(lines) + "\n"
