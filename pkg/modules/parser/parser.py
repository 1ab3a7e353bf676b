from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple

from modules.lang.ast import (Abort, CoinRef, Declaration, ProcCall, ProgramScheme, Qif, Seq,
                              Skip, SourcePos, SpaceSpec, Unitary, desugar_choice, seq_power)
from modules.lang.gates import GateExpr, GateLibrary
from modules.parser.lexer import Token, tokenize
from modules.utils.errors import ParseError
from modules.utils.logger import setup_logger

_PROGRAM_START_KEYWORDS = {"abort", "skip", "qif"}


@dataclass(frozen=True)
class SourceFile:
    text: str
    path: Optional[str] = None

    @classmethod
    def read(cls, path: str) -> "SourceFile":
        file_path = Path(path)
        if not file_path.exists():
            raise FileNotFoundError(f"Arquivo fonte não encontrado: {path}")
        return cls(file_path.read_text(encoding="utf-8"), str(file_path))


class ParsedProgram(NamedTuple):
    declaration: Declaration
    gates: GateLibrary
    spaces: List[SpaceSpec]

    def space(self, name: str) -> SpaceSpec:
        for s in self.spaces:
            if s.name == name:
                return s
        raise KeyError(f"Espaço desconhecido: {name}")


class Parser:
    """
    Analisador descendente recursivo da linguagem de esquemas de programas.

    Precedência (da mais fraca para a mais forte): `(+)[G[c]]`, `;` (associativo
    à direita), `^n`, átomos. Moedas e sistemas precisam ser declarados antes do uso.
    """

    def __init__(self):
        self.logger = setup_logger(self.__class__.__name__)
        self.tokens: List[Token] = []
        self.index = 0
        self.spaces: Dict[str, SpaceSpec] = {}

    # ------------------------------------------------------------------ tokens
    def _peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def _advance(self) -> Token:
        token = self._peek()
        self.index += 1
        return token

    def _error(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self._peek()
        found = token.text or "fim do arquivo"
        return ParseError(f"{message}; encontrado '{found}'", token.line, token.column)

    def _expect_sym(self, text: str) -> Token:
        token = self._peek()
        if not token.is_sym(text):
            raise self._error(f"esperado '{text}'")
        return self._advance()

    def _expect_kw(self, text: str) -> Token:
        token = self._peek()
        if not token.is_kw(text):
            raise self._error(f"esperado '{text}'")
        return self._advance()

    def _expect_id(self) -> Token:
        token = self._peek()
        if token.kind != "ID":
            raise self._error("esperado identificador")
        return self._advance()

    def _expect_int(self) -> int:
        negative = False
        if self._peek().is_sym("-"):
            self._advance()
            negative = True
        token = self._peek()
        if token.kind != "INT":
            raise self._error("esperado inteiro")
        self._advance()
        return -int(token.text) if negative else int(token.text)

    def _expect_label(self) -> str:
        token = self._peek()
        if token.kind not in ("ID", "INT"):
            raise self._error("esperado rótulo de base")
        return self._advance().text

    @staticmethod
    def _pos(token: Token) -> SourcePos:
        return SourcePos(token.line, token.column)

    # ------------------------------------------------------------------ arquivo
    def parse(self, src: SourceFile) -> ParsedProgram:
        try:
            result = self._parse_file(src.text)
        except ParseError as e:
            self.logger.error(f"Erro de sintaxe em {src.path or '<texto>'}: {e}")
            raise
        self.logger.info(f"✓ Programa analisado: {len(result.declaration.equations)} procedimento(s), "
                         f"{len(result.gates.entries)} porta(s), {len(result.spaces)} espaço(s)")
        return result

    def _parse_file(self, text: str) -> ParsedProgram:
        self.tokens = tokenize(text)
        self.index = 0
        self.spaces = {}
        gates = GateLibrary()
        equations: List[Tuple[str, ProgramScheme]] = []
        main: Optional[ProgramScheme] = None

        while self._peek().kind != "EOF":
            token = self._peek()
            if token.is_kw("coin") or token.is_kw("system"):
                self._parse_space()
            elif token.is_kw("gate"):
                self._parse_gate(gates)
            elif token.is_kw("proc"):
                self._advance()
                name_token = self._expect_id()
                if any(name == name_token.text for name, _ in equations):
                    raise ParseError(f"declaração duplicada do procedimento '{name_token.text}'",
                                     name_token.line, name_token.column)
                self._expect_sym("<=")
                body = self._parse_prog()
                self._expect_sym(";")
                equations.append((name_token.text, body))
            elif token.is_kw("main"):
                self._advance()
                self._expect_sym("=")
                main = self._parse_prog()
                self._expect_sym(";")
                if self._peek().kind != "EOF":
                    raise self._error("o comando principal deve ser a última declaração")
            else:
                raise self._error("esperado 'coin', 'system', 'gate', 'proc' ou 'main'")

        if main is None:
            raise self._error("falta a declaração 'main'")
        return ParsedProgram(Declaration(tuple(equations), main), gates, list(self.spaces.values()))

    def _parse_space(self) -> None:
        kind_token = self._advance()
        name_token = self._expect_id()
        if name_token.text in self.spaces:
            raise ParseError(f"declaração duplicada do espaço '{name_token.text}'",
                             name_token.line, name_token.column)
        self._expect_sym(":")
        if kind_token.text == "coin":
            self._expect_kw("basis")
            self._expect_sym("{")
            labels = [self._expect_label()]
            while self._peek().is_sym(","):
                self._advance()
                labels.append(self._expect_label())
            self._expect_sym("}")
            if len(set(labels)) != len(labels):
                raise ParseError(f"rótulos repetidos na moeda '{name_token.text}'",
                                 name_token.line, name_token.column)
            space = SpaceSpec.coin(name_token.text, labels)
        elif self._peek().is_kw("ring"):
            self._advance()
            space = SpaceSpec.ring_system(name_token.text, self._expect_int())
        else:
            self._expect_kw("dim")
            space = SpaceSpec.dim_system(name_token.text, self._expect_int())
        self._expect_sym(";")
        self.spaces[space.name] = space

    def _parse_gate(self, gates: GateLibrary) -> None:
        self._advance()
        name_token = self._expect_id()
        if name_token.text in gates:
            raise ParseError(f"declaração duplicada da porta '{name_token.text}'",
                             name_token.line, name_token.column)
        self._expect_kw("on")
        self._expect_sym("(")
        signature = [self._expect_id()]
        while self._peek().is_sym(","):
            self._advance()
            signature.append(self._expect_id())
        self._expect_sym(")")
        for token in signature:
            if token.text not in self.spaces:
                raise ParseError(f"espaço desconhecido '{token.text}' na assinatura da porta",
                                 token.line, token.column)
        self._expect_sym("=")
        expr = self._parse_gexpr()
        self._expect_sym(";")
        gates.define(name_token.text, [self.spaces[t.text] for t in signature], expr)

    def _parse_gexpr(self) -> GateExpr:
        token = self._advance()
        if token.is_kw("hadamard"):
            return GateExpr("hadamard")
        if token.is_kw("identity"):
            return GateExpr("identity")
        if token.is_kw("fourier"):
            return GateExpr("fourier", (self._expect_int(),))
        if token.is_kw("shift"):
            return GateExpr("shift", (self._expect_int(),))
        if token.is_kw("permutation"):
            self._expect_sym("(")
            images = [self._expect_int()]
            while self._peek().is_sym(","):
                self._advance()
                images.append(self._expect_int())
            self._expect_sym(")")
            return GateExpr("permutation", tuple(images))
        if token.is_kw("matrix"):
            self._expect_sym("[")
            rows = [self._parse_row()]
            while self._peek().is_sym(";"):
                self._advance()
                rows.append(self._parse_row())
            self._expect_sym("]")
            return GateExpr("matrix", tuple(rows))
        raise self._error("expressão de porta inválida", token)

    def _parse_row(self) -> Tuple[complex, ...]:
        row = [self._parse_complex()]
        while self._peek().is_sym(","):
            self._advance()
            row.append(self._parse_complex())
        return tuple(row)

    def _parse_complex(self) -> complex:
        value = self._parse_term(allow_sign=True)
        while self._peek().is_sym("+") or self._peek().is_sym("-"):
            value += self._parse_term(allow_sign=True)
        return value

    def _parse_term(self, allow_sign: bool) -> complex:
        sign = 1.0
        if allow_sign and (self._peek().is_sym("+") or self._peek().is_sym("-")):
            sign = -1.0 if self._advance().text == "-" else 1.0
        token = self._peek()
        if token.kind in ("INT", "REAL"):
            self._advance()
            return complex(sign * float(token.text), 0.0)
        if token.kind == "IMAG":
            self._advance()
            return complex(0.0, sign * float(token.text))
        raise self._error("esperado número")

    # ------------------------------------------------------------------ programas
    def _starts_program(self, token: Token) -> bool:
        return token.kind == "ID" or token.is_sym("(") or \
            (token.kind == "KEYWORD" and token.text in _PROGRAM_START_KEYWORDS)

    def _parse_prog(self) -> ProgramScheme:
        left = self._parse_seq()
        if not self._peek().is_sym("(+)"):
            return left
        choice_token = self._advance()
        self._expect_sym("[")
        gate_token = self._expect_id()
        self._expect_sym("[")
        coin_token = self._expect_id()
        self._expect_sym("]")
        self._expect_sym("]")
        coin = self.spaces.get(coin_token.text)
        if coin is None or coin.kind != "coin":
            raise ParseError(f"moeda desconhecida '{coin_token.text}' na escolha quântica",
                             coin_token.line, coin_token.column)
        if coin.dimension != 2:
            raise ParseError(f"escolha binária exige moeda de dois rótulos ('{coin.name}' tem {coin.dimension})",
                             coin_token.line, coin_token.column)
        right = self._parse_prog()
        guard = CoinRef(coin.name)
        coin_program = Unitary(gate_token.text, (guard,), (), pos=self._pos(gate_token))
        try:
            result = desugar_choice(coin_program, guard, [(coin.labels[0], left), (coin.labels[1], right)])
        except ValueError as e:
            raise ParseError(str(e), choice_token.line, choice_token.column) from e
        return Seq(result.first, Qif(result.second.guard, result.second.branches, pos=self._pos(choice_token)),
                   pos=self._pos(choice_token))

    def _parse_seq(self) -> ProgramScheme:
        first = self._parse_power()
        # ';' seguido de algo que não inicia programa encerra a declaração
        if self._peek().is_sym(";") and self._starts_program(self._peek(1)):
            token = self._advance()
            return Seq(first, self._parse_seq(), pos=self._pos(token))
        return first

    def _parse_power(self) -> ProgramScheme:
        atom = self._parse_atom()
        while self._peek().is_sym("^"):
            token = self._advance()
            n = self._expect_int()
            if n < 1:
                raise ParseError(f"potência sequencial exige n ≥ 1 (recebido {n})", token.line, token.column)
            atom = seq_power(atom, n)
        return atom

    def _parse_atom(self) -> ProgramScheme:
        token = self._peek()
        if token.is_kw("abort"):
            self._advance()
            return Abort(pos=self._pos(token))
        if token.is_kw("skip"):
            self._advance()
            return Skip(pos=self._pos(token))
        if token.is_kw("qif"):
            return self._parse_qif()
        if token.is_sym("("):
            self._advance()
            inner = self._parse_prog()
            self._expect_sym(")")
            return inner
        if token.kind == "ID":
            self._advance()
            if self._peek().is_sym("["):
                return self._parse_unitary(token)
            return ProcCall(token.text, pos=self._pos(token))
        raise self._error("esperado programa")

    def _parse_unitary(self, gate_token: Token) -> Unitary:
        self._expect_sym("[")
        args = [self._expect_id()]
        while self._peek().is_sym(","):
            self._advance()
            args.append(self._expect_id())
        self._expect_sym("]")
        coins: List[CoinRef] = []
        systems: List[str] = []
        for arg in args:
            space = self.spaces.get(arg.text)
            if space is None:
                raise ParseError(f"variável não declarada '{arg.text}'", arg.line, arg.column)
            if space.kind == "coin":
                if systems:
                    raise ParseError("variáveis de moeda devem preceder as variáveis principais",
                                     arg.line, arg.column)
                coins.append(CoinRef(arg.text))
            else:
                systems.append(arg.text)
        return Unitary(gate_token.text, tuple(coins), tuple(systems), pos=self._pos(gate_token))

    def _parse_qif(self) -> Qif:
        qif_token = self._advance()
        self._expect_sym("[")
        guard = self._expect_id()
        self._expect_sym("]")
        branches = [self._parse_branch()]
        while self._peek().is_sym("[]"):
            self._advance()
            branches.append(self._parse_branch())
        self._expect_kw("fiq")
        return Qif(CoinRef(guard.text), tuple(branches), pos=self._pos(qif_token))

    def _parse_branch(self) -> Tuple[str, ProgramScheme]:
        self._expect_sym("|")
        label = self._expect_label()
        self._expect_sym(">")
        self._expect_sym("->")
        return label, self._parse_prog()


def parse(src: SourceFile) -> ParsedProgram:
    return Parser().parse(src)


def parse_text(text: str) -> ParsedProgram:
    return Parser().parse(SourceFile(text))


def with_ring(program: ParsedProgram, ring: int) -> ParsedProgram:
    """Troca o W de todos os anéis e reconstrói as portas sobre as novas dimensões."""
    spaces = [SpaceSpec.ring_system(s.name, ring) if s.ring is not None else s for s in program.spaces]
    by_name = {s.name: s for s in spaces}
    gates = GateLibrary()
    for name, entry in program.gates.entries.items():
        gates.define(name, [by_name[s] for s in entry.spaces], entry.expr)
    return ParsedProgram(program.declaration, gates, spaces)
