import re
from dataclasses import dataclass
from typing import List

from modules.utils.errors import ParseError

KEYWORDS = {
    "coin", "basis", "system", "ring", "dim", "gate", "on", "hadamard", "fourier",
    "shift", "identity", "matrix", "permutation", "proc", "main", "abort", "skip", "qif", "fiq",
}

SYMBOLS = ["(+)", "[]", "->", "<=", ";", ":", ",", "{", "}", "[", "]", "(", ")", "|", ">", "=", "^", "+", "-"]

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)"
    r"|(?P<newline>\n)"
    r"|(?P<comment>(\#|//)[^\n]*)"
    r"|(?P<number>\d+(\.\d*)?([eE][+-]?\d+)?i?)(?![A-Za-z0-9_])"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<sym>" + "|".join(re.escape(s) for s in SYMBOLS) + r")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # ID | KEYWORD | INT | REAL | IMAG | SYM | EOF
    text: str
    line: int
    column: int

    def is_sym(self, text: str) -> bool:
        return self.kind == "SYM" and self.text == text

    def is_kw(self, text: str) -> bool:
        return self.kind == "KEYWORD" and self.text == text


def tokenize(text: str) -> List[Token]:
    """Converte o texto fonte em tokens com linha/coluna (1-based)."""
    tokens: List[Token] = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"caractere inesperado {text[i]!r}", line, i - line_start + 1)
        kind = m.lastgroup
        lexeme = m.group(kind)
        column = i - line_start + 1
        if kind == "newline":
            line, line_start = line + 1, m.end()
        elif kind == "number":
            if lexeme.endswith("i"):
                tokens.append(Token("IMAG", lexeme[:-1], line, column))
            elif re.fullmatch(r"\d+", lexeme):
                tokens.append(Token("INT", lexeme, line, column))
            else:
                tokens.append(Token("REAL", lexeme, line, column))
        elif kind == "id":
            tokens.append(Token("KEYWORD" if lexeme in KEYWORDS else "ID", lexeme, line, column))
        elif kind == "sym":
            tokens.append(Token("SYM", lexeme, line, column))
        i = m.end()
    tokens.append(Token("EOF", "", line, i - line_start + 1))
    return tokens
