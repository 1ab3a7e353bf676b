"""Exceções do motor semântico. Todas derivam de ValueError."""

from typing import Optional


class FockrecError(ValueError):
    """Erro base do domínio."""


class ParseError(FockrecError):
    """Erro de sintaxe com posição (linha/coluna) no arquivo fonte."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f" (linha {line}, coluna {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class TruncationError(FockrecError):
    """Ocupação fora do truncamento configurado."""


class SpaceMismatchError(FockrecError):
    """Operadores ou estados definidos sobre espaços diferentes."""


class NotAChainError(FockrecError):
    """Sequência de operadores que não é crescente na ordem plana."""


class FactorialBudgetError(FockrecError):
    """Simetrização exata acima do limite de cópias por moeda."""


class StatisticsError(FockrecError):
    """Estatística (bóson/férmion) incompatível com a operação."""


class ProgramError(FockrecError):
    """Programa fora das pré-condições da operação (identificadores, aridade)."""


class ValidationError(FockrecError):
    """Programa sintaticamente correto que viola as regras de boa formação."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)
