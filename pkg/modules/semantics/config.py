from dataclasses import dataclass, replace

from config.settings import SETTINGS

SKIP_CONVENTIONS = ("occupied", "full-identity")
CREATION_MODES = ("guard", "environment")


@dataclass(frozen=True)
class SemanticsConfig:
    """
    skip_convention:
        "occupied": skip é a identidade só onde toda moeda tem contagem local ≥ 1;
        "full-identity": identidade em todas as ocupações.
    creation:
        "guard": a cópia nova é aberta pela composição guardada (padrão);
        "environment": além disso o ambiente é elevado por 𝕂_C, leitura literal
        da equação recursiva, mantida como controle negativo.
    """

    skip_convention: str = SETTINGS["skip_convention"]
    tolerance: float = SETTINGS["tolerance"]
    creation: str = "guard"

    def __post_init__(self):
        if self.skip_convention not in SKIP_CONVENTIONS:
            raise ValueError(f"Convenção de skip inválida: {self.skip_convention}")
        if self.creation not in CREATION_MODES:
            raise ValueError(f"Modo de criação inválido: {self.creation}")
        if self.tolerance <= 0:
            raise ValueError("A tolerância deve ser positiva")

    def with_(self, **changes) -> "SemanticsConfig":
        return replace(self, **changes)
