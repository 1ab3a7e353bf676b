from pathlib import Path

import pytest

from modules.fock.space import FockSpace
from modules.parser.parser import SourceFile, parse, parse_text, with_ring
from modules.semantics.config import SemanticsConfig

ROOT = Path(__file__).resolve().parent.parent
WALKS_DIR = ROOT / "walks"
FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"

RHW = """
coin d : basis {L, R};
system p : ring 4;

gate H on (d) = hadamard;
gate TL on (p) = shift -1;
gate TR on (p) = shift 1;

proc X <= TL[p] (+)[H[d]] (TR[p]; X);
main = X;
"""


@pytest.fixture
def walks_dir():
    return WALKS_DIR


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR


@pytest.fixture
def load_walk():
    """Carrega um programa de walks/ com anel e truncamento reduzidos: (programa, espaço)."""

    def _load(name: str, trunc=4, max_total=None, ring=4):
        program = parse(SourceFile.read(str(WALKS_DIR / f"{name}.qr")))
        if ring is not None and any(s.ring is not None for s in program.spaces):
            program = with_ring(program, ring)
        return program, FockSpace.build(program.spaces, trunc, max_total)

    return _load


@pytest.fixture
def rhw_program():
    return parse_text(RHW)


@pytest.fixture
def rhw_space(rhw_program):
    return FockSpace.build(rhw_program.spaces, 4)


@pytest.fixture
def cfg():
    return SemanticsConfig(skip_convention="occupied", tolerance=1e-12)
