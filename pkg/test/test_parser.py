import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modules.lang.ast import (Abort, CoinRef, Declaration, ProcCall, Qif, Seq, Skip, SpaceSpec, Unitary, desugar_choice,
                              free_coins, max_copies, seq_power)
from modules.lang.gates import GateExpr
from modules.parser.lexer import tokenize
from modules.parser.parser import SourceFile, parse, parse_text, with_ring
from modules.parser.printer import pretty_print, print_program
from modules.utils.errors import ParseError

WALKS = ["rhw", "drhw", "ddrhw", "ddrhw_two_coins", "qutrit", "qintw", "qintw_reversed",
         "recq1", "while3", "while4"]

H = Unitary("H", (CoinRef("d"),))
TL = Unitary("TL", (), ("p",))
TR = Unitary("TR", (), ("p",))


def test_lexer_positions_and_comments():
    """Comentários são descartados e as posições são 1-based."""
    tokens = tokenize("# comentário\nproc X <= skip; // fim\n")

    assert [t.text for t in tokens[:-1]] == ["proc", "X", "<=", "skip", ";"]
    assert tokens[0].kind == "KEYWORD"
    assert (tokens[1].line, tokens[1].column) == (2, 6)
    assert tokens[-1].kind == "EOF"


def test_lexer_imaginary_numbers():
    tokens = tokenize("matrix [0.5i, 1]")

    kinds = [t.kind for t in tokens]
    assert "IMAG" in kinds
    assert tokens[kinds.index("IMAG")].text == "0.5"


def test_lexer_unexpected_character():
    with pytest.raises(ParseError) as excinfo:
        tokenize("proc X <= $;")

    assert excinfo.value.line == 1
    assert excinfo.value.column == 11


def test_parse_rhw_desugars_choice(rhw_program):
    """A escolha vira H[d]; qif [d] |L> -> TL[p] [] |R> -> TR[p]; X fiq."""
    body = rhw_program.declaration.body("X")

    expected = Seq(H, Qif(CoinRef("d"), (("L", TL), ("R", Seq(TR, ProcCall("X"))))))
    assert body == expected
    assert rhw_program.declaration.main == ProcCall("X")
    assert rhw_program.declaration.names == ["X"]


def test_desugar_choice_directly():
    choice = desugar_choice(H, CoinRef("d"), [("L", TL), ("R", TR)])

    assert choice == Seq(H, Qif(CoinRef("d"), (("L", TL), ("R", TR))))
    with pytest.raises(ValueError):
        desugar_choice(TL, CoinRef("d"), [("L", TL), ("R", TR)])


def test_free_coins(load_walk):
    program, _ = load_walk("ddrhw_two_coins")

    assert free_coins(program.declaration.body("X")) == {"d"}
    assert free_coins(program.declaration.body("Y")) == {"e"}
    assert free_coins(program.declaration.main) == set()


def test_parse_spaces_and_gates(rhw_program):
    coin = rhw_program.space("d")
    ring = rhw_program.space("p")

    assert coin.kind == "coin" and coin.labels == ("L", "R")
    assert ring.ring == 4 and ring.dimension == 9
    assert rhw_program.gates["TL"].expr == GateExpr("shift", (-1,))
    assert rhw_program.gates["H"].unitary


def test_choice_binds_looser_than_sequence():
    program = parse_text("""
        coin d : basis {L, R};
        system p : ring 2;
        gate H on (d) = hadamard;
        gate TL on (p) = shift -1;
        gate TR on (p) = shift 1;
        main = TL[p]; TR[p] (+)[H[d]] TR[p];
    """)

    main = program.declaration.main
    assert isinstance(main, Seq) and main.first == H
    assert main.second.branch_for("L") == Seq(TL, TR)


def test_sequence_power():
    program = parse_text("""
        system p : ring 2;
        gate TR on (p) = shift 1;
        main = TR[p]^3;
    """)

    assert program.declaration.main == seq_power(TR, 3)
    assert program.declaration.main == Seq(TR, Seq(TR, TR))


def test_qutrit_three_branches(load_walk):
    program, _ = load_walk("qutrit")

    qif = program.declaration.body("X").second
    assert [label for label, _ in qif.branches] == ["L", "R", "I"]
    assert qif.branch_for("I") == ProcCall("X")


def test_omitted_branch_is_abort():
    program = parse_text("""
        coin c : basis {0, 1};
        system q : dim 2;
        main = qif [c] |0> -> skip fiq;
    """)

    qif = program.declaration.main
    assert qif.branch_for("0") == Skip()
    assert qif.branch_for("1") == Abort()


@pytest.mark.parametrize("name", WALKS)
def test_every_walk_parses(walks_dir, name):
    program = parse(SourceFile.read(str(walks_dir / f"{name}.qr")))

    assert program.declaration.names
    assert all(max(max_copies(body).values(), default=0) == 0 for _, body in program.declaration.equations)


@pytest.mark.parametrize("name", WALKS)
def test_pretty_print_round_trip(walks_dir, name):
    """pretty_print gera texto que volta à mesma declaração."""
    program = parse(SourceFile.read(str(walks_dir / f"{name}.qr")))

    text = pretty_print(program.declaration, program.spaces, program.gates)
    again = parse_text(text)

    assert again.declaration == program.declaration
    assert [s.name for s in again.spaces] == [s.name for s in program.spaces]
    assert set(again.gates.entries) == set(program.gates.entries)


def test_print_program_shows_copies():
    q = Seq(Unitary("H", (CoinRef("d", 1),)), Qif(CoinRef("d", 1), (("L", TL),)))

    assert print_program(q) == "H[d@1]; qif [d@1] |L> -> TL[p] fiq"


def test_missing_semicolon_reports_position(fixtures_dir):
    with pytest.raises(ParseError) as excinfo:
        parse(SourceFile.read(str(fixtures_dir / "missing_semicolon.qr")))

    assert excinfo.value.line == 9
    assert "linha 9" in str(excinfo.value)


def test_main_must_be_last():
    with pytest.raises(ParseError) as excinfo:
        parse_text("system q : dim 2;\nmain = skip;\nproc X <= skip;\n")

    assert "última declaração" in str(excinfo.value)


def test_duplicate_procedure_rejected():
    with pytest.raises(ParseError) as excinfo:
        parse_text("proc X <= skip;\nproc X <= abort;\nmain = X;\n")

    assert "duplicada" in str(excinfo.value)
    assert excinfo.value.line == 2


def test_choice_needs_two_label_coin():
    with pytest.raises(ParseError) as excinfo:
        parse_text("""
            coin d : basis {L, R, I};
            gate F on (d) = fourier 3;
            main = skip (+)[F[d]] skip;
        """)

    assert "dois rótulos" in str(excinfo.value)


def test_coin_program_cannot_touch_principal():
    with pytest.raises(ParseError):
        parse_text("""
            coin d : basis {L, R};
            system p : ring 1;
            gate TL on (p) = shift -1;
            main = skip (+)[TL[p]] skip;
        """)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        SourceFile.read("walks/nao_existe.qr")


def test_with_ring_rebuilds_shift_gates(rhw_program):
    wider = with_ring(rhw_program, 6)

    assert wider.space("p").dimension == 13
    assert wider.gates.matrix("TL").shape == (13, 13)
    assert wider.declaration == rhw_program.declaration


# ----------------------------------------------------------------- ida e volta sobre ASTs geradas
ROUND_TRIP_SPACES = [SpaceSpec.coin("d", ["L", "R"]), SpaceSpec.coin("c", ["0", "1"]),
                     SpaceSpec.ring_system("p", 2), SpaceSpec.dim_system("q", 2)]
LABELS = {"d": ("L", "R"), "c": ("0", "1")}

unitaries = st.builds(
    lambda gate, coins, systems: Unitary(gate, tuple(CoinRef(c) for c in coins), tuple(systems)),
    st.sampled_from(["H", "G", "TL", "CU"]),
    st.lists(st.sampled_from(["d", "c"]), max_size=2, unique=True),
    st.lists(st.sampled_from(["p", "q"]), max_size=2, unique=True),
).filter(lambda u: u.coins or u.systems)

leaves = st.one_of(unitaries, st.just(Skip()), st.just(Abort()), st.sampled_from([ProcCall("X"), ProcCall("Y")]))


def _qifs(children):
    return st.builds(lambda coin, bodies: Qif(CoinRef(coin), tuple(zip(LABELS[coin], bodies))),
                     st.sampled_from(["d", "c"]), st.lists(children, min_size=1, max_size=2))


programs = st.recursive(leaves, lambda children: st.one_of(st.builds(Seq, children, children), _qifs(children)),
                        max_leaves=8)


@pytest.mark.parametrize("p", [
    Seq(H, Seq(TL, TR)),
    Seq(Seq(H, TL), TR),
    Qif(CoinRef("d"), (("L", Seq(TL, TR)), ("R", Seq(Seq(TR, TL), ProcCall("X"))))),
])
def test_nested_sequences_round_trip(p):
    declaration = Declaration((("X", p),), ProcCall("X"))

    assert parse_text(pretty_print(declaration, ROUND_TRIP_SPACES)).declaration == declaration


@settings(max_examples=200, deadline=None)
@given(bodies=st.lists(programs, max_size=2), main=programs)
def test_pretty_print_round_trip_on_generated_declarations(bodies, main):
    declaration = Declaration(tuple(zip(["X", "Y"], bodies)), main)

    text = pretty_print(declaration, ROUND_TRIP_SPACES)

    assert parse_text(text).declaration == declaration
