import json

import numpy as np
import pytest

from modules.fock.operator import identity_operator, zero_operator
from modules.oracles.closed_forms import (arrangement_count, bidirectional_closed_form, bidirectional_path,
                                          binomial_prefactor, distinct_arrangements, loop_closed_form,
                                          published_coherent_partial_sum, published_coherent_weights,
                                          symmetrised_loop_closed_form, unidirectional_closed_form,
                                          unidirectional_path, walk_gates)
from modules.oracles.compare import compare, interior
from modules.oracles.simulator import ConfigurationSimulator, config_simulate, total_weight
from modules.semantics.config import SemanticsConfig
from modules.semantics.engine import SemanticsEngine, kleene_fixpoint, operational_semantics
from modules.semantics.substitution import syntactic_approx
from modules.symmetry.symmetrise import symmetrise_operator
from modules.utils.errors import SpaceMismatchError

FULL = SemanticsConfig(skip_convention="full-identity", tolerance=1e-12)
A = 1 / (2 * np.sqrt(2))


# ----------------------------------------------------------------- palavras e contagens
def test_paths():
    assert unidirectional_path(2) == ("R", "R", "L")
    assert bidirectional_path(3) == ("R", "L", "L")
    assert bidirectional_path(4) == ("R", "L", "R", "R")
    assert bidirectional_path(3, dual=True) == ("L", "R", "R")

    with pytest.raises(ValueError):
        bidirectional_path(0)


def test_arrangements():
    assert list(distinct_arrangements(("R", "L", "L"))) == [("L", "L", "R"), ("L", "R", "L"), ("R", "L", "L")]
    assert arrangement_count(("R", "R")) == 1


@pytest.mark.parametrize("n", range(1, 9))
def test_arrangement_count_is_binomial(n):
    assert arrangement_count(bidirectional_path(n)) == binomial_prefactor(n)


def test_published_coherent_values():
    weights = published_coherent_weights()

    assert weights["ratio"] == 2.0
    assert weights["-1"] + weights["2"] == pytest.approx(weights["trace"])
    assert published_coherent_partial_sum(40) == pytest.approx(np.exp(-0.5))


def test_walk_gates_missing(rhw_program):
    with pytest.raises(SpaceMismatchError) as excinfo:
        walk_gates(rhw_program.gates, coin_gate="K")
    assert "K" in str(excinfo.value)


# ----------------------------------------------------------------- comparação
def test_compare_report(rhw_space):
    report = compare(identity_operator(rhw_space), zero_operator(rhw_space), 1e-12, label="id-vs-zero")

    assert not report.passed
    assert report.max_diff == pytest.approx(1.0)
    assert list(report.table.columns) == ["occ", "total", "max_diff", "possibly_truncated"]
    assert report.table["possibly_truncated"].sum() == 1
    assert report.summary()["label"] == "id-vs-zero"
    assert compare(identity_operator(rhw_space), identity_operator(rhw_space)).passed


def test_interior_drops_top_shell(rhw_space):
    assert rhw_space.occ(d=4) not in interior(rhw_space)
    assert len(interior(rhw_space)) == 4


# ----------------------------------------------------------------- formas fechadas × motor
@pytest.mark.parametrize("n", [1, 2, 3])
def test_unidirectional_approximations(load_walk, cfg, n):
    program, space = load_walk("rhw", trunc=4)
    h, tl, tr = walk_gates(program.gates)

    approx = SemanticsEngine(space, program.gates, cfg).interpret_generalised(
        syntactic_approx(program.declaration, "X", n))

    assert compare(approx, unidirectional_closed_form(space, n, h, tl, tr), 1e-12).passed


def test_bidirectional_closed_form(load_walk, cfg):
    program, space = load_walk("ddrhw", trunc=4)
    h, tl, tr = walk_gates(program.gates)

    fix = kleene_fixpoint(program.declaration, space, program.gates, cfg)
    x, y = bidirectional_closed_form(space, h, tl, tr)

    assert compare(fix.procedures["X"], x, 1e-12, interior(space)).passed
    assert compare(fix.procedures["Y"], y, 1e-12, interior(space)).passed


def test_entangling_loop_closed_form(load_walk):
    program, space = load_walk("while4", trunc=4)
    w, u = program.gates.matrix("W"), program.gates.matrix("U")

    fix = kleene_fixpoint(program.declaration, space, program.gates, FULL)

    assert compare(fix.procedures["X"], loop_closed_form(space, w, u), 1e-12, interior(space)).passed


def test_product_loop_closed_forms(load_walk):
    program, space = load_walk("while3", trunc=4)
    v, u = program.gates.matrix("V"), program.gates.matrix("U")

    fix = kleene_fixpoint(program.declaration, space, program.gates, FULL)
    expected = loop_closed_form(space, np.kron(v, np.eye(2)), u)

    assert compare(fix.procedures["X"], expected, 1e-12, interior(space)).passed
    assert compare(symmetrise_operator(fix.procedures["X"]), symmetrised_loop_closed_form(space, v, u),
                   1e-12, interior(space)).passed


def test_loop_needs_full_identity_skip(load_walk, cfg):
    """Com skip restrito às ocupações com toda moeda presente, o término com uma cópia se perde."""
    program, space = load_walk("while4", trunc=4)
    w, u = program.gates.matrix("W"), program.gates.matrix("U")

    fix = kleene_fixpoint(program.declaration, space, program.gates, cfg)

    assert not compare(fix.procedures["X"], loop_closed_form(space, w, u), 1e-12, interior(space)).passed


# ----------------------------------------------------------------- simulador de configurações
def test_simulator_rhw_two_steps(load_walk):
    program, _ = load_walk("rhw")
    simulator = ConfigurationSimulator(program.declaration, program.spaces, program.gates)

    history = simulator.run(2)

    assert len(history) == 3
    assert total_weight(history[-1]) == pytest.approx(1.0)
    done = [simulator.describe(wc) for wc in history[-1] if wc.config.terminated]
    assert sorted((d["position"], d["coins"]) for d in done) == [(-1, ["L"]), (0, ["R", "L"])]
    assert sum(wc.amplitude.real ** 2 for wc in history[-1] if wc.config.terminated) == pytest.approx(0.75)


def test_simulator_interference_in_choice_mode(load_walk):
    """qintw com n = 2: (1/2√2)[(L,−3) + (R,−1) + 2(L,−1) − (L,1) + (R,3)] após três passos."""
    program, _ = load_walk("qintw")
    simulator = ConfigurationSimulator(program.declaration, program.spaces, program.gates, mode="choice")

    final = simulator.run(3)[-1]

    amplitudes = {}
    for wc in final:
        entry = simulator.describe(wc)
        amplitudes[(entry["coins"][0], entry["position"])] = entry["amplitude"][0]
    assert amplitudes == {
        ("L", -3): pytest.approx(A),
        ("R", -1): pytest.approx(A),
        ("L", -1): pytest.approx(2 * A),
        ("L", 1): pytest.approx(-A),
        ("R", 3): pytest.approx(A),
    }


def test_simulator_weight_never_exceeds_one(load_walk):
    program, _ = load_walk("qintw_reversed")

    for mode in ("call", "choice"):
        configs = config_simulate(program.declaration, program.spaces, program.gates, 4, mode=mode)
        assert total_weight(configs) <= 1 + 1e-10


def test_simulator_reports(load_walk):
    program, _ = load_walk("rhw")
    simulator = ConfigurationSimulator(program.declaration, program.spaces, program.gates)
    history = simulator.run(1)

    frame = simulator.trace_frame(history)
    dump = json.loads(simulator.trace_json(history))

    assert list(frame.columns) == ["step", "re", "im", "coins", "position", "residual"]
    assert list(frame["step"]) == [0, 1, 1]
    assert dump[0][0]["residual"] == "X"
    assert dump[1][0]["residual"] == "E"


def test_simulator_rejects_bad_arguments(load_walk):
    program, _ = load_walk("rhw")

    with pytest.raises(ValueError):
        ConfigurationSimulator(program.declaration, program.spaces, program.gates, mode="bfs")
    with pytest.raises(ValueError):
        ConfigurationSimulator(program.declaration, program.spaces, program.gates).run(-1)


def test_unidirectional_amplitudes_two_ways(load_walk, cfg):
    """De |L⟩|0⟩, o ramo terminado com moedas R^i L em i − 1 tem amplitude 1/√2^(i+1)."""
    program, space = load_walk("rhw", trunc=6)
    simulator = ConfigurationSimulator(program.declaration, program.spaces, program.gates)
    final = simulator.run(6)[-1]
    done = {len(entry["coins"]): entry
            for entry in (simulator.describe(wc) for wc in final if wc.config.terminated)}

    semantics = operational_semantics(program.declaration, space, program.gates, cfg).procedures["X"]

    for i in range(6):
        expected = 2 ** (-(i + 1) / 2)
        entry = done[i + 1]
        assert entry["coins"] == ["R"] * i + ["L"]
        assert entry["position"] == i - 1
        assert entry["amplitude"][0] == pytest.approx(expected, abs=1e-12)

        coin_index = int(np.ravel_multi_index([1] * i + [0], (2,) * (i + 1)))
        block = semantics.block_at(space.occ(d=i + 1))
        assert block[coin_index * 9 + 4 + i - 1, 4].real == pytest.approx(expected, abs=1e-12)
